#pragma once

#include <memory>
#include <string>
#include <vector>

#include "needlelab/check_report.hpp"
#include "needlelab/coefficients.hpp"

namespace needlelab {

/// Interval (a,b); either end may be infinite (at most one per transport ray).
struct Interval {
    double a = 0.0;
    double b = 1.0;

    Interval() = default;
    Interval(double a_, double b_);

    bool finite_a() const;
    bool finite_b() const;
    bool finite() const { return finite_a() && finite_b(); }
    double length() const { return b - a; }
    bool contains(double x) const { return x > a && x < b; }
};

enum class DensityForm {
    Constant,    // A
    Power,       // A * (sgn (x - x0))^p
    SinPow,      // A * sin(omega (x - x0))^p
    CoshPow,     // A * cosh(omega (x - x0))^p
    SinhPow,     // A * sinh(omega (x - x0))^p
    Exp,         // A * exp(omega (x - x0))
    SKappaPow,   // A * s_kappa(sgn (x - x0))^p  (shares code with s_kappa)
    Grid,        // log-linear interpolation of positive samples
};

/// A one-dimensional conditional density h > 0 on an interval, with a
/// continuous extension to closed finite endpoints.  Grid densities
/// interpolate linearly in log h so positivity is automatic and (log h)'
/// is piecewise constant between nodes.
class Density1D {
public:
    static Density1D constant(Interval iv, double c);
    static Density1D power(Interval iv, double amp, double p, double x0 = 0.0,
                           double sgn = 1.0);
    static Density1D sin_pow(Interval iv, double amp, double omega, double p,
                             double x0 = 0.0);
    static Density1D cosh_pow(Interval iv, double amp, double omega, double p,
                              double x0 = 0.0);
    static Density1D sinh_pow(Interval iv, double amp, double omega, double p,
                              double x0 = 0.0);
    static Density1D exponential(Interval iv, double amp, double omega,
                                 double x0 = 0.0);
    static Density1D s_kappa_pow(Interval iv, double amp, double kappa, double p,
                                 double x0, double sgn);
    static Density1D from_grid(Interval iv, std::vector<double> values);
    /// Grid density carrying an explicit log-perturbation of a closed form;
    /// log h(x) = base.log_value(x) + sum_k coeff[k] sin(k pi (x-a)/D).
    static Density1D log_perturbed(const Density1D& base,
                                   const std::vector<double>& coeffs);
    /// Parse "name param=value ..." per the density catalog format, or load
    /// a two-column (x, h) text file for custom grids.
    static Density1D parse(const std::string& spec);
    static Density1D load_grid_file(const std::string& path);

    const Interval& interval() const { return iv_; }
    DensityForm form() const { return form_; }
    bool closed_form() const { return form_ != DensityForm::Grid; }

    double value(double x) const;       // continuous extension on [a,b]
    double log_value(double x) const;
    /// (log h)'(x); analytic for closed forms, central differences on grids
    /// (one-sided at the first and last interior node, never at a or b).
    double log_deriv(double x) const;
    double deriv(double x) const { return value(x) * log_deriv(x); }

    double mass() const { return mass_; }
    Density1D normalized() const;       // scaled so the mass is 1

    /// g(t) = h(slope t + shift) on new_iv, slope in {+1, -1}: transport rays
    /// reparametrize their conditional densities with unit-speed charts.
    Density1D precompose_affine(double slope, double shift, Interval new_iv) const;
    Density1D scaled(double factor) const;

    std::string describe() const;
    /// Grid step for grid densities (0 for closed forms).
    double grid_step() const;

private:
    Density1D() = default;
    void cache_mass();

    Interval iv_;
    DensityForm form_ = DensityForm::Constant;
    // closed-form parameters
    double amp_ = 1.0, omega_ = 1.0, p_ = 1.0, x0_ = 0.0, sgn_ = 1.0, kappa_ = 0.0;
    // grid representation
    std::vector<double> log_values_;
    // optional analytic log-perturbation riding on a closed-form base
    std::shared_ptr<Density1D> pert_base_;
    std::vector<double> pert_coeffs_;
    double mass_ = 0.0;
};

/// Resolution of the (x0, x1, t) certification sweeps.
struct GridSpec {
    int nx = 48;              // sample points per axis
    int nt = 24;              // interpolation parameters per pair
    double edge_frac = 1e-3;  // interior offset, fraction of the length
    double tolerance = 1e-4;  // relative margin tolerance (grid checks)
    std::string describe() const;
};

// -- Certification: the two one-dimensional curvature conditions. -----------

/// h(t x1 + (1-t) x0) >= sigma^{(1-t)}_{K,N-1}(|x1-x0|)^{N-1} h(x0),
/// margin normalized by h(x0).
CheckReport check_mcp_density(const Density1D& h, const CurvatureDim& kd,
                              const GridSpec& grid = {});

/// h^{1/(N-1)}((1-t)x0 + t x1) >=
///   sigma^{(1-t)}_{K,N-1} h^{1/(N-1)}(x0) + sigma^{(t)}_{K,N-1} h^{1/(N-1)}(x1).
CheckReport check_cd_density(const Density1D& h, const CurvatureDim& kd,
                             const GridSpec& grid = {});

// -- Bounds implied by the MCP inequality. -----------------------------------

struct RatioBounds {
    double lower, upper, observed;
};
/// Two-sided bound on h(x1)/h(x0), x0 <= x1, finite interval only.
RatioBounds ratio_bounds(const Density1D& h, const CurvatureDim& kd, double x0,
                         double x1);

struct LogDerivBounds {
    double lower, upper, observed;
};
/// -(N-1) s'(b-x)/s(b-x) <= (log h)'(x) <= (N-1) s'(x-a)/s(x-a);
/// an infinite end maps its bound to the flat/hyperbolic limit.
LogDerivBounds log_derivative_bounds(const Density1D& h, const CurvatureDim& kd,
                                     double x);

struct SupBound {
    double bound, observed_sup;
};
/// sup h <= (1/(b-a)) * { N for K >= 0, quadrature constant for K < 0 };
/// requires mass 1 within 1e-8.
SupBound sup_bound(const Density1D& h, const CurvatureDim& kd);

struct DerivativeL1 {
    double integral, bound;
};
/// int |h'| <= C^{(K,N)}_{b-a} / (b-a), with the constant assembled from the
/// proof's half-interval decomposition (documented in the implementation);
/// requires mass 1.
DerivativeL1 derivative_l1(const Density1D& h, const CurvatureDim& kd);

/// log h^eps = log h * psi_eps with the C^2 bump psi = c (1-x^2)^3;
/// returns a grid density on (a+eps, b-eps).
Density1D log_convolve(const Density1D& h, double eps, int grid_nodes = 2048);

struct RigidityWindow {
    double forced_lower, forced_upper;
};
/// Tightest flat two-sided sandwich for h(x1)/h(x0) with window ends -R, R.
RigidityWindow rigidity_window(double R, double N, double x0, double x1);

/// -[(log h)'(x+t) - (log h)'(x)] >= K t + 1/(N-1) int_0^t ((log h)'(x+s))^2 ds.
/// For t < 0 the inequality is checked from the shifted basepoint x+t so the
/// direction matches the ray-integrated statement.
CheckReport bochner_1d(const Density1D& h, const CurvatureDim& kd, double x,
                       double t, const GridSpec& grid = {});

/// Grid sweep of bochner_1d over admissible (x, t).
CheckReport bochner_1d_sweep(const Density1D& h, const CurvatureDim& kd,
                             const GridSpec& grid = {});

struct EquivalenceReport {
    CheckReport bochner;
    CheckReport cd;
    bool agree = false;
};
/// Verdict equivalence of the ray Bochner inequality and the CD condition.
EquivalenceReport bochner_implies_cd(const Density1D& h, const CurvatureDim& kd,
                                     const GridSpec& grid = {});

} // namespace needlelab
