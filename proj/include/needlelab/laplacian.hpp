#pragma once

#include <optional>
#include <string>
#include <vector>

#include "needlelab/check_report.hpp"
#include "needlelab/disintegration.hpp"

namespace needlelab {

enum class LapVariant { General, Dp, DpSquared, Dv, AbsDv, DvSquared };

const char* lap_variant_name(LapVariant v);

/// A signed endpoint atom of the singular part, aggregated against q.
struct Atom {
    Point location;
    double mass = 0.0;     // signed
    bool at_initial = true;
    double u = 0.0;        // u-coordinate of the endpoint
};

/// Distributional Laplacian assembled from a disintegration: the
/// m-absolutely-continuous density sampled per ray plus endpoint atoms.
class DistributionalLaplacian {
public:
    DistributionalLaplacian(const Disintegration& dis, LapVariant variant);

    LapVariant variant() const { return variant_; }
    const Disintegration& disintegration() const { return *dis_; }

    /// Density of the regular part at a point-on-ray.
    double regular_at(const RayHandle& h) const;
    /// Atoms merged by location (1e-9 chart distance).
    const std::vector<Atom>& atoms() const { return atoms_; }
    /// Per-ray atom list before aggregation (ray, at_initial, mass).
    struct RawAtom {
        int ray;
        bool at_initial;
        double mass;
        double u;  // u-coordinate of the endpoint
        Point location;
    };
    const std::vector<RawAtom>& raw_atoms() const { return raw_atoms_; }

    double singular_mass_in(const Region& window) const;     // signed total
    double singular_tv_in(const Region& window) const;       // total variation

private:
    const Disintegration* dis_;
    LapVariant variant_;
    std::vector<Atom> atoms_;
    std::vector<RawAtom> raw_atoms_;

    void collect_atoms();
};

DistributionalLaplacian laplacian_general(const Disintegration& dis);
/// Distance-from-a-point Laplacian on X minus the base point: test functions
/// paired against it must vanish near the base.
DistributionalLaplacian laplacian_dp(const Disintegration& dis);
DistributionalLaplacian laplacian_dp_squared(const Disintegration& dis);
DistributionalLaplacian laplacian_dv(const Disintegration& dis);
DistributionalLaplacian laplacian_abs_dv(const Disintegration& dis);
DistributionalLaplacian laplacian_dv_squared(const Disintegration& dis);

enum class NuCase { KPosBounded, KPosSuspension, KZero, KNeg };

/// The comparison measure nu of the distance-squared Laplacian bound; its
/// density is evaluated per point-on-ray with the flat/hyperbolic limit
/// conventions for missing endpoints.
class NuMeasure {
public:
    NuMeasure(const Disintegration& dis, CurvatureDim kd);

    double density_at(const RayHandle& h) const;
    NuCase case_tag() const { return case_tag_; }
    const std::optional<std::pair<Point, Point>>& suspension_poles() const {
        return poles_;
    }

private:
    const Disintegration* dis_;
    CurvatureDim kd_;
    NuCase case_tag_ = NuCase::KZero;
    std::optional<std::pair<Point, Point>> poles_;
};

NuMeasure nu_measure(const Disintegration& dis, const CurvatureDim& kd);

struct ComparisonSpec {
    int samples_per_ray = 64;
    int ray_stride = 8;
    double edge_frac = 1e-3;
    double tolerance = 1e-6;
};

/// Sharp comparison sandwich per variant: upper bound on the full Laplacian
/// (atom signs included) and lower bound on the regular part.  Upper and
/// lower worst margins are reported separately in `detail`.
CheckReport comparison_check(const DistributionalLaplacian& lap,
                             const CurvatureDim& kd,
                             const ComparisonSpec& spec = {});

/// Compactly supported test function with a closed-form derivative along the
/// flow whenever it factors through u.
struct TestBump {
    enum Kind { OfU, CylinderCut } kind = OfU;
    double center = 0.0, width = 1.0;   // bump((u - center)/width)
    double z_width = 1.0;               // CylinderCut: bump(z / z_width)

    double eval_s(double s) const {     // C^4 bump (1-s^2)^5
        const double w = 1.0 - s * s;
        return w > 0.0 ? w * w * w * w * w : 0.0;
    }
    double eval_s_deriv(double s) const {
        const double w = 1.0 - s * s;
        return w > 0.0 ? -10.0 * s * w * w * w * w : 0.0;
    }
    std::string describe() const;
};

struct PairingSpec {
    int panels_per_ray = 512;
    int ray_stride = 1;
};

/// (f, Lap) pairing: per-ray quadrature of f * regular * h plus atom values.
double pairing(const DistributionalLaplacian& lap, const TestBump& f,
               const Region& window, const PairingSpec& spec = {});

/// (f, nu) pairing against the reference measure density.
double pairing_nu(const NuMeasure& nu, const Disintegration& dis,
                  const TestBump& f, const Region& window,
                  const PairingSpec& spec = {});

/// | pairing - int f' dm | (or - 2 int u f' dm for the squared variants),
/// the integration-by-parts residual in the ray calculus.
double ibp_residual(const DistributionalLaplacian& lap, const Disintegration& dis,
                    const TestBump& f, const Region& window,
                    const PairingSpec& spec = {});

struct EndpointVanishing {
    bool hypothesis_holds = false;   // liminf m(B_r)/r^s finite
    double ratio_estimate = 0.0;
    double max_h_at_base = 0.0;
    bool verdict = false;            // h vanishes at the base for q-a.e. ray
};
/// liminf m(B_r(p))/r^s over a dyadic sequence; when finite for s > 1 the
/// conditional densities must vanish at the final point.
EndpointVanishing endpoint_vanishing_check(const Disintegration& dis, double s,
                                           double r0 = 0.5, int levels = 10,
                                           double tolerance = 1e-8);

} // namespace needlelab
