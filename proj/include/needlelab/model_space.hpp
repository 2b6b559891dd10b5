#pragma once

#include <memory>
#include <string>
#include <vector>

#include "needlelab/density1d.hpp"

namespace needlelab {

/// Ambient chart coordinates of a point (unused slots stay zero).
/// SpaceForm K=0: cartesian; K!=0: embedded sphere / hyperboloid coordinates;
/// FlatCylinder: (theta, z) with theta wrapped to [-L/2, L/2);
/// WeightedInterval / WeightedHalfLine: (x); ProductLine: (alpha, z).
struct Point {
    double c[4] = {0.0, 0.0, 0.0, 0.0};
};

enum class SpaceKind {
    SpaceForm,
    FlatCylinder,
    WeightedInterval,
    WeightedHalfLine,
    ProductLine,
};

enum class BaseVariant {
    PointBase,
    Hyperplane,   // SpaceForm K=0: {first coordinate = 0}
    Equator,      // SpaceForm K>0: great circle {z = 0}
    Generator,    // FlatCylinder: {theta = 0}
    LevelPoint,   // 1-D kinds: {x = level}
    Line,         // Busemann line (x-axis / generator / vertical fiber)
};

struct BaseDescriptor {
    BaseVariant variant = BaseVariant::PointBase;
    Point point;         // PointBase location
    double level = 0.0;  // LevelPoint location / Line offset

    static BaseDescriptor at_point(Point p) {
        BaseDescriptor b;
        b.variant = BaseVariant::PointBase;
        b.point = p;
        return b;
    }
    static BaseDescriptor level_set(BaseVariant v, double level = 0.0) {
        BaseDescriptor b;
        b.variant = v;
        b.level = level;
        return b;
    }
    static BaseDescriptor line(double offset = 0.0) {
        BaseDescriptor b;
        b.variant = BaseVariant::Line;
        b.level = offset;
        return b;
    }
    bool is_level_set() const {
        return variant == BaseVariant::Hyperplane || variant == BaseVariant::Equator ||
               variant == BaseVariant::Generator || variant == BaseVariant::LevelPoint;
    }
};

/// Test windows with closed-form reference measure.
struct Region {
    enum Kind { BallK, AnnulusK, BandK, AllK } kind = AllK;
    double r0 = 0.0, r1 = 0.0;

    static Region ball(double r) { return {BallK, 0.0, r}; }
    static Region annulus(double a, double b) { return {AnnulusK, a, b}; }
    /// |u| <= c in the signed level-set / Busemann coordinate.
    static Region band(double c) { return {BandK, 0.0, c}; }
    static Region all() { return {AllK, 0.0, 0.0}; }
    std::string describe() const;
};

struct CutLocusDescription {
    enum Kind { Empty, SinglePoint, GeneratorLine } kind = Empty;
    Point point;          // SinglePoint: the antipode
    double line_theta = 0.0;  // GeneratorLine: {theta = line_theta}
};

/// Direction / foot chart of a polar factorization; q is the uniform
/// probability measure on it and the Jacobian absorbs the remaining scale.
struct Chart {
    int dim = 1;       // 0 = finite set of rays, 1 or 2 = box
    int natoms = 1;    // dim 0 only
    double lo0 = 0.0, hi0 = 1.0;
    double lo1 = 0.0, hi1 = 1.0;
    bool periodic0 = false;
    double measure() const;
};

class ModelSpace;

/// Geodesic-polar factorization of the reference measure with respect to a
/// base: rays are indexed by the chart, parametrized by the value u of the
/// generating 1-Lipschitz function (d_p, d_v or b+), which decreases at unit
/// speed along the oriented ray.  m = int int J(alpha,u) du q(dalpha).
class PolarFactorization {
public:
    PolarFactorization(const ModelSpace* sp, BaseDescriptor base);

    const Chart& chart() const { return chart_; }
    const BaseDescriptor& base() const { return base_; }

    /// u runs in (u_lo, u_hi) along ray alpha; the initial point a(X_alpha)
    /// sits at u_hi (u maximal), the final point b(X_alpha) at u_lo.
    double u_hi(const double* alpha) const;   // +inf for endless rays
    double u_lo(const double* alpha) const;   // 0 for point bases
    bool has_initial_point(const double* alpha) const;
    bool has_final_point(const double* alpha) const;

    /// Conditional density in the u coordinate, chart scale absorbed.
    double jacobian(const double* alpha, double u) const;
    /// SpaceForm point bases: jacobian = chart_scale * s_kappa(u)^{N-1},
    /// computed through the shared s_kappa (exposed for bit-exact checks).
    double chart_scale() const;
    double geometric_jacobian(double u) const;

    Point point_at(const double* alpha, double u) const;
    double cut_time(const double* alpha) const { return u_hi(alpha); }

private:
    const ModelSpace* sp_;
    BaseDescriptor base_;
    Chart chart_;
};

class ModelSpace {
public:
    static ModelSpace space_form(int dim, double K);
    static ModelSpace flat_cylinder(double L);
    static ModelSpace weighted_interval(Interval iv, Density1D weight, double N,
                                        double K);
    static ModelSpace weighted_half_line(Density1D weight, double N, double K);
    /// I x R with measure w(alpha) dalpha dz; a nonzero broken_amp makes the
    /// weight z-dependent (the engineered non-splitting input).
    static ModelSpace product_line(Interval iv, Density1D weight, double N,
                                   double broken_amp = 0.0,
                                   double broken_freq = 1.0);
    /// Parse a space config section: kind, N, K, parameters.
    static ModelSpace parse(const std::string& kind, double N, double K,
                            double param);

    SpaceKind kind() const { return kind_; }
    double N() const { return N_; }
    double K() const { return K_; }
    CurvatureDim curvature_dim() const { return CurvatureDim(K_, N_); }
    double circumference() const { return L_; }
    double curv_radius() const;   // sqrt((N-1)/|K|) for space forms, K != 0
    double r_max() const { return r_max_; }
    void set_r_max(double r) { r_max_ = r; }
    double chart_halfwidth() const { return chart_halfwidth_; }
    void set_chart_halfwidth(double a) { chart_halfwidth_ = a; }
    const Density1D& weight() const { return *weight_; }
    const Interval& interval() const { return interval_; }
    double broken_amp() const { return broken_amp_; }
    double broken_freq() const { return broken_freq_; }

    Point base_point_default() const;
    double distance(const Point& x, const Point& y) const;

    /// Analytic value of the generating function u at a point: d_p, d_v or
    /// the exact Busemann limit of the catalog line.
    double u_value(const BaseDescriptor& base, const Point& x) const;

    /// Closed-form reference measure of a test region (the disintegration
    /// oracle of property (3)); the cylinder ball uses the universal-cover
    /// wrap formula.
    double measure_oracle(const BaseDescriptor& base, const Region& region) const;

    PolarFactorization polar_factorization(const BaseDescriptor& base) const {
        return PolarFactorization(this, base);
    }

    CutLocusDescription cut_locus_description(const Point& p) const;

    /// The Busemann line of the catalog: gamma(t) as a point.
    Point line_point(double t, double offset = 0.0) const;

    std::string describe() const;

private:
    ModelSpace() = default;
    friend class PolarFactorization;

    SpaceKind kind_ = SpaceKind::SpaceForm;
    double N_ = 2.0, K_ = 0.0;
    double L_ = 2.0 * M_PI;
    Interval interval_;
    std::shared_ptr<Density1D> weight_;
    double broken_amp_ = 0.0, broken_freq_ = 1.0;
    double r_max_ = 50.0;
    double chart_halfwidth_ = 8.0;
};

} // namespace needlelab
