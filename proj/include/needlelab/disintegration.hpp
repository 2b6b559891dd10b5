#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "needlelab/ext_real.hpp"
#include "needlelab/model_space.hpp"

namespace needlelab {

/// A point on a ray: ray index plus the unit-speed parameter t (t = 0 at the
/// start of the ray, where u is maximal).
struct RayHandle {
    int ray = 0;
    double t = 0.0;
};

/// Oriented transport ray with its conditional density: u(gamma(t)) =
/// u_start - t on [0, len]; the initial point a(X_alpha) sits at t = 0 when
/// it exists, the final point b(X_alpha) at t = len.
struct TransportRay {
    double alpha[2] = {0.0, 0.0};
    double cell_lo[2] = {0.0, 0.0};
    double cell_hi[2] = {0.0, 0.0};
    double weight = 1.0;     // q-measure of the chart cell
    double len = 0.0;        // parameter length of the (possibly clipped) ray
    double u_start = 0.0;    // u at t = 0
    double full_length = 0.0;  // d(a,b) of the untruncated ray (may be +inf)
    bool has_a = false;      // t = 0 is the true initial point
    bool has_b = false;      // t = len is the true final point
    Density1D density;       // h_alpha in the ray parameter, on (0, len)

    double u_at(double t) const { return u_start - t; }

    TransportRay() : density(Density1D::constant(Interval(0.0, 1.0), 1.0)) {}
};

struct ResolutionSpec {
    int n_rays = 4096;       // 1-D direction charts
    int n_phi = 96;          // 2-D chart (flat 3-space)
    int n_cos = 64;
    bool sampled_grid = false;  // sample h onto a grid instead of closed form
    int grid_nodes = 512;
    std::string describe() const;
};

/// Transport-ray decomposition of a model space induced by d_p, d_v or the
/// Busemann function of a catalog line, with conditional densities h_alpha
/// and the uniform-chart quotient measure q (q(Q) = 1).
class Disintegration {
public:
    Disintegration(ModelSpace space, BaseDescriptor base,
                   Region window = Region::all(), ResolutionSpec res = {});

    const ModelSpace& space() const { return *space_; }
    const BaseDescriptor& base() const { return base_; }
    const PolarFactorization& polar() const { return polar_; }
    const std::vector<TransportRay>& rays() const { return rays_; }
    const ResolutionSpec& resolution() const { return res_; }
    /// q-mass of rays dropped because their initial segment is not
    /// representable (endless or truncated rays).
    double truncated_q_mass() const { return truncated_q_mass_; }

    double u_of(const RayHandle& h) const { return rays_[h.ray].u_at(h.t); }
    Point point_of(const RayHandle& h) const;

    /// Translation along the ray: u(g_t(x)) = u(x) - t, exact in ray
    /// coordinates; throws when the flow exits the ray domain.
    RayHandle flow_g(const RayHandle& x, double t) const;

    /// Fractional contraction toward the base point: d_p(T_f(x)) =
    /// (1 - f) d_p(x); point bases only, f in [0,1].
    RayHandle transport_map_T(const RayHandle& x, double f) const;

    /// Max over test sets of |int_Q m_alpha(B) dq - m(B)| / m(B) against the
    /// closed-form oracle measure.
    double verify_mass(const std::vector<Region>& test_sets) const;

    /// int_Q 1/d(a(X_alpha), b(X_alpha)) dq; +infinity marker when a
    /// refining quadrature diverges (rays shrinking too fast).
    ExtReal ray_length_reciprocal_integral() const;

    /// Parameter sub-interval of ray `ray` lying inside the region
    /// (empty -> nullopt); boundaries located by bisection on membership.
    std::optional<std::pair<double, double>> region_param_interval(
        int ray, const Region& region) const;
    bool region_contains(const Region& region, const Point& pt) const;

    /// Columnar export: alpha0 alpha1 q_weight t u h  (one row per sample).
    void export_columns(const std::string& path, int samples_per_ray = 32) const;

    /// Build a synthetic disintegration from explicit rays (test harnesses
    /// and engineered counterexamples).
    static Disintegration synthetic(ModelSpace space, BaseDescriptor base,
                                    std::vector<TransportRay> rays);

private:
    std::shared_ptr<const ModelSpace> space_;
    BaseDescriptor base_;
    PolarFactorization polar_;
    Region window_;
    ResolutionSpec res_;
    std::vector<TransportRay> rays_;
    double truncated_q_mass_ = 0.0;

    void build();
    void build_ray(const double* alpha, const double* cell_lo,
                   const double* cell_hi, double weight);
};

} // namespace needlelab
