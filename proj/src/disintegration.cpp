#include "needlelab/disintegration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "needlelab/quadrature.hpp"

namespace needlelab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string ResolutionSpec::describe() const {
    char buf[120];
    std::snprintf(buf, sizeof(buf), "rays=%d phi=%d cos=%d mode=%s nodes=%d", n_rays,
                  n_phi, n_cos, sampled_grid ? "grid" : "closed_form", grid_nodes);
    return buf;
}

Disintegration::Disintegration(ModelSpace space, BaseDescriptor base, Region window,
                               ResolutionSpec res)
    : space_(std::make_shared<const ModelSpace>(std::move(space))),
      base_(base),
      polar_(space_.get(), base),
      window_(window),
      res_(res) {
    build();
    if (rays_.empty()) throw std::invalid_argument("disintegrate: empty window");
}

Disintegration Disintegration::synthetic(ModelSpace space, BaseDescriptor base,
                                         std::vector<TransportRay> rays) {
    Disintegration d(std::move(space), base);
    d.rays_ = std::move(rays);
    return d;
}

void Disintegration::build() {
    const Chart& ch = polar_.chart();
    rays_.clear();
    truncated_q_mass_ = 0.0;

    if (ch.dim == 0) {
        for (int i = 0; i < ch.natoms; ++i) {
            double alpha[2] = {static_cast<double>(i), 0.0};
            double lo[2] = {alpha[0], 0.0}, hi[2] = {alpha[0], 0.0};
            build_ray(alpha, lo, hi, 1.0 / ch.natoms);
        }
        return;
    }
    if (ch.dim == 1) {
        const int n = res_.n_rays;
        const double step = (ch.hi0 - ch.lo0) / n;
        for (int i = 0; i < n; ++i) {
            double alpha[2] = {ch.lo0 + (i + 0.5) * step, 0.0};
            double lo[2] = {ch.lo0 + i * step, 0.0};
            double hi[2] = {ch.lo0 + (i + 1) * step, 0.0};
            build_ray(alpha, lo, hi, 1.0 / n);
        }
        return;
    }
    // 2-D chart: uniform product grid, weights exact cell fractions
    const int np = res_.n_phi, nc = res_.n_cos;
    const double sp = (ch.hi0 - ch.lo0) / np, sc = (ch.hi1 - ch.lo1) / nc;
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < nc; ++j) {
            double alpha[2] = {ch.lo0 + (i + 0.5) * sp, ch.lo1 + (j + 0.5) * sc};
            double lo[2] = {ch.lo0 + i * sp, ch.lo1 + j * sc};
            double hi[2] = {ch.lo0 + (i + 1) * sp, ch.lo1 + (j + 1) * sc};
            build_ray(alpha, lo, hi, 1.0 / (np * nc));
        }
    }
}

void Disintegration::build_ray(const double* alpha, const double* cell_lo,
                               const double* cell_hi, double weight) {
    const double u_hi_raw = polar_.u_hi(alpha);
    const double u_lo_raw = polar_.u_lo(alpha);
    const double clip = space_->r_max();

    double u_top = std::min(u_hi_raw, clip);
    double u_bot = std::max(u_lo_raw, -clip);
    if (base_.variant == BaseVariant::PointBase) u_bot = std::max(u_bot, 0.0);

    // optional construction-time window clip (parameter-interval hull)
    if (window_.kind == Region::BallK && base_.variant == BaseVariant::PointBase) {
        u_top = std::min(u_top, window_.r1);
    } else if (window_.kind == Region::BandK && base_.is_level_set()) {
        u_top = std::min(u_top, window_.r1);
        u_bot = std::max(u_bot, -window_.r1);
    } else if (window_.kind == Region::BandK && base_.variant == BaseVariant::Line) {
        u_top = std::min(u_top, window_.r1);
        u_bot = std::max(u_bot, -window_.r1);
    }

    if (!(u_top - u_bot > 1e-12)) {
        truncated_q_mass_ += weight;
        return;
    }

    TransportRay ray;
    ray.alpha[0] = alpha[0];
    ray.alpha[1] = alpha[1];
    ray.cell_lo[0] = cell_lo[0];
    ray.cell_lo[1] = cell_lo[1];
    ray.cell_hi[0] = cell_hi[0];
    ray.cell_hi[1] = cell_hi[1];
    ray.weight = weight;
    ray.u_start = u_top;
    ray.len = u_top - u_bot;
    ray.full_length = u_hi_raw - u_lo_raw;
    ray.has_a = std::isfinite(u_hi_raw) && u_hi_raw <= u_top + 1e-12;
    ray.has_b = (std::isfinite(u_lo_raw) && u_lo_raw >= u_bot - 1e-12);

    const Interval dom(0.0, ray.len);
    const double scale = polar_.chart_scale();

    if (res_.sampled_grid) {
        const int n = res_.grid_nodes;
        std::vector<double> vals(n + 1);
        const double step = ray.len / n;
        for (int i = 0; i <= n; ++i) {
            double u = ray.u_start - i * step;
            // keep samples strictly inside where the Jacobian vanishes
            u = std::min(std::max(u, u_bot + 0.25 * step), u_top - 0.25 * step);
            vals[i] = polar_.jacobian(alpha, u);
        }
        ray.density = Density1D::from_grid(dom, vals);
        rays_.push_back(std::move(ray));
        return;
    }

    switch (base_.variant) {
        case BaseVariant::PointBase:
            switch (space_->kind()) {
                case SpaceKind::SpaceForm:
                    ray.density = Density1D::s_kappa_pow(
                        dom, scale, space_->K() / (space_->N() - 1.0),
                        space_->N() - 1.0, ray.u_start, -1.0);
                    break;
                case SpaceKind::FlatCylinder:
                    ray.density = Density1D::power(dom, scale, 1.0, ray.u_start, -1.0);
                    break;
                case SpaceKind::WeightedInterval: {
                    const double p0 = base_.point.c[0];
                    const bool right = polar_.chart().natoms == 1 || alpha[0] < 0.5;
                    // x(t) = p0 + sgn*(u_start - t)
                    ray.density =
                        space_->weight()
                            .precompose_affine(right ? -1.0 : 1.0,
                                               right ? p0 + ray.u_start
                                                     : p0 - ray.u_start,
                                               dom)
                            .scaled(scale);
                    break;
                }
                case SpaceKind::WeightedHalfLine:
                    ray.density = space_->weight()
                                      .precompose_affine(-1.0, ray.u_start, dom)
                                      .scaled(scale);
                    break;
                default:
                    throw std::invalid_argument("unsupported base");
            }
            break;
        case BaseVariant::Hyperplane:
        case BaseVariant::Generator:
            ray.density = Density1D::constant(dom, scale);
            break;
        case BaseVariant::Equator: {
            const double R = space_->curv_radius();
            // cos(u/R) with u = u_start - t
            ray.density = Density1D::sin_pow(dom, scale, 1.0 / R, 1.0,
                                             (ray.u_start - 0.5 * M_PI * R) * 1.0);
            break;
        }
        case BaseVariant::LevelPoint:
            ray.density = space_->weight()
                              .precompose_affine(-1.0, base_.level + ray.u_start, dom)
                              .scaled(scale);
            break;
        case BaseVariant::Line:
            if (space_->kind() == SpaceKind::ProductLine) {
                const double w = space_->weight().value(alpha[0]);
                if (space_->broken_amp() != 0.0) {
                    const int n = res_.grid_nodes;
                    std::vector<double> vals(n + 1);
                    for (int i = 0; i <= n; ++i) {
                        const double t = ray.len * i / n;
                        const double z = -(ray.u_start - t);
                        vals[i] = scale * w *
                                  (1.0 + space_->broken_amp() *
                                             std::sin(space_->broken_freq() * z));
                    }
                    ray.density = Density1D::from_grid(dom, vals);
                } else {
                    ray.density = Density1D::constant(dom, scale * w);
                }
            } else {
                ray.density = Density1D::constant(dom, scale);
            }
            break;
    }
    rays_.push_back(std::move(ray));
}

Point Disintegration::point_of(const RayHandle& h) const {
    const TransportRay& r = rays_[h.ray];
    return polar_.point_at(r.alpha, r.u_at(h.t));
}

RayHandle Disintegration::flow_g(const RayHandle& x, double t) const {
    const TransportRay& r = rays_[x.ray];
    const double t2 = x.t + t;
    if (t2 < -1e-12 || t2 > r.len + 1e-12)
        throw std::domain_error("ray exhausted: flow exits ray domain");
    return {x.ray, std::min(std::max(t2, 0.0), r.len)};
}

RayHandle Disintegration::transport_map_T(const RayHandle& x, double f) const {
    if (base_.variant != BaseVariant::PointBase)
        throw std::invalid_argument("transport_map_T: point base required");
    if (f < 0.0 || f > 1.0)
        throw std::invalid_argument("transport_map_T: fraction outside [0,1]");
    const TransportRay& r = rays_[x.ray];
    const double u = r.u_at(x.t);
    return {x.ray, r.u_start - (1.0 - f) * u};
}

bool Disintegration::region_contains(const Region& region, const Point& pt) const {
    switch (region.kind) {
        case Region::AllK:
            return true;
        case Region::BallK: {
            const double d = space_->distance(base_.point, pt);
            return d <= region.r1;
        }
        case Region::AnnulusK: {
            const double d = space_->distance(base_.point, pt);
            return d >= region.r0 && d <= region.r1;
        }
        case Region::BandK:
            if (base_.variant == BaseVariant::PointBase)
                return std::abs(pt.c[1]) <= region.r1;  // cylinder band |z| <= c
            return std::abs(space_->u_value(base_, pt)) <= region.r1;
    }
    return false;
}

std::optional<std::pair<double, double>> Disintegration::region_param_interval(
    int ray, const Region& region) const {
    const TransportRay& r = rays_[ray];
    auto clamp_interval = [&](double lo, double hi)
        -> std::optional<std::pair<double, double>> {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, r.len);
        if (!(hi > lo)) return std::nullopt;
        return std::make_pair(lo, hi);
    };

    switch (region.kind) {
        case Region::AllK:
            return clamp_interval(0.0, r.len);
        case Region::BallK:
        case Region::AnnulusK: {
            if (base_.variant != BaseVariant::PointBase)
                throw std::invalid_argument("ball regions need a point base");
            const double lo_u = region.kind == Region::AnnulusK ? region.r0 : 0.0;
            // u(t) = u_start - t decreases; u in [lo_u, r1]
            return clamp_interval(r.u_start - region.r1, r.u_start - lo_u);
        }
        case Region::BandK: {
            if (base_.variant != BaseVariant::PointBase) {
                // |u| <= c
                return clamp_interval(r.u_start - region.r1, r.u_start + region.r1);
            }
            if (space_->kind() == SpaceKind::FlatCylinder) {
                // z(t) = p_z + (u_start - t) cos(theta_bar), linear in t
                const double pz = base_.point.c[1];
                const double cz = std::cos(r.alpha[0]);
                if (std::abs(cz) < 1e-14)
                    return std::abs(pz) <= region.r1 ? clamp_interval(0.0, r.len)
                                                     : std::nullopt;
                double t1 = r.u_start - (region.r1 - pz) / cz;
                double t2 = r.u_start - (-region.r1 - pz) / cz;
                if (t1 > t2) std::swap(t1, t2);
                return clamp_interval(t1, t2);
            }
            throw std::invalid_argument("band region unsupported for this base");
        }
    }
    return std::nullopt;
}

double Disintegration::verify_mass(const std::vector<Region>& test_sets) const {
    double worst = 0.0;
    for (const Region& region : test_sets) {
        const double oracle = space_->measure_oracle(base_, region);
        NeumaierSum acc;
        for (std::size_t i = 0; i < rays_.size(); ++i) {
            auto seg = region_param_interval(static_cast<int>(i), region);
            if (!seg) continue;
            const TransportRay& r = rays_[i];
            const int n = panels_for(seg->second - seg->first, 256, 32);
            acc.add(r.weight *
                    simpson([&](double t) { return r.density.value(t); }, seg->first,
                            seg->second, n));
        }
        const double engine = acc.value();
        const double err = oracle > 0.0 ? std::abs(engine - oracle) / oracle
                                        : std::abs(engine);
        worst = std::max(worst, err);
    }
    return worst;
}

ExtReal Disintegration::ray_length_reciprocal_integral() const {
    // T(delta) = integral of 1/length over {length > delta}; the quadrature
    // refines by halving delta, and a positive-q family of vanishing lengths
    // shows up as increments that refuse to decay.
    auto tail = [&](double delta) {
        NeumaierSum s;
        for (const TransportRay& r : rays_) {
            if (std::isfinite(r.full_length) && r.full_length > delta)
                s.add(r.weight / r.full_length);
        }
        return s.value();
    };
    double max_len = 0.0, min_len = kInf;
    for (const TransportRay& r : rays_) {
        if (!std::isfinite(r.full_length)) continue;
        max_len = std::max(max_len, r.full_length);
        min_len = std::min(min_len, r.full_length);
    }
    if (!(max_len > 0.0)) return ExtReal(0.0);

    const double total = tail(0.0);
    double prev_inc = -1.0;
    double delta = 0.5 * max_len;
    for (int level = 0; level < 48 && delta > 0.25 * min_len; ++level, delta *= 0.5) {
        const double inc = tail(0.5 * delta) - tail(delta);
        if (prev_inc >= 0.0 && inc > std::max(1e-6, 0.005 * total) &&
            inc >= 0.75 * prev_inc)
            return ExtReal::infinity();
        prev_inc = inc;
    }
    return ExtReal(total);
}

void Disintegration::export_columns(const std::string& path,
                                    int samples_per_ray) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open export file: " + path);
    out << "# columns: alpha0 alpha1 q_weight t u h_alpha endpoint_a endpoint_b\n";
    char buf[256];
    for (const TransportRay& r : rays_) {
        for (int k = 0; k <= samples_per_ray; ++k) {
            const double t = r.len * k / samples_per_ray;
            const double tc = std::min(std::max(t, 1e-9 * r.len), (1.0 - 1e-9) * r.len);
            std::snprintf(buf, sizeof(buf),
                          "%.17g %.17g %.17g %.17g %.17g %.17g %d %d\n", r.alpha[0],
                          r.alpha[1], r.weight, t, r.u_at(t), r.density.value(tc),
                          r.has_a ? 1 : 0, r.has_b ? 1 : 0);
            out << buf;
        }
    }
}

} // namespace needlelab
