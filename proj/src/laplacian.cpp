#include "needlelab/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "needlelab/quadrature.hpp"

namespace needlelab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* lap_variant_name(LapVariant v) {
    switch (v) {
        case LapVariant::General:   return "general";
        case LapVariant::Dp:        return "d_p";
        case LapVariant::DpSquared: return "d_p^2";
        case LapVariant::Dv:        return "d_v";
        case LapVariant::AbsDv:     return "|d_v|";
        case LapVariant::DvSquared: return "d_v^2";
    }
    return "?";
}

DistributionalLaplacian::DistributionalLaplacian(const Disintegration& dis,
                                                 LapVariant variant)
    : dis_(&dis), variant_(variant) {
    const BaseVariant bv = dis.base().variant;
    switch (variant) {
        case LapVariant::General:
            break;
        case LapVariant::Dp:
        case LapVariant::DpSquared:
            if (bv != BaseVariant::PointBase)
                throw std::invalid_argument("d_p Laplacian needs a point base");
            break;
        case LapVariant::Dv:
        case LapVariant::AbsDv:
        case LapVariant::DvSquared:
            if (!dis.base().is_level_set())
                throw std::invalid_argument("d_v Laplacian needs a level-set base");
            break;
    }
    collect_atoms();
}

double DistributionalLaplacian::regular_at(const RayHandle& h) const {
    const TransportRay& r = dis_->rays()[h.ray];
    const double u = r.u_at(h.t);
    if ((variant_ == LapVariant::Dv || variant_ == LapVariant::AbsDv) &&
        std::abs(u) < 1e-12)
        throw std::domain_error("d_v Laplacian evaluated on the zero level set");
    const double phi = r.density.log_deriv(h.t);
    switch (variant_) {
        case LapVariant::General:
        case LapVariant::Dp:
        case LapVariant::Dv:
            return -phi;
        case LapVariant::AbsDv:
            return -(u >= 0.0 ? 1.0 : -1.0) * phi;
        case LapVariant::DpSquared:
        case LapVariant::DvSquared:
            return 2.0 * (1.0 - u * phi);
    }
    return 0.0;
}

void DistributionalLaplacian::collect_atoms() {
    raw_atoms_.clear();
    const auto& rays = dis_->rays();
    for (std::size_t i = 0; i < rays.size(); ++i) {
        const TransportRay& r = rays[i];
        const double ha = r.density.value(0.0);
        const double hb = r.density.value(r.len);
        const double ua = r.u_start, ub = r.u_at(r.len);

        auto push = [&](bool at_a, double mass) {
            RawAtom a;
            a.ray = static_cast<int>(i);
            a.at_initial = at_a;
            a.mass = mass * r.weight;
            a.u = at_a ? r.u_start : r.u_at(r.len);
            a.location = dis_->point_of({static_cast<int>(i), at_a ? 0.0 : r.len});
            raw_atoms_.push_back(a);
        };

        switch (variant_) {
            case LapVariant::General:
                if (r.has_a) push(true, -ha);
                if (r.has_b) push(false, +hb);
                break;
            case LapVariant::Dp:
                // domain X \ {p}: the final point is excluded
                if (r.has_a) push(true, -ha);
                break;
            case LapVariant::DpSquared:
            case LapVariant::DvSquared:
                if (r.has_a) push(true, -2.0 * ha * ua);
                if (r.has_b) push(false, +2.0 * hb * ub);
                break;
            case LapVariant::Dv:
                if (r.has_a && ua > 0.0) push(true, -ha);
                if (r.has_b && ub < 0.0) push(false, +hb);
                break;
            case LapVariant::AbsDv:
                if (r.has_a && ua > 0.0) push(true, -ha);
                if (r.has_b && ub < 0.0) push(false, -hb);
                break;
        }
    }

    // aggregate by location: sort on coordinates, then sweep-merge anything
    // within 1e-9 chart distance
    std::vector<int> order(raw_atoms_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Point& pa = raw_atoms_[a].location;
        const Point& pb = raw_atoms_[b].location;
        for (int k = 0; k < 4; ++k) {
            if (pa.c[k] < pb.c[k]) return true;
            if (pa.c[k] > pb.c[k]) return false;
        }
        return a < b;
    });

    atoms_.clear();
    for (int idx : order) {
        const RawAtom& ra = raw_atoms_[idx];
        bool merged = false;
        // clusters are built in nondecreasing first-coordinate order, so the
        // candidates all live in the trailing 1e-9 window of c[0]
        for (std::size_t k = atoms_.size(); k-- > 0;) {
            if (ra.location.c[0] - atoms_[k].location.c[0] > 1e-9) break;
            if (dis_->space().distance(atoms_[k].location, ra.location) <= 1e-9) {
                atoms_[k].mass += ra.mass;
                merged = true;
                break;
            }
        }
        if (!merged) {
            Atom a;
            a.location = ra.location;
            a.mass = ra.mass;
            a.at_initial = ra.at_initial;
            const TransportRay& r = dis_->rays()[ra.ray];
            a.u = ra.at_initial ? r.u_start : r.u_at(r.len);
            atoms_.push_back(a);
        }
    }
}

double DistributionalLaplacian::singular_mass_in(const Region& window) const {
    NeumaierSum s;
    for (const Atom& a : atoms_)
        if (dis_->region_contains(window, a.location)) s.add(a.mass);
    return s.value();
}

double DistributionalLaplacian::singular_tv_in(const Region& window) const {
    NeumaierSum s;
    for (const RawAtom& a : raw_atoms_)
        if (dis_->region_contains(window, a.location)) s.add(std::abs(a.mass));
    return s.value();
}

DistributionalLaplacian laplacian_general(const Disintegration& dis) {
    const ExtReal rec = dis.ray_length_reciprocal_integral();
    if (rec.is_infinite())
        throw std::domain_error(
            "laplacian_general: int 1/|X_alpha| dq diverges, the ray "
            "decomposition has too many short rays for the representation");
    return DistributionalLaplacian(dis, LapVariant::General);
}

DistributionalLaplacian laplacian_dp(const Disintegration& dis) {
    return DistributionalLaplacian(dis, LapVariant::Dp);
}
DistributionalLaplacian laplacian_dp_squared(const Disintegration& dis) {
    return DistributionalLaplacian(dis, LapVariant::DpSquared);
}
DistributionalLaplacian laplacian_dv(const Disintegration& dis) {
    return DistributionalLaplacian(dis, LapVariant::Dv);
}
DistributionalLaplacian laplacian_abs_dv(const Disintegration& dis) {
    return DistributionalLaplacian(dis, LapVariant::AbsDv);
}
DistributionalLaplacian laplacian_dv_squared(const Disintegration& dis) {
    return DistributionalLaplacian(dis, LapVariant::DvSquared);
}

// ---------------------------------------------------------------------------
// nu measure

NuMeasure::NuMeasure(const Disintegration& dis, CurvatureDim kd)
    : dis_(&dis), kd_(kd) {
    if (kd.K > 0.0) {
        const double lmax = M_PI * std::sqrt((kd.N - 1.0) / kd.K);
        double sup_len = 0.0;
        const TransportRay* witness = nullptr;
        for (const TransportRay& r : dis.rays()) {
            if (std::isfinite(r.full_length) && r.full_length > sup_len) {
                sup_len = r.full_length;
                witness = &r;
            }
        }
        if (witness && std::abs(sup_len - lmax) < 1e-6) {
            case_tag_ = NuCase::KPosSuspension;
            const int ri = static_cast<int>(witness - dis.rays().data());
            poles_ = std::make_pair(dis.point_of({ri, 0.0}),
                                    dis.point_of({ri, witness->len}));
        } else {
            case_tag_ = NuCase::KPosBounded;
        }
    } else {
        case_tag_ = kd.K == 0.0 ? NuCase::KZero : NuCase::KNeg;
    }
}

double NuMeasure::density_at(const RayHandle& h) const {
    const TransportRay& r = dis_->rays()[h.ray];
    const double u = r.u_at(h.t);
    const double kappa = kd_.kappa();
    const double pw = kd_.N - 1.0;
    double ratio;
    if (u >= 0.0) {
        const double db = r.len - h.t;  // distance to the final point
        ratio = r.has_b ? s_ratio(kappa, db) : s_ratio_missing_endpoint(kappa);
    } else {
        const double da = h.t;          // distance to the initial point
        ratio = r.has_a ? s_ratio(kappa, da) : s_ratio_missing_endpoint(kappa);
    }
    return 2.0 * (1.0 + std::abs(u) * pw * ratio);
}

NuMeasure nu_measure(const Disintegration& dis, const CurvatureDim& kd) {
    return NuMeasure(dis, kd);
}

// ---------------------------------------------------------------------------
// Comparison sandwich

CheckReport comparison_check(const DistributionalLaplacian& lap,
                             const CurvatureDim& kd, const ComparisonSpec& spec) {
    const Disintegration& dis = lap.disintegration();
    const double kappa = kd.kappa();
    const double pw = kd.N - 1.0;
    CheckReport rep;
    rep.tolerance = spec.tolerance;
    char gbuf[96];
    std::snprintf(gbuf, sizeof(gbuf), "variant=%s samples=%d stride=%d",
                  lap_variant_name(lap.variant()), spec.samples_per_ray,
                  spec.ray_stride);
    rep.grid_spec = gbuf;

    double worst_upper = kInf, worst_lower = kInf;
    const auto& rays = dis.rays();
    for (std::size_t i = 0; i < rays.size(); i += spec.ray_stride) {
        const TransportRay& r = rays[i];
        const double edge = std::max(spec.edge_frac * r.len, 1e-9);
        for (int k = 0; k < spec.samples_per_ray; ++k) {
            const double t =
                edge + (r.len - 2.0 * edge) * k / (spec.samples_per_ray - 1);
            const double u = r.u_at(t);
            if (lap.variant() == LapVariant::Dp && !(u > 1e-9)) continue;
            if ((lap.variant() == LapVariant::Dv ||
                 lap.variant() == LapVariant::AbsDv) &&
                std::abs(u) < 1e-6 * std::max(1.0, r.len))
                continue;  // d_v bounds live on X minus the zero level

            const double reg = lap.regular_at({static_cast<int>(i), t});
            const double ratio_a =
                r.has_a ? s_ratio(kappa, t) : s_ratio_missing_endpoint(kappa);
            const double ratio_b = r.has_b ? s_ratio(kappa, r.len - t)
                                           : s_ratio_missing_endpoint(kappa);
            double ub, lb;
            switch (lap.variant()) {
                case LapVariant::General:
                case LapVariant::Dp:
                case LapVariant::Dv:
                    ub = pw * ratio_b;
                    lb = -pw * ratio_a;
                    break;
                case LapVariant::AbsDv:
                    ub = pw * (u > 0.0 ? ratio_b : ratio_a);
                    lb = -pw * (u > 0.0 ? ratio_a : ratio_b);
                    break;
                case LapVariant::DpSquared:
                case LapVariant::DvSquared:
                    ub = 2.0 * (1.0 + std::abs(u) * pw * (u >= 0.0 ? ratio_b : ratio_a));
                    lb = 2.0 * (1.0 - std::abs(u) * pw * (u >= 0.0 ? ratio_a : ratio_b));
                    break;
                default:
                    ub = kInf;
                    lb = -kInf;
            }
            const double mu = relative_margin(ub, reg);
            const double ml = relative_margin(reg, lb);
            worst_upper = std::min(worst_upper, mu);
            worst_lower = std::min(worst_lower, ml);
            rep.record(mu, {static_cast<double>(i), t, u}, "upper");
            rep.record(ml, {static_cast<double>(i), t, u}, "lower");
        }
    }

    // atom sign structure: nonpositive everywhere except the final-point
    // atoms of d_v (which sit on the upper-bound side)
    for (const auto& a : lap.raw_atoms()) {
        double m;
        if (lap.variant() == LapVariant::Dv && !a.at_initial)
            m = a.mass;   // must be >= 0
        else if (lap.variant() == LapVariant::General && !a.at_initial)
            m = a.mass;   // +h(b) delta_b, nonnegative by construction
        else
            m = -a.mass;  // must be <= 0
        rep.record(m >= 0.0 ? 0.0 : relative_margin(m, 0.0),
                   {static_cast<double>(a.ray)}, "atom sign");
    }

    char dbuf[128];
    std::snprintf(dbuf, sizeof(dbuf), "worst_upper=%.6g worst_lower=%.6g",
                  worst_upper, worst_lower);
    rep.detail = dbuf;
    rep.finalize();
    return rep;
}

// ---------------------------------------------------------------------------
// Pairings and integration by parts

std::string TestBump::describe() const {
    char buf[120];
    if (kind == OfU)
        std::snprintf(buf, sizeof(buf), "bump_u c=%.6g w=%.6g", center, width);
    else
        std::snprintf(buf, sizeof(buf), "bump_cut w=%.6g zw=%.6g", width, z_width);
    return buf;
}

namespace {

double bump_value(const TestBump& f, const Disintegration& dis,
                  const RayHandle& h) {
    if (f.kind == TestBump::OfU)
        return f.eval_s((dis.u_of(h) - f.center) / f.width);
    const Point pt = dis.point_of(h);
    const double L = dis.space().circumference();
    double dtheta = std::fmod(pt.c[0] - 0.5 * L + 1.5 * L, L) - 0.5 * L;
    return f.eval_s(dtheta / f.width) * f.eval_s(pt.c[1] / f.z_width);
}

double bump_value_at_point(const TestBump& f, const Disintegration& dis,
                           const Point& pt, double u) {
    if (f.kind == TestBump::OfU) return f.eval_s((u - f.center) / f.width);
    const double L = dis.space().circumference();
    double dtheta = std::fmod(pt.c[0] - 0.5 * L + 1.5 * L, L) - 0.5 * L;
    return f.eval_s(dtheta / f.width) * f.eval_s(pt.c[1] / f.z_width);
}

// derivative of f along the flow (d/dt of f(gamma(t)))
double bump_flow_deriv(const TestBump& f, const Disintegration& dis,
                       const RayHandle& h, double fd_step) {
    if (f.kind == TestBump::OfU) {
        // u(t) = u_start - t
        return -f.eval_s_deriv((dis.u_of(h) - f.center) / f.width) / f.width;
    }
    const TransportRay& r = dis.rays()[h.ray];
    if (dis.space().kind() == SpaceKind::FlatCylinder &&
        dis.base().variant == BaseVariant::PointBase) {
        // chart velocity of the ray is (-sin, -cos) of the direction angle
        const Point pt = dis.point_of(h);
        const double L = dis.space().circumference();
        const double dtheta =
            std::fmod(pt.c[0] - 0.5 * L + 1.5 * L, L) - 0.5 * L;
        const double b1 = f.eval_s(dtheta / f.width);
        const double b2 = f.eval_s(pt.c[1] / f.z_width);
        const double db1 = f.eval_s_deriv(dtheta / f.width) / f.width;
        const double db2 = f.eval_s_deriv(pt.c[1] / f.z_width) / f.z_width;
        return -std::sin(r.alpha[0]) * db1 * b2 - std::cos(r.alpha[0]) * b1 * db2;
    }
    const double lo = std::max(0.0, h.t - fd_step);
    const double hi = std::min(r.len, h.t + fd_step);
    const double flo = bump_value(f, dis, {h.ray, lo});
    const double fhi = bump_value(f, dis, {h.ray, hi});
    return (fhi - flo) / (hi - lo);
}

void check_support(const DistributionalLaplacian& lap, const TestBump& f,
                   const Region& window) {
    const Disintegration& dis = lap.disintegration();
    const auto& rays = dis.rays();
    for (std::size_t i = 0; i < rays.size(); i += 64) {
        auto seg = dis.region_param_interval(static_cast<int>(i), window);
        const TransportRay& r = rays[i];
        auto leak = [&](double t) {
            return std::abs(bump_value(f, dis, {static_cast<int>(i), t})) > 1e-12;
        };
        if (!seg) {
            if (leak(0.5 * r.len))
                throw std::invalid_argument("test function support leaks outside window");
            continue;
        }
        if (seg->first > 1e-9 && leak(seg->first))
            throw std::invalid_argument("test function support leaks outside window");
        if (seg->second < r.len - 1e-9 && leak(seg->second))
            throw std::invalid_argument("test function support leaks outside window");
    }
}

} // namespace

double pairing(const DistributionalLaplacian& lap, const TestBump& f,
               const Region& window, const PairingSpec& spec) {
    const Disintegration& dis = lap.disintegration();
    check_support(lap, f, window);
    NeumaierSum acc;
    const auto& rays = dis.rays();
    for (std::size_t i = 0; i < rays.size(); i += spec.ray_stride) {
        const TransportRay& r = rays[i];
        const double pad = 1e-7 * r.len;
        const double w = r.weight * spec.ray_stride;
        acc.add(w * simpson(
                        [&](double t) {
                            const double tc =
                                std::min(std::max(t, pad), r.len - pad);
                            const RayHandle h{static_cast<int>(i), tc};
                            const double fv = bump_value(f, dis, h);
                            if (fv == 0.0) return 0.0;
                            return fv * lap.regular_at(h) * r.density.value(tc);
                        },
                        0.0, r.len, spec.panels_per_ray));
    }
    for (const auto& a : lap.raw_atoms()) {
        if (spec.ray_stride > 1 && a.ray % spec.ray_stride != 0) continue;
        const double fv = bump_value_at_point(f, dis, a.location, a.u);
        if (fv != 0.0) acc.add(spec.ray_stride * fv * a.mass);
    }
    return acc.value();
}

double pairing_nu(const NuMeasure& nu, const Disintegration& dis,
                  const TestBump& f, const Region& window,
                  const PairingSpec& spec) {
    (void)window;
    NeumaierSum acc;
    const auto& rays = dis.rays();
    for (std::size_t i = 0; i < rays.size(); i += spec.ray_stride) {
        const TransportRay& r = rays[i];
        const double pad = std::max(1e-7 * r.len, 1e-9);
        const double w = r.weight * spec.ray_stride;
        acc.add(w * simpson(
                        [&](double t) {
                            const double tc =
                                std::min(std::max(t, pad), r.len - pad);
                            const RayHandle h{static_cast<int>(i), tc};
                            const double fv = bump_value(f, dis, h);
                            if (fv == 0.0) return 0.0;
                            return fv * nu.density_at(h) * r.density.value(tc);
                        },
                        0.0, r.len, spec.panels_per_ray));
    }
    return acc.value();
}

double ibp_residual(const DistributionalLaplacian& lap, const Disintegration& dis,
                    const TestBump& f, const Region& window,
                    const PairingSpec& spec) {
    const double lhs = pairing(lap, f, window, spec);
    NeumaierSum acc;
    const auto& rays = dis.rays();
    for (std::size_t i = 0; i < rays.size(); i += spec.ray_stride) {
        const TransportRay& r = rays[i];
        const double fd_step = r.len / spec.panels_per_ray;
        const double w = r.weight * spec.ray_stride;
        acc.add(w * simpson(
                        [&](double t) {
                            const RayHandle h{static_cast<int>(i), t};
                            double fp = bump_flow_deriv(f, dis, h, fd_step);
                            if (fp == 0.0) return 0.0;
                            switch (lap.variant()) {
                                case LapVariant::AbsDv:
                                    fp *= (r.u_at(t) >= 0.0 ? 1.0 : -1.0);
                                    break;
                                case LapVariant::DpSquared:
                                case LapVariant::DvSquared:
                                    fp *= 2.0 * r.u_at(t);
                                    break;
                                default:
                                    break;
                            }
                            return fp * r.density.value(
                                            std::min(std::max(t, 1e-9 * r.len),
                                                     (1.0 - 1e-9) * r.len));
                        },
                        0.0, r.len, spec.panels_per_ray));
    }
    return std::abs(lhs - acc.value());
}

// ---------------------------------------------------------------------------
// Endpoint vanishing

EndpointVanishing endpoint_vanishing_check(const Disintegration& dis, double s,
                                           double r0, int levels,
                                           double tolerance) {
    if (dis.base().variant != BaseVariant::PointBase)
        throw std::invalid_argument("endpoint_vanishing_check: point base required");
    EndpointVanishing out;
    std::vector<double> ratios;
    for (int k = 0; k < levels; ++k) {
        const double r = r0 * std::pow(2.0, -k);
        NeumaierSum acc;
        for (std::size_t i = 0; i < dis.rays().size(); ++i) {
            auto seg = dis.region_param_interval(static_cast<int>(i), Region::ball(r));
            if (!seg) continue;
            const TransportRay& ray = dis.rays()[i];
            acc.add(ray.weight *
                    simpson([&](double t) { return ray.density.value(t); },
                            seg->first, seg->second, 64));
        }
        ratios.push_back(acc.value() / std::pow(r, s));
    }
    const double mn = *std::min_element(ratios.begin(), ratios.end());
    out.ratio_estimate = ratios.back();
    out.hypothesis_holds = ratios.back() <= 1.5 * mn + 1e-12;

    double maxh = 0.0;
    for (const TransportRay& r : dis.rays())
        if (r.has_b) maxh = std::max(maxh, r.density.value(r.len));
    out.max_h_at_base = maxh;
    out.verdict =
        out.hypothesis_holds && maxh <= tolerance * dis.polar().chart_scale();
    return out;
}

} // namespace needlelab
