#include "needlelab/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "needlelab/quadrature.hpp"

namespace needlelab {

namespace {

void validate_line(const ModelSpace& space, double offset) {
    // isometric immersion checked on samples
    const double ts[] = {-40.0, -7.5, 0.0, 3.25, 18.0, 60.0};
    for (double s : ts) {
        for (double t : ts) {
            const double d =
                space.distance(space.line_point(s, offset), space.line_point(t, offset));
            if (std::abs(d - std::abs(t - s)) > 1e-9)
                throw std::invalid_argument("line validation failure: not isometric");
        }
    }
}

} // namespace

BusemannValue busemann(const ModelSpace& space, const Point& x, double T,
                       double line_offset) {
    validate_line(space, line_offset);
    const double sgn = T >= 0.0 ? 1.0 : -1.0;
    const double aT = std::abs(T);
    BusemannValue out;
    out.T = aT;
    out.value = space.distance(x, space.line_point(sgn * aT, line_offset)) - aT;
    const double half =
        space.distance(x, space.line_point(sgn * 0.5 * aT, line_offset)) - 0.5 * aT;
    out.cauchy_gap = std::abs(out.value - half);
    out.converged = false;
    return out;
}

BusemannValue busemann_certified(const ModelSpace& space, const Point& x,
                                 bool forward, double line_offset, double T0,
                                 double gap_tol, double T_cap) {
    BusemannValue v;
    for (double T = T0; T <= T_cap; T *= 2.0) {
        v = busemann(space, x, forward ? T : -T, line_offset);
        if (v.cauchy_gap < gap_tol) {
            v.converged = true;
            return v;
        }
    }
    return v;  // non-convergent within the cap; caller sees the last gap
}

CheckReport check_b_zero(const ModelSpace& space, const std::vector<Point>& samples,
                         double tolerance, double line_offset) {
    CheckReport rep;
    rep.tolerance = 0.0;
    rep.grid_spec = "certified doubling truncation";
    double worst_abs = 0.0, worst_gap = 0.0;
    for (const Point& x : samples) {
        const BusemannValue bp = busemann_certified(space, x, true, line_offset);
        const BusemannValue bm = busemann_certified(space, x, false, line_offset);
        const double b = bp.value + bm.value;
        worst_abs = std::max(worst_abs, std::abs(b));
        worst_gap = std::max(worst_gap, std::max(bp.cauchy_gap, bm.cauchy_gap));
        rep.record((tolerance - std::abs(b)) / tolerance, {x.c[0], x.c[1], b});
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max|b| = %.6g cauchy_gap <= %.6g tol=%.3g",
                  worst_abs, worst_gap, tolerance);
    rep.detail = buf;
    rep.finalize();
    return rep;
}

CheckReport check_constant_ray_densities(const Disintegration& dis,
                                         double tolerance) {
    if (dis.base().variant != BaseVariant::Line)
        throw std::invalid_argument("check_constant_ray_densities: Busemann base required");
    CheckReport rep;
    rep.tolerance = 0.0;
    rep.grid_spec = "per-ray spread + rigidity window";

    for (std::size_t i = 0; i < dis.rays().size(); ++i) {
        const TransportRay& r = dis.rays()[i];
        if (r.has_a || r.has_b) {
            rep.record(-1.0, {r.alpha[0]}, "half-infinite ray: splitting hypothesis fails");
            continue;
        }
        const int n = 32;
        double mx = 0.0, mn = std::numeric_limits<double>::infinity(), mean = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double v = r.density.value(r.len * k / n);
            mx = std::max(mx, v);
            mn = std::min(mn, v);
            mean += v / (n + 1);
        }
        const double spread = (mx - mn) / mean;
        rep.record((tolerance - spread) / tolerance, {r.alpha[0], spread}, "spread");

        // flat rigidity window: the MCP(0,N) forced ratio interval for the
        // centered window [-R, R] must contain the observed ratio
        const double R = 0.5 * r.len;
        const double x0 = -0.25 * r.len, x1 = 0.25 * r.len;
        const RigidityWindow w = rigidity_window(R, dis.space().N(), x0, x1);
        const double obs =
            r.density.value(0.75 * r.len) / r.density.value(0.25 * r.len);
        rep.record(relative_margin(w.forced_upper, obs), {r.alpha[0], obs}, "rigidity upper");
        rep.record(relative_margin(obs, w.forced_lower), {r.alpha[0], obs}, "rigidity lower");
    }
    rep.finalize();
    return rep;
}

FactorizationResult factorize(const Disintegration& dis, int n_alpha, int n_u,
                              double tolerance) {
    if (dis.base().variant != BaseVariant::Line)
        throw std::invalid_argument("factorize: Busemann base required");
    if (n_alpha < 2 || n_u < 2)
        throw std::invalid_argument("factorize: rectangle family degenerate");

    const ModelSpace& sp = dis.space();
    const Chart& ch = dis.polar().chart();
    FactorizationResult out;
    out.report.tolerance = 0.0;
    char gbuf[80];
    std::snprintf(gbuf, sizeof(gbuf), "%dx%d rectangles", n_alpha, n_u);
    out.report.grid_spec = gbuf;

    // common b+ window across rays
    double W = std::numeric_limits<double>::infinity();
    for (const TransportRay& r : dis.rays()) {
        W = std::min(W, r.u_start);
        W = std::min(W, r.len - r.u_start);
    }
    W *= 0.9;

    // per-ray constants c_alpha = window mean of h
    std::vector<double> c_alpha(dis.rays().size());
    for (std::size_t i = 0; i < dis.rays().size(); ++i) {
        const TransportRay& r = dis.rays()[i];
        const double t0 = r.u_start - W, t1 = r.u_start + W;
        c_alpha[i] = simpson([&](double t) { return r.density.value(t); }, t0, t1,
                             256) /
                     (t1 - t0);
        out.rows.push_back({r.alpha[0], 0.0, c_alpha[i] / dis.polar().chart_scale()});
    }

    // oracle measure of Phi^{-1}(C x I) for the catalog lines
    auto oracle_box = [&](double a0, double a1, double ulen) -> double {
        switch (sp.kind()) {
            case SpaceKind::SpaceForm:
            case SpaceKind::FlatCylinder:
                return (a1 - a0) * ulen;
            case SpaceKind::ProductLine: {
                const double wmass =
                    simpson([&](double a) { return sp.weight().value(a); }, a0, a1,
                            512);
                return wmass * ulen;  // valid for the unbroken product
            }
            default:
                throw std::invalid_argument("factorize: unsupported space");
        }
    };

    const double da = (ch.hi0 - ch.lo0) / n_alpha;
    const double du = 2.0 * W / n_u;
    double worst = 0.0;
    for (int i = 0; i < n_alpha; ++i) {
        const double a0 = ch.lo0 + i * da, a1 = a0 + da;
        for (int j = 0; j < n_u; ++j) {
            const double u0 = -W + j * du, u1 = u0 + du;
            // q'(C)|I| with exact partial-cell clipping on the alpha grid
            NeumaierSum q;
            for (std::size_t k = 0; k < dis.rays().size(); ++k) {
                const TransportRay& r = dis.rays()[k];
                const double lo = std::max(a0, r.cell_lo[0]);
                const double hi = std::min(a1, r.cell_hi[0]);
                if (hi <= lo) continue;
                const double frac = (hi - lo) / (r.cell_hi[0] - r.cell_lo[0]);
                q.add(frac * r.weight * c_alpha[k] * (u1 - u0));
            }
            const double oracle = oracle_box(a0, a1, u1 - u0);
            const double resid = std::abs(q.value() - oracle) / std::abs(oracle);
            worst = std::max(worst, resid);
            out.report.record((tolerance - resid) / tolerance, {a0, u0, resid});
        }
    }
    out.worst_residual = worst;

    // injectivity of Phi on a sample grid: chart coordinates are distinct
    out.injective_on_samples = true;
    {
        std::vector<std::pair<double, double>> keys;
        const std::size_t stride = std::max<std::size_t>(1, dis.rays().size() / 64);
        for (std::size_t k = 0; k < dis.rays().size(); k += stride) {
            const TransportRay& r = dis.rays()[k];
            for (int t = 0; t < 8; ++t)
                keys.emplace_back(r.alpha[0], r.u_start - r.len * (t + 0.5) / 8.0);
        }
        std::sort(keys.begin(), keys.end());
        for (std::size_t k = 1; k < keys.size(); ++k)
            if (keys[k] == keys[k - 1]) out.injective_on_samples = false;
    }

    // sample continuity of Phi^{-1}: rays converge uniformly on the window as
    // their chart indices converge (perturbation family of size 16)
    out.continuous_on_samples = true;
    {
        const std::size_t mid = dis.rays().size() / 2;
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 4; k >= 0; --k) {
            const std::size_t nb = std::min(mid + (std::size_t{1} << k),
                                            dis.rays().size() - 1);
            double sup = 0.0;
            for (int t = 0; t <= 16; ++t) {
                const double u = -W + 2.0 * W * t / 16.0;
                const TransportRay& r0 = dis.rays()[mid];
                const TransportRay& r1 = dis.rays()[nb];
                const Point p0 = dis.point_of({static_cast<int>(mid), r0.u_start - u});
                const Point p1 = dis.point_of({static_cast<int>(nb), r1.u_start - u});
                sup = std::max(sup, sp.distance(p0, p1));
            }
            if (sup > prev + 1e-12) out.continuous_on_samples = false;
            prev = sup;
        }
    }

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "worst_residual=%.6g injective=%d continuous=%d window=%.4g",
                  worst, out.injective_on_samples ? 1 : 0,
                  out.continuous_on_samples ? 1 : 0, W);
    out.report.detail = buf;
    out.report.finalize();
    return out;
}

void export_factorization(const FactorizationResult& fr, const std::string& path) {
    std::ofstream outp(path);
    if (!outp) throw std::runtime_error("cannot open factorization export: " + path);
    outp << "alpha,b_plus,c_alpha\n";
    char buf[120];
    for (const FactorizationRow& row : fr.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", row.alpha, row.b_plus,
                      row.c_alpha);
        outp << buf;
    }
}

} // namespace needlelab
