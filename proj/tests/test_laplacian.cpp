#include <doctest.h>

#include <cmath>

#include "needlelab/laplacian.hpp"
#include "needlelab/quadrature.hpp"

using namespace needlelab;

namespace {

ResolutionSpec rays(int n) {
    ResolutionSpec r;
    r.n_rays = n;
    return r;
}

Disintegration sphere_dp(int n = 256) {
    const ModelSpace s = ModelSpace::space_form(2, 1.0);
    return Disintegration(s, BaseDescriptor::at_point(s.base_point_default()),
                          Region::all(), rays(n));
}

Disintegration plane_dp(int n = 256, double rmax = 10.0) {
    ModelSpace plane = ModelSpace::space_form(2, 0.0);
    plane.set_r_max(rmax);
    return Disintegration(plane, BaseDescriptor::at_point(Point{}), Region::all(),
                          rays(n));
}

Disintegration euclid3_dp() {
    ModelSpace e3 = ModelSpace::space_form(3, 0.0);
    e3.set_r_max(12.0);
    ResolutionSpec res;
    res.n_phi = 16;
    res.n_cos = 12;
    return Disintegration(e3, BaseDescriptor::at_point(Point{}), Region::all(), res);
}

Disintegration cylinder_dp(int n = 2048, double rmax = 12.0) {
    ModelSpace cy = ModelSpace::flat_cylinder(2.0 * M_PI);
    cy.set_r_max(rmax);
    return Disintegration(cy, BaseDescriptor::at_point(Point{}), Region::all(),
                          rays(n));
}

Disintegration equator_dv(int n = 256) {
    return Disintegration(ModelSpace::space_form(2, 1.0),
                          BaseDescriptor::level_set(BaseVariant::Equator),
                          Region::all(), rays(n));
}

Disintegration hyperplane_dv(int n = 256) {
    ModelSpace pl = ModelSpace::space_form(2, 0.0);
    pl.set_r_max(10.0);
    pl.set_chart_halfwidth(5.0);
    return Disintegration(pl, BaseDescriptor::level_set(BaseVariant::Hyperplane),
                          Region::all(), rays(n));
}

} // namespace

TEST_CASE("regular parts match the analytic Laplacians") {
    const Disintegration sp = sphere_dp();
    const DistributionalLaplacian lap_sp = laplacian_dp(sp);
    const Disintegration e3 = euclid3_dp();
    const DistributionalLaplacian lap_e3 = laplacian_dp(e3);
    const Disintegration cy = cylinder_dp(256);
    const DistributionalLaplacian lap_cy = laplacian_dp(cy);

    for (int k = 1; k < 30; ++k) {
        const double r = 0.1 + (M_PI - 0.2) * k / 30.0;
        const double t = sp.rays()[7].u_start - r;
        CHECK(lap_sp.regular_at({7, t}) ==
              doctest::Approx(1.0 / std::tan(r)).epsilon(1e-10));
    }
    for (int k = 1; k < 30; ++k) {
        const double r = 0.2 + 9.0 * k / 30.0;
        const double t = e3.rays()[3].u_start - r;
        CHECK(lap_e3.regular_at({3, t}) == doctest::Approx(2.0 / r).epsilon(1e-12));
        const double tc = cy.rays()[11].u_start - std::min(r, 0.9 * cy.rays()[11].len);
        const double rc = cy.rays()[11].u_at(tc);
        CHECK(lap_cy.regular_at({11, tc}) == doctest::Approx(1.0 / rc).epsilon(1e-12));
    }
}

TEST_CASE("distance-squared Laplacians and the chain rule") {
    const Disintegration e3 = euclid3_dp();
    const DistributionalLaplacian lap2 = laplacian_dp_squared(e3);
    for (double r : {0.5, 3.0, 8.0}) {
        const double t = e3.rays()[0].u_start - r;
        CHECK(lap2.regular_at({0, t}) == doctest::Approx(6.0).epsilon(1e-12));
    }

    const Disintegration pl = plane_dp();
    const DistributionalLaplacian p2 = laplacian_dp_squared(pl);
    for (double r : {0.5, 4.0})
        CHECK(p2.regular_at({2, pl.rays()[2].u_start - r}) ==
              doctest::Approx(4.0).epsilon(1e-12));

    // sphere: 2(1 + r cot r) -> 2N = 4 as r -> 0
    const Disintegration sp = sphere_dp();
    const DistributionalLaplacian s2 = laplacian_dp_squared(sp);
    const double t_small = sp.rays()[0].u_start - 1e-4;
    CHECK(s2.regular_at({0, t_small}) == doctest::Approx(4.0).epsilon(1e-6));

    // chain rule consistency with the plain distance Laplacian
    const DistributionalLaplacian s1 = laplacian_dp(sp);
    for (std::size_t i = 0; i < sp.rays().size(); i += 64) {
        for (double r : {0.3, 1.1, 2.7}) {
            const RayHandle h{static_cast<int>(i), sp.rays()[i].u_start - r};
            CHECK(std::abs(s2.regular_at(h) -
                           2.0 * (1.0 + r * s1.regular_at(h))) < 1e-10);
        }
    }
}

TEST_CASE("signed-distance Laplacians on level sets") {
    const Disintegration hp = hyperplane_dv();
    const DistributionalLaplacian dv = laplacian_dv(hp);
    const DistributionalLaplacian dv2 = laplacian_dv_squared(hp);
    CHECK(dv.atoms().empty());
    CHECK(dv2.atoms().empty());
    for (double t : {3.0, 9.0, 16.0}) {
        CHECK(dv.regular_at({5, t}) == doctest::Approx(0.0));
        CHECK(dv2.regular_at({5, t}) == doctest::Approx(2.0));
    }

    const Disintegration eq = equator_dv();
    const DistributionalLaplacian edv = laplacian_dv(eq);
    const DistributionalLaplacian eabs = laplacian_abs_dv(eq);
    const DistributionalLaplacian edv2 = laplacian_dv_squared(eq);
    for (double t : {0.4, 1.2, 2.0, 2.9}) {
        const double u = eq.rays()[3].u_at(t);
        CHECK(edv.regular_at({3, t}) ==
              doctest::Approx(-std::tan(u)).epsilon(1e-10));
        // sign flip on the two half-spaces
        CHECK(eabs.regular_at({3, t}) ==
              doctest::Approx((u >= 0 ? 1.0 : -1.0) * edv.regular_at({3, t})));
    }
    // at the equator the squared variant is exactly 2
    const double t_eq = eq.rays()[0].u_start;  // u = 0
    CHECK(edv2.regular_at({0, t_eq}) == doctest::Approx(2.0).epsilon(1e-12));
    // pole atoms vanish with the density
    for (const Atom& a : edv2.atoms()) CHECK(std::abs(a.mass) < 1e-12);

    // all meridians share the two poles: per-ray atoms merge to two clusters
    CHECK(edv2.atoms().size() <= 2);
    CHECK_THROWS_AS(edv.regular_at({0, eq.rays()[0].u_start}), std::domain_error);

    // weighted sin interval with level point: both endpoint atoms vanish
    Interval iv(0.0, M_PI);
    const ModelSpace wi = ModelSpace::weighted_interval(
        iv, Density1D::sin_pow(iv, 1.0, 1.0, 1.0), 2.0, 1.0);
    const Disintegration dw(wi,
                            BaseDescriptor::level_set(BaseVariant::LevelPoint, M_PI_2),
                            Region::all(), rays(1));
    const DistributionalLaplacian wdv2 = laplacian_dv_squared(dw);
    for (const Atom& a : wdv2.atoms()) CHECK(std::abs(a.mass) < 1e-12);

    CHECK_THROWS_AS(laplacian_dv(plane_dp()), std::invalid_argument);
    CHECK_THROWS_AS(laplacian_dp(hp), std::invalid_argument);
}

TEST_CASE("cylinder atoms carry the cut-line mass") {
    const Disintegration cy = cylinder_dp();
    const DistributionalLaplacian lap = laplacian_dp(cy);
    // every finite ray contributes -h(a) * w, h(a) = 2 pi t_cut
    int checked = 0;
    for (const auto& ra : lap.raw_atoms()) {
        const TransportRay& r = cy.rays()[ra.ray];
        CHECK(ra.mass ==
              doctest::Approx(-r.weight * 2.0 * M_PI * r.full_length).epsilon(1e-12));
        ++checked;
    }
    CHECK(checked > 100);

    // the sign invariant: d_p atoms are never positive
    for (const auto& ra : lap.raw_atoms()) CHECK(ra.mass <= 0.0);
    const DistributionalLaplacian lap2 = laplacian_dp_squared(cy);
    for (const auto& ra : lap2.raw_atoms()) CHECK(ra.mass <= 0.0);

    // sphere: h vanishes at the antipode, so the singular part is empty
    const DistributionalLaplacian sp = laplacian_dp_squared(sphere_dp());
    CHECK(sp.singular_tv_in(Region::all()) < 1e-8);
}

TEST_CASE("nu measure cases") {
    const Disintegration hp = hyperplane_dv();
    const NuMeasure nu0 = nu_measure(hp, CurvatureDim(0.0, 2.0));
    CHECK(nu0.case_tag() == NuCase::KZero);
    for (double t : {2.0, 10.0, 17.0})
        CHECK(nu0.density_at({4, t}) == doctest::Approx(2.0));

    const Disintegration eq = equator_dv();
    const NuMeasure nu1 = nu_measure(eq, CurvatureDim(1.0, 2.0));
    CHECK(nu1.case_tag() == NuCase::KPosSuspension);
    REQUIRE(nu1.suspension_poles().has_value());
    const auto& poles = *nu1.suspension_poles();
    CHECK(std::abs(std::abs(poles.first.c[2]) - 1.0) < 1e-9);
    CHECK(std::abs(std::abs(poles.second.c[2]) - 1.0) < 1e-9);

    // suspension case: |density| h stays integrable along the ray
    const TransportRay& r = eq.rays()[0];
    const double integral = simpson(
        [&](double t) {
            return std::abs(nu1.density_at({0, t})) * r.density.value(t);
        },
        1e-4, r.len - 1e-4, 4096);
    CHECK(std::isfinite(integral));

    // K < 0: density stays locally bounded
    ModelSpace hy = ModelSpace::space_form(2, -1.0);
    hy.set_r_max(8.0);
    const Disintegration dh(hy, BaseDescriptor::at_point(hy.base_point_default()),
                            Region::all(), rays(64));
    const NuMeasure nun = nu_measure(dh, CurvatureDim(-1.0, 2.0));
    CHECK(nun.case_tag() == NuCase::KNeg);
    for (double t : {1.0, 4.0, 7.0}) CHECK(std::isfinite(nun.density_at({0, t})));
}

TEST_CASE("comparison sandwich across the catalog") {
    CHECK(comparison_check(laplacian_dp(sphere_dp()), CurvatureDim(1.0, 2.0)).verdict);
    CHECK(comparison_check(laplacian_dp(plane_dp()), CurvatureDim(0.0, 2.0)).verdict);
    CHECK(comparison_check(laplacian_dp(euclid3_dp()), CurvatureDim(0.0, 3.0)).verdict);
    CHECK(comparison_check(laplacian_dp(cylinder_dp(256)), CurvatureDim(0.0, 2.0))
              .verdict);
    CHECK(comparison_check(laplacian_dv_squared(equator_dv()), CurvatureDim(1.0, 2.0))
              .verdict);
    CHECK(comparison_check(laplacian_abs_dv(hyperplane_dv()), CurvatureDim(0.0, 2.0))
              .verdict);

    // sphere saturates both sides
    const CheckReport sp =
        comparison_check(laplacian_dp(sphere_dp()), CurvatureDim(1.0, 2.0));
    CHECK(std::abs(sp.worst_violation) < 1e-9);
}

TEST_CASE("pairings and integration by parts") {
    const Disintegration pl = plane_dp(512, 12.0);
    const DistributionalLaplacian lap = laplacian_dp(pl);

    TestBump far;
    far.center = 100.0;
    far.width = 0.5;  // support empty within the space
    CHECK(pairing(lap, far, Region::all()) == doctest::Approx(0.0));

    TestBump annulus;
    annulus.center = 1.5;
    annulus.width = 0.5;
    const double engine = pairing(lap, annulus, Region::all());
    // oracle: int f (1/r) dm = 2 pi int_1^2 f(r) dr
    const double oracle = 2.0 * M_PI *
                          simpson(
                              [&](double r) {
                                  const double s = (r - 1.5) / 0.5;
                                  const double w = 1.0 - s * s;
                                  return w > 0.0 ? w * w * w * w * w : 0.0;
                              },
                              1.0, 2.0, 2048);
    CHECK(engine == doctest::Approx(oracle).epsilon(1e-6));

    PairingSpec spec;
    spec.panels_per_ray = 1024;
    CHECK(ibp_residual(lap, pl, annulus, Region::all(), spec) < 1e-6);

    // cylinder bump straddling the cut line: atoms carry the identity
    const Disintegration cy = cylinder_dp(1024);
    const DistributionalLaplacian cl2 = laplacian_dp_squared(cy);
    TestBump cut;
    cut.kind = TestBump::CylinderCut;
    cut.width = 1.2;
    cut.z_width = 2.0;
    CHECK(ibp_residual(cl2, cy, cut, Region::all(), spec) < 1e-5);
    // dropping the atoms must break the identity: their total is macroscopic
    double atom_sum = 0.0;
    for (const auto& a : cl2.raw_atoms()) atom_sum += std::abs(a.mass);
    CHECK(atom_sum > 1.0);

    // second-order decay of the residual under grid refinement
    double res[3];
    const int panels[3] = {128, 256, 512};
    for (int k = 0; k < 3; ++k) {
        PairingSpec s2;
        s2.panels_per_ray = panels[k];
        res[k] = ibp_residual(lap, pl, annulus, Region::all(), s2);
    }
    if (res[0] > 1e-13) {
        const double slope = std::log2(res[0] / std::max(res[2], 1e-300)) / 2.0;
        CHECK(slope >= 1.8);
    }

    // support-leak detection
    TestBump wide;
    wide.center = 5.0;
    wide.width = 4.0;
    CHECK_THROWS_AS(pairing(lap, wide, Region::ball(6.0)), std::invalid_argument);
}

TEST_CASE("nu dominates the distance-squared Laplacian") {
    const Disintegration eq = equator_dv(256);
    const NuMeasure nu = nu_measure(eq, CurvatureDim(1.0, 2.0));
    const DistributionalLaplacian lap2 = laplacian_dv_squared(eq);
    for (double center : {-0.6, 0.0, 0.6}) {
        TestBump f;
        f.center = center;
        f.width = 0.5;
        const double a = pairing(lap2, f, Region::all());
        const double b = pairing_nu(nu, eq, f, Region::all());
        CHECK(a <= b + 1e-8 * (1.0 + std::abs(b)));
    }
}

TEST_CASE("endpoint vanishing and the measure-scaling hypothesis") {
    const EndpointVanishing pl = endpoint_vanishing_check(plane_dp(), 2.0);
    CHECK(pl.hypothesis_holds);
    CHECK(pl.ratio_estimate == doctest::Approx(M_PI).epsilon(1e-3));
    CHECK(pl.verdict);
    CHECK(pl.max_h_at_base == 0.0);

    CHECK(endpoint_vanishing_check(sphere_dp(), 2.0).verdict);

    // 1-D counterexample: m(B_r) ~ r, the r^2 hypothesis fails and no
    // conclusion is drawn about h at the base
    Interval iv(0.0, 1.0);
    const ModelSpace wi = ModelSpace::weighted_interval(
        iv, Density1D::constant(iv, 1.0), 2.0, 0.0);
    Point left;
    const Disintegration dw(wi, BaseDescriptor::at_point(left), Region::all(),
                            ResolutionSpec{});
    const EndpointVanishing ev = endpoint_vanishing_check(dw, 2.0);
    CHECK_FALSE(ev.hypothesis_holds);
    CHECK_FALSE(ev.verdict);
}

TEST_CASE("weighted half line: base atom survives, nu density is coth-type") {
    ModelSpace hl = ModelSpace::weighted_half_line(
        Density1D::constant(Interval(0.0, std::numeric_limits<double>::infinity()),
                            1.0),
        2.0, -1.0);
    hl.set_r_max(20.0);
    Point origin;
    const Disintegration dis(hl, BaseDescriptor::at_point(origin), Region::all(),
                             ResolutionSpec{});
    REQUIRE(dis.rays().size() == 1);
    CHECK_FALSE(dis.rays()[0].has_a);
    CHECK(dis.rays()[0].has_b);

    // the flat density does not vanish at the base: the final-point atom of
    // the general representation carries +h(0)
    const DistributionalLaplacian gen = laplacian_general(dis);
    REQUIRE(gen.atoms().size() == 1);
    CHECK(gen.atoms()[0].mass == doctest::Approx(1.0));

    const NuMeasure nu = nu_measure(dis, CurvatureDim(-1.0, 2.0));
    CHECK(nu.case_tag() == NuCase::KNeg);
    for (double u : {0.5, 2.0, 8.0}) {
        const double t = dis.rays()[0].u_start - u;
        CHECK(nu.density_at({0, t}) ==
              doctest::Approx(2.0 * (1.0 + u / std::tanh(u))).epsilon(1e-12));
    }
}

TEST_CASE("grid-sampled densities reproduce the regular part to 1e-3") {
    ResolutionSpec res;
    res.n_rays = 32;
    res.sampled_grid = true;
    res.grid_nodes = 1024;
    const ModelSpace s = ModelSpace::space_form(2, 1.0);
    const Disintegration dis(s, BaseDescriptor::at_point(s.base_point_default()),
                             Region::all(), res);
    const DistributionalLaplacian lap = laplacian_dp(dis);
    const double step = dis.rays()[0].density.grid_step();
    for (int k = 2; k < 30; ++k) {
        const double r = 0.15 + (M_PI - 0.3) * k / 30.0;
        // snap to a grid node so the central-difference contract applies
        const double t = std::round((dis.rays()[5].u_start - r) / step) * step;
        const double rr = dis.rays()[5].u_at(t);
        CHECK(std::abs(lap.regular_at({5, t}) - 1.0 / std::tan(rr)) < 1e-3);
    }
}

TEST_CASE("general Laplacian refuses divergent ray families") {
    ModelSpace seed = ModelSpace::weighted_interval(
        Interval(0.0, 1.0), Density1D::constant(Interval(0.0, 1.0), 1.0), 2.0, 0.0);
    std::vector<TransportRay> family;
    const int n = 2048;
    for (int i = 0; i < n; ++i) {
        TransportRay r;
        const double alpha = (i + 0.5) / n;
        r.alpha[0] = alpha;
        r.weight = 1.0 / n;
        r.len = r.u_start = r.full_length = alpha;
        r.has_a = r.has_b = true;
        r.density = Density1D::constant(Interval(0.0, alpha), 1.0);
        family.push_back(std::move(r));
    }
    const Disintegration synth = Disintegration::synthetic(
        seed, BaseDescriptor::at_point(Point{}), std::move(family));
    CHECK_THROWS_AS(laplacian_general(synth), std::domain_error);

    // well-separated lengths are accepted
    CHECK_NOTHROW(laplacian_general(sphere_dp(64)));
}
