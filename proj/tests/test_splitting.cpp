#include <doctest.h>

#include <cmath>

#include "needlelab/splitting.hpp"

using namespace needlelab;

namespace {

ResolutionSpec rays(int n) {
    ResolutionSpec r;
    r.n_rays = n;
    return r;
}

Point pt(double a, double b = 0.0) {
    Point p;
    p.c[0] = a;
    p.c[1] = b;
    return p;
}

ModelSpace product(double broken = 0.0) {
    Interval iv(0.0, 2.0);
    ModelSpace sp = ModelSpace::product_line(
        iv, Density1D::sin_pow(iv, 1.0, 1.0, 1.0, -0.6), 2.0, broken, 0.8);
    sp.set_r_max(10.0);
    return sp;
}

} // namespace

TEST_CASE("Busemann values on the catalog lines") {
    const ModelSpace plane = ModelSpace::space_form(2, 0.0);
    const BusemannValue b = busemann(plane, pt(3.0, 4.0), 1e4);
    CHECK(std::abs(b.value - (-3.0)) < 1e-3);
    CHECK(b.cauchy_gap < 1e-3);

    // on the line itself b+ is minus the parameter, and b+ + b- = 0
    const BusemannValue on_line = busemann(plane, plane.line_point(2.5), 1e5);
    CHECK(on_line.value == doctest::Approx(-2.5).epsilon(1e-9));
    const BusemannValue back = busemann(plane, plane.line_point(2.5), -1e5);
    CHECK(on_line.value + back.value == doctest::Approx(0.0).epsilon(1e-9));

    const ModelSpace cyl = ModelSpace::flat_cylinder(2.0 * M_PI);
    const BusemannValue bc = busemann(cyl, pt(1.0, 3.5), 2e4);
    CHECK(std::abs(bc.value - (-3.5)) < 1e-3);

    const BusemannValue cert = busemann_certified(plane, pt(1.0, 1.0), true);
    CHECK(cert.converged);
    CHECK(std::abs(cert.value - (-1.0)) < 1e-5);
}

TEST_CASE("b+ + b- vanishes on the splitting catalog") {
    std::vector<Point> samples;
    for (int i = -3; i <= 3; ++i)
        for (int j = -3; j <= 3; ++j) samples.push_back(pt(1.1 * i, 1.2 * j));

    const CheckReport plane =
        check_b_zero(ModelSpace::space_form(2, 0.0), samples, 1e-4);
    CHECK(plane.verdict);
    const CheckReport cyl =
        check_b_zero(ModelSpace::flat_cylinder(2.0 * M_PI), samples, 1e-4);
    CHECK(cyl.verdict);

    std::vector<Point> psamples;
    for (int i = 1; i <= 5; ++i)
        for (int j = -3; j <= 3; ++j) psamples.push_back(pt(0.3 * i, 1.2 * j));
    CHECK(check_b_zero(product(), psamples, 1e-4, 1.0).verdict);
}

TEST_CASE("constant ray densities along Busemann lines") {
    ModelSpace pl = ModelSpace::space_form(2, 0.0);
    pl.set_r_max(10.0);
    pl.set_chart_halfwidth(4.0);
    const Disintegration dp(pl, BaseDescriptor::line(), Region::all(), rays(256));
    CHECK(check_constant_ray_densities(dp).verdict);

    const Disintegration dd(product(), BaseDescriptor::line(1.0), Region::all(),
                            rays(256));
    CHECK(check_constant_ray_densities(dd).verdict);

    // engineered z-dependent weight: rejected
    const Disintegration broken(product(0.35), BaseDescriptor::line(1.0),
                                Region::all(), rays(64));
    const CheckReport rej = check_constant_ray_densities(broken);
    CHECK_FALSE(rej.verdict);

    // a half-infinite ray flags failure of the splitting hypothesis
    std::vector<TransportRay> family;
    TransportRay r;
    r.weight = 1.0;
    r.len = 5.0;
    r.u_start = 5.0;
    r.full_length = 5.0;
    r.has_a = true;
    r.has_b = false;
    r.density = Density1D::constant(Interval(0.0, 5.0), 1.0);
    family.push_back(std::move(r));
    const Disintegration synth = Disintegration::synthetic(
        product(), BaseDescriptor::line(1.0), std::move(family));
    CHECK_FALSE(check_constant_ray_densities(synth).verdict);
}

TEST_CASE("measure factorization through Phi") {
    ModelSpace pl = ModelSpace::space_form(2, 0.0);
    pl.set_r_max(10.0);
    pl.set_chart_halfwidth(4.0);
    const Disintegration dp(pl, BaseDescriptor::line(), Region::all(), rays(1024));
    const FactorizationResult plane = factorize(dp);
    CHECK(plane.report.verdict);
    CHECK(plane.worst_residual < 1e-9);  // Fubini is exact here
    CHECK(plane.injective_on_samples);
    CHECK(plane.continuous_on_samples);

    ModelSpace cy = ModelSpace::flat_cylinder(2.0 * M_PI);
    cy.set_r_max(10.0);
    const Disintegration dc(cy, BaseDescriptor::line(), Region::all(), rays(1024));
    CHECK(factorize(dc).report.verdict);

    // non-uniform quotient weight: residual is quadrature-limited and decays
    // at first order or better under chart refinement
    const FactorizationResult coarse =
        factorize(Disintegration(product(), BaseDescriptor::line(1.0),
                                 Region::all(), rays(256)));
    const FactorizationResult fine =
        factorize(Disintegration(product(), BaseDescriptor::line(1.0),
                                 Region::all(), rays(1024)));
    CHECK(fine.report.verdict);
    CHECK(fine.worst_residual <= 0.51 * coarse.worst_residual + 1e-12);

    CHECK_THROWS_AS(factorize(dp, 1, 8), std::invalid_argument);

    const char* path = "test_factorization.csv";
    export_factorization(fine, path);
    std::remove(path);
}

TEST_CASE("Busemann values are 1-Lipschitz up to the Cauchy certificate") {
    const ModelSpace cyl = ModelSpace::flat_cylinder(2.0 * M_PI);
    std::vector<Point> samples;
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) samples.push_back(pt(0.9 * i, 1.7 * j));
    std::vector<BusemannValue> vals;
    for (const Point& x : samples) vals.push_back(busemann_certified(cyl, x, true));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            const double lhs = std::abs(vals[i].value - vals[j].value);
            const double rhs = cyl.distance(samples[i], samples[j]) +
                               2.0 * std::max(vals[i].cauchy_gap, vals[j].cauchy_gap);
            CHECK(lhs <= rhs + 1e-12);
        }
    }
}

TEST_CASE("Busemann disintegrations have endless rays and nonpositive Laplacian") {
    const Disintegration dd(product(), BaseDescriptor::line(1.0), Region::all(),
                            rays(128));
    for (const TransportRay& r : dd.rays()) {
        CHECK_FALSE(r.has_a);
        CHECK_FALSE(r.has_b);
        // -(log h)' = 0 for the constant densities
        for (double t : {0.25 * r.len, 0.5 * r.len, 0.75 * r.len})
            CHECK(std::abs(r.density.log_deriv(t)) < 1e-12);
    }
}
