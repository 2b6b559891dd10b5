#include <doctest.h>

#include <cmath>
#include <fstream>

#include "needlelab/density1d.hpp"
#include "needlelab/quadrature.hpp"

using namespace needlelab;

namespace {
const Interval kZeroPi(0.0, M_PI);
const Interval kUnit(0.0, 1.0);
}

TEST_CASE("MCP certification on the model densities") {
    CHECK(check_mcp_density(Density1D::sin_pow(kZeroPi, 1.0, 1.0, 1.0),
                            CurvatureDim(1.0, 2.0))
              .verdict);
    CHECK(check_mcp_density(Density1D::constant(kUnit, 1.0), CurvatureDim(0.0, 2.0))
              .verdict);
    CHECK(check_mcp_density(Density1D::constant(kUnit, 1.0), CurvatureDim(0.0, 5.5))
              .verdict);
}

TEST_CASE("exponential fails MCP(0,2) with a long-jump witness") {
    const CheckReport rep =
        check_mcp_density(Density1D::exponential(Interval(-20.0, 20.0), 1.0, 1.0),
                          CurvatureDim(0.0, 2.0));
    CHECK_FALSE(rep.verdict);
    // independent oracle: scan for the smallest |x1 - x0| that violates
    // e^{t(x1-x0)} >= (1 - t) somewhere (t = 1/2 already suffices for the scan)
    double threshold = 40.0;
    for (double d = 0.5; d < 40.0; d += 0.5) {
        if (std::exp(-0.5 * d) < 0.5) {
            threshold = d;
            break;
        }
    }
    REQUIRE(rep.witness.size() == 3);
    CHECK(std::abs(rep.witness[1] - rep.witness[0]) > threshold);
}

TEST_CASE("CD certification equality cases") {
    const CheckReport linear = check_cd_density(
        Density1D::power(kUnit, 1.0, 1.0), CurvatureDim(0.0, 2.0));
    CHECK(linear.verdict);
    CHECK(std::abs(linear.worst_violation) < 1e-9);

    const CheckReport ch =
        check_cd_density(Density1D::cosh_pow(Interval(-2.0, 2.0), 1.0, 1.0, 1.0),
                         CurvatureDim(-1.0, 2.0));
    CHECK(ch.verdict);
    CHECK(std::abs(ch.worst_violation) < 1e-9);

    CHECK(check_cd_density(Density1D::sin_pow(kZeroPi, 1.0, 1.0, 1.0),
                           CurvatureDim(1.0, 2.0))
              .verdict);
    CHECK(check_cd_density(Density1D::sin_pow(kZeroPi, 1.0, 1.0, 2.5),
                           CurvatureDim(2.5, 3.5))
              .verdict);
}

TEST_CASE("CD implies MCP across the closed-form catalog") {
    struct Entry {
        Density1D h;
        CurvatureDim kd;
    };
    const Entry entries[] = {
        {Density1D::sin_pow(kZeroPi, 1.0, 1.0, 1.0), CurvatureDim(1.0, 2.0)},
        {Density1D::power(kUnit, 1.0, 1.0), CurvatureDim(0.0, 2.0)},
        {Density1D::power(kUnit, 1.0, 2.5), CurvatureDim(0.0, 3.5)},
        {Density1D::cosh_pow(Interval(-2.0, 2.0), 1.0, 1.0, 1.0),
         CurvatureDim(-1.0, 2.0)},
        {Density1D::sinh_pow(Interval(0.2, 3.0), 1.0, 1.0, 1.0),
         CurvatureDim(-1.0, 2.0)},
        {Density1D::constant(kUnit, 2.0), CurvatureDim(0.0, 2.0)},
    };
    for (const Entry& e : entries) {
        const bool cd = check_cd_density(e.h, e.kd).verdict;
        const bool mcp = check_mcp_density(e.h, e.kd).verdict;
        if (cd) CHECK(mcp);
    }
}

TEST_CASE("ratio bounds") {
    const CurvatureDim flat2(0.0, 2.0);
    const Density1D one = Density1D::constant(kUnit, 1.0);
    const RatioBounds rb = ratio_bounds(one, flat2, 0.3, 0.8);
    CHECK(rb.lower == doctest::Approx(0.2 / 0.7));
    CHECK(rb.upper == doctest::Approx(0.8 / 0.3));
    CHECK(rb.observed == doctest::Approx(1.0));
    CHECK(rb.lower <= 1.0);
    CHECK(1.0 <= rb.upper);

    const RatioBounds deg = ratio_bounds(one, flat2, 0.4, 0.4);
    CHECK(deg.observed == doctest::Approx(1.0));
    CHECK(deg.lower <= 1.0);
    CHECK(deg.upper >= 1.0);

    const Density1D lin = Density1D::power(kUnit, 1.0, 1.0);
    const RatioBounds tight = ratio_bounds(lin, flat2, 0.25, 0.5);
    CHECK(tight.observed == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(tight.upper == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(ratio_bounds(one, flat2, -0.1, 0.5), std::domain_error);
}

TEST_CASE("log-derivative sandwich") {
    // power density: observed equals the upper bound exactly (a = 0)
    const Density1D pw = Density1D::power(Interval(0.0, 2.0), 1.0, 1.5);
    const CurvatureDim kd(0.0, 2.5);
    for (double x : {0.2, 0.9, 1.7}) {
        const LogDerivBounds lb = log_derivative_bounds(pw, kd, x);
        CHECK(lb.observed == doctest::Approx(1.5 / x).epsilon(1e-13));
        CHECK(lb.observed == doctest::Approx(lb.upper).epsilon(1e-13));
        CHECK(lb.lower <= lb.observed);
    }

    // sin with K = 1, N = 2: both bounds are tight
    const Density1D sn = Density1D::sin_pow(kZeroPi, 1.0, 1.0, 1.0);
    const CurvatureDim round(1.0, 2.0);
    for (double x : {0.4, M_PI_2, 2.6}) {
        const LogDerivBounds lb = log_derivative_bounds(sn, round, x);
        CHECK(lb.observed == doctest::Approx(1.0 / std::tan(x)).epsilon(1e-12));
        CHECK(lb.upper == doctest::Approx(lb.observed).epsilon(1e-10));
        CHECK(lb.lower == doctest::Approx(lb.observed).epsilon(1e-10));
    }

    // infinite ends take the flat / hyperbolic limits
    const Density1D flat = Density1D::constant(
        Interval(-std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()),
        1.0);
    const LogDerivBounds both = log_derivative_bounds(flat, CurvatureDim(0.0, 2.0), 0.0);
    CHECK(both.upper == 0.0);
    CHECK(both.lower == 0.0);
    CHECK(both.observed == 0.0);
    const LogDerivBounds hyp =
        log_derivative_bounds(flat, CurvatureDim(-1.0, 2.0), 0.0);
    CHECK(hyp.upper == doctest::Approx(1.0));
    CHECK(hyp.lower == doctest::Approx(-1.0));

    CHECK_THROWS_AS(log_derivative_bounds(sn, round, 0.0), std::domain_error);
}

TEST_CASE("sandwich holds at grid points for catalog MCP densities") {
    struct Entry {
        Density1D h;
        CurvatureDim kd;
    };
    const Entry entries[] = {
        {Density1D::sin_pow(kZeroPi, 1.0, 1.0, 1.0), CurvatureDim(1.0, 2.0)},
        {Density1D::power(kUnit, 1.0, 1.0), CurvatureDim(0.0, 2.0)},
        {Density1D::cosh_pow(Interval(-2.0, 2.0), 1.0, 1.0, 1.0),
         CurvatureDim(-1.0, 2.0)},
        {Density1D::constant(kUnit, 3.0), CurvatureDim(0.0, 2.0)},
    };
    for (const Entry& e : entries) {
        const Interval& iv = e.h.interval();
        for (int i = 1; i < 40; ++i) {
            const double x = iv.a + iv.length() * i / 40.0;
            const LogDerivBounds lb = log_derivative_bounds(e.h, e.kd, x);
            CHECK(lb.observed >= lb.lower - 1e-9 * (1.0 + std::abs(lb.lower)));
            CHECK(lb.observed <= lb.upper + 1e-9 * (1.0 + std::abs(lb.upper)));
        }
    }
}

TEST_CASE("sup bound") {
    const SupBound tight =
        sup_bound(Density1D::power(kUnit, 2.0, 1.0), CurvatureDim(0.0, 2.0));
    CHECK(tight.bound == doctest::Approx(2.0));
    CHECK(tight.observed_sup == doctest::Approx(2.0));
    CHECK(tight.observed_sup / tight.bound >= 1.0 - 1e-9);
    CHECK(tight.observed_sup / tight.bound <= 1.0);

    const SupBound flat =
        sup_bound(Density1D::constant(kUnit, 1.0), CurvatureDim(0.0, 2.0));
    CHECK(flat.bound == doctest::Approx(2.0));
    CHECK(flat.observed_sup == doctest::Approx(1.0));

    const SupBound sphere = sup_bound(
        Density1D::sin_pow(kZeroPi, 0.5, 1.0, 1.0), CurvatureDim(1.0, 2.0));
    CHECK(sphere.bound == doctest::Approx(2.0 / M_PI));
    CHECK(sphere.observed_sup == doctest::Approx(0.5));
    CHECK(sphere.observed_sup <= sphere.bound);

    // K < 0 branch via quadrature stays above every admissible density
    const SupBound hyp =
        sup_bound(Density1D::cosh_pow(Interval(-2.0, 2.0), 1.0, 1.0, 1.0)
                      .normalized(),
                  CurvatureDim(-1.0, 2.0));
    CHECK(hyp.observed_sup <= hyp.bound);

    CHECK_THROWS_AS(
        sup_bound(Density1D::constant(kUnit, 2.0), CurvatureDim(0.0, 2.0)),
        std::invalid_argument);
}

TEST_CASE("derivative L1 bound") {
    const CurvatureDim flat2(0.0, 2.0);
    const DerivativeL1 zero =
        derivative_l1(Density1D::constant(kUnit, 1.0), flat2);
    CHECK(zero.integral == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(zero.integral <= zero.bound);

    const DerivativeL1 lin =
        derivative_l1(Density1D::power(kUnit, 2.0, 1.0), flat2);
    CHECK(lin.integral == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(lin.integral <= lin.bound);

    const DerivativeL1 sn = derivative_l1(
        Density1D::sin_pow(kZeroPi, 0.5, 1.0, 1.0), CurvatureDim(1.0, 2.0));
    CHECK(sn.integral == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sn.integral <= sn.bound);

    const DerivativeL1 hp =
        derivative_l1(Density1D::cosh_pow(Interval(-2.0, 2.0), 1.0, 1.0, 1.0)
                          .normalized(),
                      CurvatureDim(-1.0, 2.0));
    CHECK(hp.integral <= hp.bound);
}

TEST_CASE("log convolution") {
    const Density1D one = log_convolve(Density1D::constant(kUnit, 1.0), 0.1, 64);
    CHECK(one.interval().a == doctest::Approx(0.1));
    CHECK(one.interval().b == doctest::Approx(0.9));
    for (double x : {0.12, 0.5, 0.88})
        CHECK(one.value(x) == doctest::Approx(1.0).epsilon(1e-12));

    // Jensen strict at the midpoint of h(x) = x, against an independent
    // trapezoid quadrature of the defining integral
    const Density1D lin = Density1D::power(kUnit, 1.0, 1.0);
    const Density1D mol = log_convolve(lin, 0.1, 512);
    const double engine = mol.value(0.5);
    CHECK(engine < 0.5);
    double oracle = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = -1.0 + 2.0 * (i + 0.5) / n;
        const double w = 1.0 - u * u;
        oracle += (35.0 / 32.0) * w * w * w * std::log(0.5 - 0.1 * u) * (2.0 / n);
    }
    CHECK(engine == doctest::Approx(std::exp(oracle)).epsilon(1e-6));

    // prop guarantee: the mollification of a CD density is again CD
    const Density1D sm =
        log_convolve(Density1D::sin_pow(kZeroPi, 1.0, 1.0, 1.0), 0.05);
    CHECK(check_cd_density(sm, CurvatureDim(1.0, 2.0)).verdict);

    CHECK_THROWS_AS(log_convolve(Density1D::constant(kUnit, 1.0), 0.6),
                    std::invalid_argument);
}

TEST_CASE("rigidity window") {
    const RigidityWindow w = rigidity_window(100.0, 2.0, 0.0, 1.0);
    CHECK(w.forced_lower == doctest::Approx(99.0 / 100.0).epsilon(1e-15));
    CHECK(w.forced_upper == doctest::Approx(101.0 / 100.0).epsilon(1e-15));

    const RigidityWindow deg = rigidity_window(10.0, 3.0, 0.5, 0.5);
    CHECK(deg.forced_lower <= 1.0);
    CHECK(deg.forced_upper >= 1.0);

    const RigidityWindow far = rigidity_window(1e6, 2.0, 0.0, 1.0);
    CHECK(far.forced_upper - far.forced_lower < 3e-6);
}

TEST_CASE("ray Bochner inequality") {
    const CheckReport flat = bochner_1d(Density1D::constant(kUnit, 1.0),
                                        CurvatureDim(0.0, 2.0), 0.3, 0.4);
    CHECK(flat.verdict);
    CHECK(std::abs(flat.worst_violation) < 1e-12);

    // cot' = -1 - cot^2 saturates the inequality
    const CheckReport eq =
        bochner_1d(Density1D::sin_pow(kZeroPi, 1.0, 1.0, 1.0),
                   CurvatureDim(1.0, 2.0), M_PI_4, M_PI_4);
    CHECK(eq.verdict);
    CHECK(std::abs(eq.worst_violation) < 1e-6);

    // backward steps check the shifted-base inequality
    const CheckReport back =
        bochner_1d(Density1D::sin_pow(kZeroPi, 1.0, 1.0, 1.0),
                   CurvatureDim(1.0, 2.0), M_PI_2, -M_PI_4);
    CHECK(back.verdict);

    // x^2 is not a CD(0,2) density: the sweep finds a violation
    GridSpec g;
    g.edge_frac = 0.02;
    const CheckReport bad = bochner_1d_sweep(
        Density1D::power(kUnit, 1.0, 2.0), CurvatureDim(0.0, 2.0), g);
    CHECK_FALSE(bad.verdict);

    CHECK_THROWS_AS(bochner_1d(Density1D::constant(kUnit, 1.0),
                               CurvatureDim(0.0, 2.0), 0.5, 0.6),
                    std::domain_error);
}

TEST_CASE("Bochner <-> CD verdict agreement") {
    GridSpec g;
    g.edge_frac = 0.02;
    const EquivalenceReport lin = bochner_implies_cd(
        Density1D::power(kUnit, 1.0, 1.0), CurvatureDim(0.0, 2.0), g);
    CHECK(lin.agree);
    CHECK(lin.cd.verdict);

    const EquivalenceReport sn = bochner_implies_cd(
        Density1D::sin_pow(kZeroPi, 1.0, 1.0, 1.0), CurvatureDim(1.0, 2.0), g);
    CHECK(sn.agree);
    CHECK(sn.cd.verdict);

    // wiggly density fails both, with a shared violation region
    std::vector<double> coeffs{0.0, 0.0, 0.0, 0.0, 0.5};
    const Density1D wig = Density1D::log_perturbed(
        Density1D::constant(kZeroPi, 1.0), coeffs);
    const EquivalenceReport bad =
        bochner_implies_cd(wig, CurvatureDim(1.0, 2.0), g);
    CHECK(bad.agree);
    CHECK_FALSE(bad.cd.verdict);
    CHECK_FALSE(bad.bochner.verdict);
}

TEST_CASE("grid densities: interpolation, derivatives, endpoint continuity") {
    // sample sin onto a grid and compare (log h)' with the analytic cot
    const int n = 512;
    std::vector<double> vals(n + 1);
    const double a = 0.2, b = M_PI - 0.2;
    for (int i = 0; i <= n; ++i) vals[i] = std::sin(a + (b - a) * i / n);
    const Density1D grid = Density1D::from_grid(Interval(a, b), vals);
    const double step = grid.grid_step();
    for (double x : {0.5, 1.0, 2.0, 2.7}) {
        // snap to the nearest node for the central-difference contract
        const double xs = a + std::round((x - a) / step) * step;
        const double fd = grid.log_deriv(xs);
        CHECK(std::abs(fd - 1.0 / std::tan(xs)) < 20.0 * step * step);
    }

    // Cauchy endpoint extension: dyadic approach to the endpoint settles down
    const Density1D sn = Density1D::sin_pow(kZeroPi, 1.0, 1.0, 1.0);
    double prev = 1.0;
    for (int k = 3; k <= 14; ++k) {
        const double gap = std::abs(sn.value(M_PI * std::pow(2.0, -k)) -
                                    sn.value(M_PI * std::pow(2.0, -k - 1)));
        CHECK(gap <= prev + 1e-12);
        prev = gap;
    }
    CHECK(prev < 1e-3);

    CHECK_THROWS_AS(Density1D::from_grid(Interval(0.0, 1.0), {1.0, -1.0, 1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("density catalog parsing") {
    const Density1D sn = Density1D::parse("sin_pow a=0 b=3.141592653589793 amp=2 omega=1 p=1.5");
    CHECK(sn.form() == DensityForm::SinPow);
    CHECK(sn.value(M_PI_2) == doctest::Approx(2.0));

    const Density1D c = Density1D::parse("constant a=1 b=4 amp=0.5");
    CHECK(c.mass() == doctest::Approx(1.5));

    CHECK_THROWS_AS(Density1D::parse("mystery a=0 b=1"), std::invalid_argument);

    // two-column grid file round trip
    const char* path = "test_density_grid.txt";
    {
        std::ofstream out(path);
        for (int i = 0; i <= 64; ++i) {
            const double x = i / 64.0;
            out << x << " " << 1.0 + x << "\n";
        }
    }
    const Density1D g = Density1D::load_grid_file(path);
    CHECK(g.value(0.5) == doctest::Approx(1.5).epsilon(1e-6));
    std::remove(path);
}

TEST_CASE("normalization and affine precompose") {
    const Density1D sn = Density1D::sin_pow(kZeroPi, 3.0, 1.0, 1.0);
    CHECK(sn.normalized().mass() == doctest::Approx(1.0).epsilon(1e-12));

    // h(t) = f(-t + pi) flips sin onto itself
    const Density1D flip = sn.precompose_affine(-1.0, M_PI, kZeroPi);
    for (double t : {0.3, 1.1, 2.9})
        CHECK(flip.value(t) == doctest::Approx(sn.value(M_PI - t)).epsilon(1e-13));
}
