// needlelab command-line driver: configuration ingestion, suite execution,
// reports and plot-data emission.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "needlelab/acceptance.hpp"
#include "needlelab/bochner.hpp"
#include "needlelab/config.hpp"
#include "needlelab/cut_locus.hpp"
#include "needlelab/parallel.hpp"
#include "needlelab/splitting.hpp"

using namespace needlelab;

namespace {

constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

void write_error_report(const std::string& out_dir, const std::string& message,
                        int code) {
    try {
        Report rep("needlelab error");
        rep.kv("error.code", static_cast<double>(code));
        rep.kv("error.message", message);
        std::filesystem::create_directories(out_dir);
        rep.write(out_dir + "/error_report.txt");
    } catch (...) {
        // stderr is the last resort below
    }
    std::fprintf(stderr, "error: %s\n", message.c_str());
}

Report start_report(const char* title, const RunConfig& rc) {
    Report rep(title);
    rep.section("config");
    rep.raw(rc.echo());
    rep.section("results");
    return rep;
}

int cmd_coeffs(const RunConfig& rc) {
    Report rep = start_report("needlelab coeffs", rc);
    CsvWriter csv({"t", "theta", "sigma", "tau"});
    const CurvatureDim kd(rc.space_K, rc.space_N);
    for (int i = 0; i <= 16; ++i) {
        const double t = i / 16.0;
        for (int j = 1; j <= 16; ++j) {
            const double theta = j * M_PI / 16.0;
            const ExtReal sig = sigma_coeff(kd.K, kd.N - 1.0, t, theta);
            const ExtReal tau = tau_coeff(kd.K, kd.N, t, theta);
            csv.row({t, theta, sig.is_infinite() ? -1.0 : sig.value(),
                     tau.is_infinite() ? -1.0 : tau.value()});
        }
    }
    rep.kv("rows", 16.0 * 16.0);
    rep.kv("note", "sigma/tau = -1 marks the infinite branch");
    rep.write(rc.out_dir + "/coeffs_report.txt");
    csv.write(rc.out_dir + "/coeffs.csv");
    return 0;
}

int cmd_density_check(const RunConfig& rc) {
    Report rep = start_report("needlelab density-check", rc);
    const Density1D h = Density1D::parse(rc.space_weight);
    const CurvatureDim kd(rc.space_K, rc.space_N);
    GridSpec grid;
    grid.tolerance *= rc.tolerance_scale;
    const CheckReport mcp = check_mcp_density(h, kd, grid);
    const CheckReport cd = check_cd_density(h, kd, grid);
    rep.kv("density", h.describe());
    rep.check("mcp", mcp);
    rep.check("cd", cd);
    if (h.interval().finite()) {
        const Density1D hn = h.normalized();
        const SupBound sb = sup_bound(hn, kd);
        rep.kv("sup_bound.bound", sb.bound);
        rep.kv("sup_bound.observed", sb.observed_sup);
        const DerivativeL1 dl = derivative_l1(hn, kd);
        rep.kv("derivative_l1.integral", dl.integral);
        rep.kv("derivative_l1.bound", dl.bound);
    }
    rep.write(rc.out_dir + "/density_report.txt");
    return (mcp.verdict && cd.verdict) ? 0 : kExitCheckFailure;
}

int cmd_disintegrate(const RunConfig& rc) {
    Report rep = start_report("needlelab disintegrate", rc);
    const ModelSpace space = rc.make_space();
    Disintegration dis(space, rc.make_base(space), Region::all(), rc.resolution);
    const double mass_err = dis.verify_mass({Region::all()});
    const ExtReal rec = dis.ray_length_reciprocal_integral();
    rep.kv("rays", static_cast<double>(dis.rays().size()));
    rep.kv("mass_consistency_error", mass_err);
    rep.kv("reciprocal_length_integral", rec.str());
    rep.kv("truncated_q_mass", dis.truncated_q_mass());
    dis.export_columns(rc.out_dir + "/disintegration.txt");
    rep.write(rc.out_dir + "/disintegration_report.txt");
    return mass_err < 1e-5 ? 0 : kExitCheckFailure;
}

LapVariant default_variant(const BaseDescriptor& base) {
    if (base.variant == BaseVariant::PointBase) return LapVariant::Dp;
    if (base.variant == BaseVariant::Line) return LapVariant::General;
    return LapVariant::Dv;
}

int cmd_laplacian(const RunConfig& rc, const std::string& series) {
    Report rep = start_report("needlelab laplacian", rc);
    const ModelSpace space = rc.make_space();
    const BaseDescriptor base = rc.make_base(space);
    Disintegration dis(space, base, Region::all(), rc.resolution);
    DistributionalLaplacian lap(dis, default_variant(base));

    CsvWriter csv({"u", "regular", "oracle"});
    const TransportRay& r0 = dis.rays()[0];
    for (int k = 1; k < 200; ++k) {
        const double t = r0.len * k / 200.0;
        const double u = r0.u_at(t);
        double oracle = std::numeric_limits<double>::quiet_NaN();
        if (base.variant == BaseVariant::PointBase &&
            space.kind() == SpaceKind::SpaceForm && u > 0.0) {
            oracle = (space.N() - 1.0) *
                     s_ratio(space.K() / (space.N() - 1.0), u);
        } else if (base.variant == BaseVariant::PointBase &&
                   space.kind() == SpaceKind::FlatCylinder && u > 0.0) {
            oracle = 1.0 / u;
        }
        csv.row({u, lap.regular_at({0, t}), oracle});
    }
    CsvWriter atoms({"c0", "c1", "c2", "mass"});
    for (const Atom& a : lap.atoms())
        atoms.row({a.location.c[0], a.location.c[1], a.location.c[2], a.mass});

    SeriesBundle bundle;
    bundle.add("regular-vs-oracle", std::move(csv));
    bundle.add("atoms", std::move(atoms));
    if (series.empty())
        bundle.emit_all(rc.out_dir);
    else
        bundle.emit_plot_series(series, rc.out_dir);

    rep.kv("variant", lap_variant_name(lap.variant()));
    rep.kv("atoms", static_cast<double>(lap.atoms().size()));
    rep.kv("singular_mass", lap.singular_mass_in(Region::all()));
    ComparisonSpec cspec;
    cspec.tolerance *= rc.tolerance_scale;
    const CheckReport cmp = comparison_check(lap, space.curvature_dim(), cspec);
    rep.check("comparison", cmp);
    // integration-by-parts residual of a representative interior bump
    {
        TestBump f;
        const TransportRay& rr = dis.rays()[0];
        f.center = rr.u_at(0.5 * rr.len);
        f.width = 0.2 * rr.len;
        rep.kv("ibp_residual", ibp_residual(lap, dis, f, Region::all()));
    }
    rep.write(rc.out_dir + "/laplacian_report.txt");
    return cmp.verdict ? 0 : kExitCheckFailure;
}

int cmd_compare(const RunConfig& rc) {
    Report rep = start_report("needlelab compare", rc);
    const ModelSpace space = rc.make_space();
    const BaseDescriptor base = rc.make_base(space);
    Disintegration dis(space, base, Region::all(), rc.resolution);
    ComparisonSpec cs;
    cs.tolerance *= rc.tolerance_scale;
    bool ok = true;
    if (base.variant == BaseVariant::PointBase) {
        const CheckReport c1 = comparison_check(laplacian_dp(dis), space.curvature_dim(), cs);
        const CheckReport c2 =
            comparison_check(laplacian_dp_squared(dis), space.curvature_dim(), cs);
        rep.check("d_p", c1);
        rep.check("d_p_squared", c2);
        ok = c1.verdict && c2.verdict;
    } else if (base.is_level_set()) {
        const CheckReport c1 = comparison_check(laplacian_dv(dis), space.curvature_dim(), cs);
        const CheckReport c2 =
            comparison_check(laplacian_abs_dv(dis), space.curvature_dim(), cs);
        const CheckReport c3 =
            comparison_check(laplacian_dv_squared(dis), space.curvature_dim(), cs);
        rep.check("d_v", c1);
        rep.check("abs_d_v", c2);
        rep.check("d_v_squared", c3);
        ok = c1.verdict && c2.verdict && c3.verdict;
    } else {
        const CheckReport c1 =
            comparison_check(laplacian_general(dis), space.curvature_dim(), cs);
        rep.check("general", c1);
        ok = c1.verdict;
    }
    rep.write(rc.out_dir + "/compare_report.txt");
    return ok ? 0 : kExitCheckFailure;
}

int cmd_cutlocus(const RunConfig& rc, const std::string& series) {
    Report rep = start_report("needlelab cutlocus", rc);
    const ModelSpace space = rc.make_space();
    const BaseDescriptor base = rc.make_base(space);
    if (base.variant != BaseVariant::PointBase)
        throw std::invalid_argument("cutlocus needs base.variant = point");
    Disintegration dis(space, base, Region::all(), rc.resolution);
    const Region window = space.kind() == SpaceKind::FlatCylinder
                              ? Region::band(1.0)
                              : Region::all();
    const MinkowskiSeries mseries = minkowski_series(dis, window);
    CsvWriter csv({"eps", "ratio"});
    for (std::size_t k = 0; k < mseries.eps_values.size(); ++k)
        csv.row({mseries.eps_values[k], mseries.ratios[k]});
    SeriesBundle bundle;
    bundle.add("minkowski", std::move(csv));
    if (series.empty())
        bundle.emit_all(rc.out_dir);
    else
        bundle.emit_plot_series(series, rc.out_dir);
    const CheckReport cmp = minkowski_vs_singular(dis, window);
    rep.kv("limit_estimate", mseries.limit_estimate);
    rep.kv("excluded_q_mass", mseries.excluded_q_mass);
    rep.check("minkowski_vs_singular", cmp);
    rep.write(rc.out_dir + "/cutlocus_report.txt");
    return cmp.verdict ? 0 : kExitCheckFailure;
}

int cmd_bochner(const RunConfig& rc, const std::string& series) {
    if (!rc.seed)
        throw std::invalid_argument("bochner needs a seed for the density corpus");
    Report rep = start_report("needlelab bochner", rc);
    const ModelSpace space = rc.make_space();
    const BaseDescriptor base = rc.make_base(space);
    Disintegration dis(space, base, Region::all(), rc.resolution);
    BochnerSampleSpec bspec;
    bspec.grid.tolerance *= rc.tolerance_scale;
    const BochnerForwardReport fwd =
        bochner_forward(dis, space.curvature_dim(), bspec);
    CsvWriter csv({"alpha", "worst_margin"});
    for (const RayMargin& rm : fwd.per_ray) csv.row({rm.alpha, rm.margin});
    SeriesBundle bundle;
    bundle.add("bochner-per-ray", std::move(csv));
    if (series.empty())
        bundle.emit_all(rc.out_dir);
    else
        bundle.emit_plot_series(series, rc.out_dir);
    rep.check("forward", fwd.report);

    const auto corpus = build_density_corpus(*rc.seed, 204);
    GridSpec cgrid;
    cgrid.tolerance *= rc.tolerance_scale;
    const ConverseReport conv = bochner_converse(corpus, cgrid);
    rep.kv("converse.total", static_cast<double>(conv.total));
    rep.kv("converse.agreements", static_cast<double>(conv.agreements));
    for (const std::string& m : conv.mismatches) rep.kv("converse.mismatch", m);
    rep.write(rc.out_dir + "/bochner_report.txt");
    return (fwd.report.verdict && conv.all_agree()) ? 0 : kExitCheckFailure;
}

int cmd_split(const RunConfig& rc) {
    Report rep = start_report("needlelab split", rc);
    const ModelSpace space = rc.make_space();
    Disintegration dis(space, BaseDescriptor::line(rc.base_level), Region::all(),
                       rc.resolution);
    std::vector<Point> samples;
    for (int i = -3; i <= 3; ++i) {
        for (int j = -3; j <= 3; ++j) {
            Point p;
            p.c[0] = (space.kind() == SpaceKind::ProductLine)
                         ? 0.5 * (space.interval().a + space.interval().b) +
                               0.1 * i
                         : 0.8 * i;
            p.c[1] = 1.2 * j;
            samples.push_back(p);
        }
    }
    const CheckReport bz = check_b_zero(space, samples, 1e-4, rc.base_level);
    const CheckReport cr = check_constant_ray_densities(dis);
    const FactorizationResult fr = factorize(dis);
    rep.check("b_zero", bz);
    rep.check("constant_ray_densities", cr);
    rep.check("factorization", fr.report);
    export_factorization(fr, rc.out_dir + "/factorization.csv");
    rep.write(rc.out_dir + "/split_report.txt");
    return (bz.verdict && cr.verdict && fr.report.verdict) ? 0 : kExitCheckFailure;
}

int cmd_suite(const RunConfig& rc) {
    if (!rc.seed)
        throw std::invalid_argument("suite needs a seed for the density corpus");
    const SuiteResult suite = run_suite_with_determinism(
        *rc.seed, rc.out_dir, rc.tolerance_scale, rc.echo());
    for (const CriterionResult& c : suite.criteria)
        std::printf("[%s] %s: %s (%.2fs)\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.detail.c_str(), c.seconds);
    std::printf("suite: %s\n", suite.all_pass ? "all criteria pass" : "FAILURES");
    return suite.all_pass ? 0 : kExitCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"needlelab: transport-ray disintegrations and distance Laplacians"};
    std::string config_path, out_dir, command, series;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    double tol_scale = 1.0;

    app.add_option("command", command,
                   "coeffs|density-check|disintegrate|laplacian|compare|cutlocus|"
                   "bochner|split|suite");
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed for randomized corpora")
        ->each([&](const std::string&) { seed_set = true; });
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_option("--tolerance-scale", tol_scale, "scale factor on tolerances");
    app.add_option("--series", series,
                   "emit only the selected plot series (errors when unknown)");

    CLI11_PARSE(app, argc, argv);

    if (const char* env = std::getenv("NEEDLELAB_THREADS");
        env && !app.count("--threads"))
        threads = std::atoi(env);
    set_thread_count(threads);

    RunConfig rc;
    try {
        if (!config_path.empty())
            rc = RunConfig::from_config(KeyValueConfig::from_file(config_path));
        if (!command.empty()) rc.command = command;
        if (!out_dir.empty()) rc.out_dir = out_dir;
        if (seed_set) rc.seed = seed;
        rc.tolerance_scale *= tol_scale;
        std::filesystem::create_directories(rc.out_dir);

        if (rc.command == "coeffs") return cmd_coeffs(rc);
        if (rc.command == "density-check") return cmd_density_check(rc);
        if (rc.command == "disintegrate") return cmd_disintegrate(rc);
        if (rc.command == "laplacian") return cmd_laplacian(rc, series);
        if (rc.command == "compare") return cmd_compare(rc);
        if (rc.command == "cutlocus") return cmd_cutlocus(rc, series);
        if (rc.command == "bochner") return cmd_bochner(rc, series);
        if (rc.command == "split") return cmd_split(rc);
        if (rc.command == "suite") return cmd_suite(rc);
        throw std::invalid_argument("unknown command: " + rc.command);
    } catch (const std::invalid_argument& e) {
        write_error_report(rc.out_dir, e.what(), kExitConfigError);
        return kExitConfigError;
    } catch (const std::exception& e) {
        write_error_report(rc.out_dir, e.what(), kExitCheckFailure);
        return kExitCheckFailure;
    }
}
