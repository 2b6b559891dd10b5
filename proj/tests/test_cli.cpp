#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string cli_path() {
    const char* p = std::getenv("NEEDLELAB_CLI");
    return p ? p : "";
}

int run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_config(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

} // namespace

TEST_CASE("coeffs command emits the flat table") {
    REQUIRE_FALSE(cli_path().empty());
    write_config("cli_flat.cfg", "space.K = 0\nspace.N = 2\n");
    CHECK(run("coeffs --config cli_flat.cfg --out cli_out_coeffs") == 0);

    std::ifstream csv("cli_out_coeffs/coeffs.csv");
    REQUIRE(csv.good());
    std::string line;
    std::getline(csv, line);  // header
    int rows = 0;
    while (std::getline(csv, line)) {
        double t, theta, sigma, tau;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &theta, &sigma,
                            &tau) == 4);
        CHECK(sigma == t);
        CHECK(tau == t);
        ++rows;
    }
    CHECK(rows > 100);
}

TEST_CASE("malformed configuration exits with code 2") {
    REQUIRE_FALSE(cli_path().empty());
    write_config("cli_bad.cfg", "space.kind = banana\n");
    CHECK(run("laplacian --config cli_bad.cfg --out cli_out_bad") == 2);
    const std::string err = slurp("cli_out_bad/error_report.txt");
    CHECK(err.find("error.code = 2") != std::string::npos);

    write_config("cli_bad2.cfg", "space.K = not_a_number\n");
    CHECK(run("laplacian --config cli_bad2.cfg --out cli_out_bad2") == 2);
}

TEST_CASE("laplacian run matches the sphere oracle and is thread-deterministic") {
    REQUIRE_FALSE(cli_path().empty());
    write_config("cli_sphere.cfg",
                 "space.kind = space_form\n"
                 "space.N = 2\n"
                 "space.K = 1\n"
                 "base.variant = point\n"
                 "resolution.rays = 128\n");
    CHECK(run("laplacian --config cli_sphere.cfg --out cli_out_a --threads 1") == 0);
    CHECK(run("laplacian --config cli_sphere.cfg --out cli_out_b --threads 4") == 0);

    const std::string a = slurp("cli_out_a/laplacian_report.txt");
    const std::string b = slurp("cli_out_b/laplacian_report.txt");
    REQUIRE_FALSE(a.empty());
    CHECK(a == b);
    CHECK(slurp("cli_out_a/regular-vs-oracle.csv") ==
          slurp("cli_out_b/regular-vs-oracle.csv"));
    CHECK(a.find("format_version = 1") != std::string::npos);

    // the emitted series matches cot within 1e-6
    std::ifstream csv("cli_out_a/regular-vs-oracle.csv");
    std::string line;
    std::getline(csv, line);
    int rows = 0;
    while (std::getline(csv, line)) {
        double u, reg, oracle;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &u, &reg, &oracle) == 3);
        if (u > 0.1 && u < M_PI - 0.1) CHECK(std::abs(reg - oracle) < 1e-6);
        ++rows;
    }
    CHECK(rows > 100);
}

TEST_CASE("plot series selector") {
    REQUIRE_FALSE(cli_path().empty());
    write_config("cli_series.cfg",
                 "space.kind = space_form\nspace.N = 2\nspace.K = 1\n"
                 "base.variant = point\nresolution.rays = 64\n");
    CHECK(run("laplacian --config cli_series.cfg --out cli_out_series "
              "--series regular-vs-oracle") == 0);
    CHECK(slurp("cli_out_series/regular-vs-oracle.csv").rfind("u,regular,oracle", 0) ==
          0);
    // unselected series are not written, unknown selectors are config errors
    CHECK(slurp("cli_out_series/atoms.csv").empty());
    CHECK(run("laplacian --config cli_series.cfg --out cli_out_series2 "
              "--series nonsense") == 2);
}

TEST_CASE("bochner command requires a seed") {
    REQUIRE_FALSE(cli_path().empty());
    write_config("cli_sphere2.cfg",
                 "space.kind = space_form\nspace.N = 2\nspace.K = 1\n"
                 "resolution.rays = 64\n");
    CHECK(run("bochner --config cli_sphere2.cfg --out cli_out_seedless") == 2);
}
