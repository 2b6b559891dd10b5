#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "needlelab/report.hpp"

namespace needlelab {

struct CriterionResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct SuiteResult {
    std::vector<CriterionResult> criteria;
    bool all_pass = true;
    std::string report_text;
};

/// Full verification battery; deterministic given (seed, tolerance_scale),
/// independent of the worker count.  When out_dir is nonempty the report and
/// plot CSVs are written there.
SuiteResult run_suite(std::uint64_t seed, const std::string& out_dir,
                      double tolerance_scale = 1.0,
                      const std::string& config_echo = "");

/// Runs the suite twice with different worker counts and appends the
/// byte-identity criterion to the result.
SuiteResult run_suite_with_determinism(std::uint64_t seed,
                                       const std::string& out_dir,
                                       double tolerance_scale = 1.0,
                                       const std::string& config_echo = "");

} // namespace needlelab
