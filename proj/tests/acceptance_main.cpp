// Acceptance battery: one pass/fail line per criterion, nonzero exit on any
// failure.  Run directly or through ctest.

#include <cstdio>
#include <filesystem>

#include "needlelab/acceptance.hpp"
#include "needlelab/parallel.hpp"

int main() {
    needlelab::set_thread_count(0);  // hardware; results are count-independent
    std::filesystem::create_directories("acceptance_out");
    const needlelab::SuiteResult suite =
        needlelab::run_suite_with_determinism(20240817ULL, "acceptance_out");

    for (const needlelab::CriterionResult& c : suite.criteria)
        std::printf("[%s] %s: %s (%.2fs)\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.detail.c_str(), c.seconds);
    std::printf("%s\n", suite.all_pass ? "acceptance: all criteria pass"
                                       : "acceptance: FAILURES present");
    return suite.all_pass ? 0 : 1;
}
