#pragma once

#include <limits>
#include <string>
#include <vector>

namespace needlelab {

// Scale floor for relative margins: (lhs - rhs) / (|rhs| + kMarginFloor).
inline constexpr double kMarginFloor = 1e-12;

inline double relative_margin(double lhs, double rhs) {
    return (lhs - rhs) / (std::abs(rhs) + kMarginFloor);
}

/// Outcome of one certified inequality: verdict, worst signed margin
/// (negative = violation), the witness input tuple, tolerance, and a
/// description of the test grid.  Ties at the tolerance boundary pass.
struct CheckReport {
    bool verdict = true;
    double worst_violation = std::numeric_limits<double>::infinity();
    std::vector<double> witness;
    std::string witness_note;
    double tolerance = 0.0;
    std::string grid_spec;
    std::string detail;

    void record(double margin, std::initializer_list<double> w,
                const char* note = "") {
        if (margin < worst_violation) {
            worst_violation = margin;
            witness.assign(w);
            witness_note = note;
        }
    }

    void finalize() { verdict = worst_violation >= -tolerance; }
};

} // namespace needlelab
