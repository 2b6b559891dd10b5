#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace needlelab {

/// Composite Simpson rule with a fixed (even) number of panels.
template <typename F>
double simpson(F&& f, double a, double b, int panels) {
    if (panels < 2) panels = 2;
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < panels; i += 2) odd += f(a + i * h);
    for (int i = 2; i < panels; i += 2) even += f(a + i * h);
    return (h / 3.0) * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

/// Default resolution: >= 1024 Simpson panels per unit length.
inline int panels_for(double length, int per_unit = 1024, int min_panels = 64) {
    double want = std::ceil(std::abs(length) * per_unit);
    if (want < min_panels) want = min_panels;
    if (want > 2'000'000.0) want = 2'000'000.0;
    int n = static_cast<int>(want);
    return n + (n % 2);
}

/// Fixed-order compensated (Neumaier) accumulator; deterministic regardless
/// of the thread count as long as values are fed in index order.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Richardson extrapolation through three samples f(e), f(e/2), f(e/4) of a
/// quantity with expansion f(e) = L + c1 e + c2 e^2 + O(e^3): returns the
/// O(e^3)-accurate estimate of L.
inline double richardson3(double f1, double f2, double f4) {
    // Eliminate the linear term pairwise, then the quadratic one.
    const double g1 = 2.0 * f2 - f1;   // L - (1/2) c2 e^2 + ...
    const double g2 = 2.0 * f4 - f2;   // L - (1/8) c2 e^2 + ...
    return (4.0 * g2 - g1) / 3.0;
}

} // namespace needlelab
