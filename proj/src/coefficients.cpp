#include "needlelab/coefficients.hpp"

#include <cmath>
#include <cstdio>

namespace needlelab {

std::string ExtReal::str() const {
    if (infinite_) return "+inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value_);
    return buf;
}

double s_kappa(double kappa, double theta) {
    if (theta < 0.0) throw std::domain_error("s_kappa: theta must be >= 0");
    const double u = kappa * theta * theta;
    if (std::abs(u) < kFlatBranchCutoff) return theta;
    if (kappa > 0.0) {
        const double rk = std::sqrt(kappa);
        // the closed upper endpoint carries the continuous extension s = 0
        if (theta * rk > M_PI * (1.0 + 1e-12))
            throw std::domain_error("s_kappa: theta beyond pi/sqrt(kappa)");
        return std::sin(std::min(rk * theta, M_PI)) / rk;
    }
    const double rk = std::sqrt(-kappa);
    return std::sinh(rk * theta) / rk;
}

double s_kappa_prime(double kappa, double theta) {
    const double u = kappa * theta * theta;
    if (std::abs(u) < kFlatBranchCutoff) return 1.0;
    if (kappa > 0.0) return std::cos(std::sqrt(kappa) * theta);
    return std::cosh(std::sqrt(-kappa) * theta);
}

double s_ratio(double kappa, double theta) {
    if (theta <= 0.0) throw std::domain_error("s_ratio: theta must be > 0");
    const double u = kappa * theta * theta;
    if (std::abs(u) < kFlatBranchCutoff) return 1.0 / theta;
    if (kappa > 0.0) {
        const double rk = std::sqrt(kappa);
        return rk / std::tan(rk * theta);
    }
    const double rk = std::sqrt(-kappa);
    return rk / std::tanh(rk * theta);
}

double s_ratio_missing_endpoint(double kappa) {
    if (kappa > 0.0)
        throw std::domain_error("s_ratio_missing_endpoint: no infinite ray for kappa > 0");
    if (kappa == 0.0) return 0.0;
    return std::sqrt(-kappa);
}

ExtReal sigma_coeff(double K, double N, double t, double theta, SigmaBranch* branch) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("sigma_coeff: t outside [0,1]");
    if (theta < 0.0) throw std::invalid_argument("sigma_coeff: theta must be >= 0");
    if (N < 0.0) throw std::invalid_argument("sigma_coeff: N must be >= 0");

    const double u = K * theta * theta;
    const double flat = (N > 0.0) ? kFlatBranchCutoff * N : kFlatBranchCutoff;

    // Branch order follows the definition: the infinite branch wins ties.
    if (u >= N * M_PI * M_PI && !(std::abs(u) < flat && N > 0.0)) {
        if (branch) *branch = SigmaBranch::Infinite;
        return ExtReal::infinity();
    }
    if (std::abs(u) < flat || (u < 0.0 && N == 0.0)) {
        if (branch) *branch = SigmaBranch::Linear;
        return ExtReal(t);
    }
    if (u > 0.0) {
        if (branch) *branch = SigmaBranch::Trig;
        const double w = theta * std::sqrt(K / N);
        return ExtReal(std::sin(t * w) / std::sin(w));
    }
    if (branch) *branch = SigmaBranch::Hyperbolic;
    const double w = theta * std::sqrt(-K / N);
    return ExtReal(std::sinh(t * w) / std::sinh(w));
}

ExtReal tau_coeff(double K, double N, double t, double theta) {
    if (!(N > 1.0)) throw std::invalid_argument("tau_coeff: N must be > 1");
    SigmaBranch br;
    const ExtReal sig = sigma_coeff(K, N - 1.0, t, theta, &br);
    if (sig.is_infinite()) return ExtReal::infinity();
    // t^{1/N} t^{(N-1)/N} = t: return the exact value on the linear branch.
    if (br == SigmaBranch::Linear) return ExtReal(t);
    return ExtReal(std::pow(t, 1.0 / N) * std::pow(sig.value(), (N - 1.0) / N));
}

} // namespace needlelab
