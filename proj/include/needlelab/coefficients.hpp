#pragma once

#include <stdexcept>

#include "needlelab/ext_real.hpp"

namespace needlelab {

/// Curvature lower bound K and dimension upper bound N, N strictly > 1.
struct CurvatureDim {
    double K = 0.0;
    double N = 2.0;

    CurvatureDim() = default;
    CurvatureDim(double k, double n) : K(k), N(n) {
        if (!(N > 1.0)) throw std::invalid_argument("CurvatureDim: N must be > 1");
    }

    double kappa() const { return K / (N - 1.0); }
};

// Relative threshold below which |kappa|*theta^2 (or |K|theta^2/N) is treated
// as exactly zero.  Kills the 0/0 of the trig branches near flat curvature.
inline constexpr double kFlatBranchCutoff = 1e-12;

/// Model Jacobi amplitude s_kappa: sin(sqrt(k)t)/sqrt(k), t, sinh(sqrt(-k)t)/sqrt(-k).
/// Domain for kappa > 0 is theta < pi/sqrt(kappa).
double s_kappa(double kappa, double theta);

/// Derivative s_kappa': cos / 1 / cosh.
double s_kappa_prime(double kappa, double theta);

/// The logarithmic-derivative kernel s_kappa'(theta)/s_kappa(theta).
double s_ratio(double kappa, double theta);

/// Limit of s_ratio(kappa, d) as d -> +infinity, used when a transport ray
/// has no finite endpoint: 0 for kappa = 0 and sqrt(-kappa) for kappa < 0.
/// kappa > 0 admits no infinite ray and is rejected.
double s_ratio_missing_endpoint(double kappa);

/// Which branch of the sigma coefficient fired; the K=0 branch is exact
/// (no trig evaluation) so downstream algebra can stay bit-exact.
enum class SigmaBranch { Infinite, Trig, Linear, Hyperbolic };

/// Four-branch distortion coefficient sigma_{K,N}^{(t)}(theta).
/// N >= 0 real, t in [0,1], theta >= 0.
ExtReal sigma_coeff(double K, double N, double t, double theta,
                    SigmaBranch* branch = nullptr);

/// tau_{K,N}^{(t)}(theta) = t^{1/N} * sigma_{K,N-1}^{(t)}(theta)^{(N-1)/N}.
/// When the inner sigma lands on the linear branch the result is exactly t.
ExtReal tau_coeff(double K, double N, double t, double theta);

} // namespace needlelab
