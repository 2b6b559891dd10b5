#pragma once

#include <vector>

#include "needlelab/laplacian.hpp"

namespace needlelab {

/// Ratios m((X \ T_eps(X)) cap W) / eps along a decreasing eps sequence with
/// a Richardson-extrapolated limit estimate.
struct MinkowskiSeries {
    std::vector<double> eps_values;
    std::vector<double> ratios;
    Region window;
    double limit_estimate = 0.0;
    double excluded_q_mass = 0.0;  // endless / truncated rays, logged
    bool monotone_stable = false;  // |ratio_k - ratio_{k+1}| decreasing
};

/// Per-ray identity: X \ T_eps(X) meets X_alpha in the initial parameter
/// segment of length eps * |X_alpha|.
double minkowski_ratio(const Disintegration& dis, const Region& window,
                       double eps);

MinkowskiSeries minkowski_series(const Disintegration& dis, const Region& window,
                                 double eps0 = 0.25, int levels = 11);

/// limsup_{eps->0} m((X \ T_eps(X)) cap W)/eps <= ||[Delta d_p^2]_sing||(W).
CheckReport minkowski_vs_singular(const Disintegration& dis, const Region& window,
                                  double slack_frac = 0.02, double eps0 = 0.25,
                                  int levels = 11);

/// || int h_alpha(a) delta_a dq || <= liminf_r m(U_alpha [a, a+r]) / r.
CheckReport endpoint_tv_bound(const Disintegration& dis,
                              const std::vector<double>& r_sequence,
                              double tolerance = 1e-3);

} // namespace needlelab
