#pragma once

#include <string>
#include <vector>

#include "needlelab/disintegration.hpp"

namespace needlelab {

/// One Busemann evaluation: value at truncation T plus the doubling Cauchy
/// certificate |value(T) - value(T/2)|.
struct BusemannValue {
    double value = 0.0;
    double cauchy_gap = 0.0;
    double T = 0.0;
    bool converged = false;
};

/// b(x) = d(x, gamma_T) - T for the forward line (T > 0) or the backward one
/// (pass T < 0 to probe gamma_{-|T|}); validates the line on samples.
BusemannValue busemann(const ModelSpace& space, const Point& x, double T,
                       double line_offset = 0.0);

/// Doubling schedule: T doubles until the Cauchy gap drops below gap_tol or
/// T exceeds the cap (then converged = false).
BusemannValue busemann_certified(const ModelSpace& space, const Point& x,
                                 bool forward, double line_offset = 0.0,
                                 double T0 = 64.0, double gap_tol = 1e-6,
                                 double T_cap = 1e6);

/// max |b+ + b-| over the sample set at the certified truncations.
CheckReport check_b_zero(const ModelSpace& space, const std::vector<Point>& samples,
                         double tolerance = 1e-4, double line_offset = 0.0);

/// Line rays must be endless and carry constant densities (relative spread
/// (max-min)/mean per ray below tolerance); half-infinite rays flag failure
/// of the splitting hypothesis.  Includes the flat rigidity-window check.
CheckReport check_constant_ray_densities(const Disintegration& dis,
                                         double tolerance = 1e-6);

struct FactorizationRow {
    double alpha;
    double b_plus;    // representative u at window center
    double c_alpha;   // per-ray constant density estimate
};

struct FactorizationResult {
    CheckReport report;            // product-measure residual check
    std::vector<FactorizationRow> rows;
    double worst_residual = 0.0;
    bool injective_on_samples = false;
    bool continuous_on_samples = false;
};

/// Phi(x) = (alpha(x), b+(x)); verifies Phi_# m = q' tensor L^1 over a
/// rectangle family, with m from the closed-form oracle and q'(C) =
/// int_C c_alpha dq from the ray machinery (exact partial-cell clipping).
FactorizationResult factorize(const Disintegration& dis, int n_alpha = 32,
                              int n_u = 32, double tolerance = 1e-4);

void export_factorization(const FactorizationResult& fr, const std::string& path);

} // namespace needlelab
