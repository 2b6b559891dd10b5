#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "needlelab/density1d.hpp"
#include "needlelab/disintegration.hpp"

namespace needlelab {

struct BochnerSampleSpec {
    int ray_stride = 32;       // q-subsample of rays
    GridSpec grid;             // per-ray (x, t) sweep
    BochnerSampleSpec() {
        // (log h)' blows up at sin-type endpoints; keep the sweep a solid
        // margin away so the squared integrand stays quadrature-friendly
        grid.edge_frac = 0.02;
    }
};

struct RayMargin {
    double alpha;
    double margin;
};

struct BochnerForwardReport {
    CheckReport report;
    std::vector<RayMargin> per_ray;  // worst margin per sampled ray
};

/// Integrated (K,N)-Bochner inequality along the rays of a disintegration:
/// Delta u(g_t(x)) - Delta u(x) >= K t + 1/(N-1) int (Delta u)^2, checked
/// on each sampled ray density; for signed-distance bases (x, g_t(x)) must
/// lie on the same side of the zero level.
BochnerForwardReport bochner_forward(const Disintegration& dis,
                                     const CurvatureDim& kd,
                                     const BochnerSampleSpec& spec = {});

struct CorpusEntry {
    Density1D density;
    CurvatureDim kd;
    std::string label;
};

/// Seeded density corpus: catalog closed forms plus log-perturbations
/// log h = log h0 + a sum_k c_k sin(k pi x / D) at three amplitudes,
/// calibrated so that roughly half the corpus violates CD.
std::vector<CorpusEntry> build_density_corpus(std::uint64_t seed,
                                              int target_count = 204);

struct ConverseReport {
    int total = 0;
    int agreements = 0;
    int cd_passes = 0;
    std::vector<std::string> mismatches;
    bool all_agree() const { return agreements == total; }
};

/// Classifier equivalence on a corpus: ray-Bochner grid pass iff CD pass.
ConverseReport bochner_converse(const std::vector<CorpusEntry>& corpus,
                                const GridSpec& grid = {});

} // namespace needlelab
