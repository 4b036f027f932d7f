// ensemble.hpp: numerical minimum of the ensemble-averaged variance over
// pure-state decompositions of rho (the convex roof of the variance).

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "qsl/operator.hpp"

namespace qsl {

struct EnsembleOptions {
    std::size_t budget = 30000;  // total simplex iterations across restarts
    std::size_t restarts = 12;
    std::uint64_t seed = 0x5eed;
    /// Members per ensemble; 0 selects dim^2.
    std::size_t members = 0;
    /// Observes every objective evaluation (for soundness checks).
    std::function<void(double)> on_evaluate;
};

struct EnsembleResult {
    double value = 0.0;
    bool converged = false;  // two independent restarts reached the same minimum
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
};

/// min over ensembles {q_i, |phi_i>} of rho of sum_i q_i V_{phi_i}(H). Ensembles
/// are generated as |phi~_i> = sum_j U_ij sqrt(p_j) |j> over isometries U, with a
/// derivative-free simplex search from seeded random starts. Desk-scale only
/// (dim <= 6).
EnsembleResult min_ensemble_variance(const SpectralState& state, const HermitianOperator& h,
                                     const EnsembleOptions& options = {});

} // namespace qsl
