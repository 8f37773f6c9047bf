#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lagcoup/bounds/j_distribution.hpp"
#include "lagcoup/rng.hpp"
#include "lagcoup/runner/plan.hpp"

namespace lagcoup {

struct BatteryResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Randomized meeting-count distribution with a mix of shapes: diffuse tails,
// heavy first atoms, boundary cases with 2 p0 = 1 - p1 exactly, and short
// supports. Drives the dominance / equality / form-agreement batteries.
JDistribution random_j_distribution(RngStream& rng);

// Invariant suites runnable from the CLI:
//   dominance            new <= old + 1e-9 over n_dists random distributions
//   form agreement       the equivalent bound forms agree to 1e-12
//   equality condition   |new - old| < 1e-12 exactly when 2 p0 >= 1 - p1
//   forward/backward     the two estimator forms agree path-wise to 1e-12
//   faithfulness         frozen-partner marginal tests at the 0.001 level,
//                        diagonal absorption, maximal-coupling meet rates
//   geometric forms      closed form vs series to 1e-10 over a (p,k,L) grid
// When a plan is supplied its kernel parameters are validated as a further
// battery entry.
std::vector<BatteryResult> run_validation_battery(std::uint64_t seed,
                                                  const std::optional<ExperimentPlan>& plan);

} // namespace lagcoup
