#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include "lagcoup/cli/config.hpp"

namespace lagcoup {

struct CommandOptions {
    std::optional<std::uint64_t> seed_override;
    std::optional<std::filesystem::path> out_override;
    int threads = 1;
};

// Exit statuses: 0 success, 1 validation/config failure, 2 runtime error.
// Config and runtime errors are thrown (ConfigError, CapExceeded, ...); the
// returned status covers in-band failures such as a failing battery entry.

// Writes <prefix>_bounds.csv with both TV bounds per (k, L). Exact values for
// the geometric and discrete families (the discrete CSV gains a tv_exact
// column); Monte Carlo estimates for the sampled kernels.
int cmd_bounds(const Config& config, const CommandOptions& opts, std::ostream& log);

// Runs the estimator requests; writes <prefix>_estimates.csv, <prefix>_rrv.csv
// for the paired plain/control-variate requests, and <prefix>_summary.json.
int cmd_estimate(const Config& config, const CommandOptions& opts, std::ostream& log);

// Runs the invariant batteries and prints a pass/fail table.
int cmd_validate(const Config& config, const CommandOptions& opts, std::ostream& log);

// Closed-form vs Monte Carlo comparison for the geometric family; writes
// <prefix>_geometric.csv.
int cmd_geometric(const Config& config, const CommandOptions& opts, std::ostream& log);

} // namespace lagcoup
