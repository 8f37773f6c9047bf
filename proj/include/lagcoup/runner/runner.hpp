#pragma once

#include <vector>

#include "lagcoup/runner/plan.hpp"

namespace lagcoup {

// Builds the kernel named by the plan, resolves its test functions, and runs
// the full pipeline. Deterministic for a fixed plan and master seed under any
// thread count. CapExceeded propagates with (lag, replicate, process)
// provenance; the geometric family rejects estimator requests.
RunSummary execute(const ExperimentPlan& plan, int threads = 1);

// Relative reduction in variance per h-coordinate between a paired plain/CV
// summary from the same run: Var(cv) / Var(plain). Throws ZeroVariance when
// the plain estimator is degenerate, and PlanInvalid when the pair does not
// share (k, r, h) or trace sets.
std::vector<double> rrv(const RunSummary& summary, std::size_t plain_index, std::size_t cv_index);

// Closed-form vs Monte Carlo comparison row for the analytic coupling-time
// family at one (p, k, L) cell.
struct GeometricComparisonRow {
    double p = 0.0;
    long k = 0;
    long lag = 1;
    double old_closed = 0.0;
    double new_closed = 0.0;
    double old_hat = 0.0; // replicate mean of the empirical estimate
    double new_hat = 0.0;
    double old_se = 0.0; // replicate standard error
    double new_se = 0.0;
    int processes = 0;
    int replicates = 0;
};

// Runs the injection pipeline for a geometric plan and joins the empirical
// cells with the closed forms.
std::vector<GeometricComparisonRow> geometric_comparison(const ExperimentPlan& plan, int threads = 1);

} // namespace lagcoup
