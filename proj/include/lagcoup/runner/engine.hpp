#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lagcoup/bounds/bounds.hpp"
#include "lagcoup/core/coupling.hpp"
#include "lagcoup/estimators/estimators.hpp"
#include "lagcoup/errors.hpp"
#include "lagcoup/rng.hpp"
#include "lagcoup/runner/parallel.hpp"
#include "lagcoup/runner/plan.hpp"

namespace lagcoup {

// Stream purposes: every (lag, replicate, q) work unit derives independent
// streams for the coupling run, the randomization coins, and post-meeting
// trace extension, so results do not depend on scheduling.
enum class StreamPurpose : std::uint64_t { trace = 1, xi = 2, extension = 3 };

inline RngStream make_stream(std::uint64_t master, long lag, long replicate, long q, StreamPurpose p) {
    return RngStream::from_key(master, {static_cast<std::uint64_t>(lag), static_cast<std::uint64_t>(replicate),
                                        static_cast<std::uint64_t>(q), static_cast<std::uint64_t>(p)});
}

template <class S>
struct NamedTestFunction {
    std::string name;
    TestFunction<S> fn;
};

namespace engine_detail {

// time indices at which meeting counts are needed: the bound grid plus every
// burn-in the estimator requests touch
inline std::vector<long> needed_time_indices(const ExperimentPlan& plan) {
    std::vector<long> ts = plan.k_grid.values();
    for (const auto& req : plan.estimators) {
        if (req.form == EstimatorForm::timeavg || req.form == EstimatorForm::timeavg_cv) {
            for (long t = req.k; t <= req.r; ++t) ts.push_back(t);
        } else {
            ts.push_back(req.k);
        }
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

inline std::size_t time_index_of(const std::vector<long>& ts, long t) {
    return static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
}

struct ReplicateOutput {
    // per summary (request x h), flattened per-process samples [q * dim + c]
    std::vector<std::vector<double>> est_samples;
    // per k-grid cell, the two Algorithm-style bound estimates
    std::vector<std::pair<double, double>> bound_hats;
    std::int64_t joint_steps = 0;
    double tau_sum = 0.0;
};

struct Accumulator {
    std::vector<BoundCell> cells;                      // lag-major, then k
    std::vector<std::vector<double>> cell_old_values;  // per cell, per replicate
    std::vector<std::vector<double>> cell_new_values;
    std::vector<EstimatorSummary> summaries;
    std::vector<std::vector<double>> sum;  // per summary, per coordinate
    std::vector<std::vector<double>> sum2;
    std::int64_t joint_steps = 0;
    double tau_sum = 0.0;
    long trace_count = 0;

    void finalize(RunSummary& out, const ExperimentPlan& plan) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            BoundCell& cell = cells[c];
            const auto& ov = cell_old_values[c];
            const auto& nv = cell_new_values[c];
            const auto n = static_cast<double>(ov.size());
            double om = 0.0, nm = 0.0;
            for (std::size_t i = 0; i < ov.size(); ++i) {
                om += ov[i];
                nm += nv[i];
            }
            om /= n;
            nm /= n;
            double os = 0.0, ns = 0.0;
            for (std::size_t i = 0; i < ov.size(); ++i) {
                os += (ov[i] - om) * (ov[i] - om);
                ns += (nv[i] - nm) * (nv[i] - nm);
            }
            cell.old_mean = om;
            cell.new_mean = nm;
            cell.old_sd = ov.size() > 1 ? std::sqrt(os / (n - 1.0)) : 0.0;
            cell.new_sd = nv.size() > 1 ? std::sqrt(ns / (n - 1.0)) : 0.0;
            cell.processes = plan.processes;
            cell.replicates = static_cast<int>(ov.size());
            cell.vacuous = cell.new_mean > 1.0;
            out.bounds.push_back(cell);
        }
        for (std::size_t s = 0; s < summaries.size(); ++s) {
            EstimatorSummary& es = summaries[s];
            const double n = static_cast<double>(es.n_samples);
            es.grand_mean.resize(es.dim);
            es.variance.resize(es.dim);
            es.mc_se.resize(es.dim);
            for (std::size_t c = 0; c < es.dim; ++c) {
                const double m = sum[s][c] / n;
                es.grand_mean[c] = m;
                const double v = es.n_samples > 1 ? std::max(0.0, (sum2[s][c] - n * m * m) / (n - 1.0)) : 0.0;
                es.variance[c] = v;
                es.mc_se[c] = std::sqrt(v / n);
            }
            out.estimators.push_back(std::move(es));
        }
        out.total_joint_steps = joint_steps;
        out.mean_tau = trace_count > 0 ? tau_sum / static_cast<double>(trace_count) : 0.0;
    }
};

} // namespace engine_detail

// Core engine: runs plan.replicates x plan.processes lagged couplings per lag,
// derives meeting counts and leave-one-out medians, evaluates the requested
// estimators on extended traces, and forms the per-replicate bound estimates.
// Identical plans and master seeds produce identical summaries for any thread
// count: every work unit owns derived streams and writes into its own slot,
// and aggregation walks slots in a fixed order.
template <CoupledKernelType K>
RunSummary run_kernel_plan(const K& kernel,
                           const std::function<typename K::state_type(RngStream&)>& initial,
                           const std::vector<NamedTestFunction<typename K::state_type>>& hs,
                           const ExperimentPlan& plan, int threads) {
    using S = typename K::state_type;
    using namespace engine_detail;
    plan.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const std::vector<long> k_values = plan.k_grid.values();
    const std::vector<long> ts = needed_time_indices(plan);
    const long q_count = plan.processes;
    const long rep_count = plan.replicates;

    const std::size_t n_summaries = plan.estimators.size() * hs.size();

    RunSummary out;
    out.processes = plan.processes;
    out.replicates = plan.replicates;
    out.master_seed = plan.master_seed;

    Accumulator acc;
    acc.summaries.resize(n_summaries);
    acc.sum.resize(n_summaries);
    acc.sum2.resize(n_summaries);
    {
        std::size_t s = 0;
        for (const auto& req : plan.estimators)
            for (const auto& h : hs) {
                acc.summaries[s].request = req;
                acc.summaries[s].h_name = h.name;
                ++s;
            }
    }

    // Algorithm-style bound estimation needs a cross-process median, so the
    // bound grid is only evaluated with at least two processes.
    const bool bounds_enabled = q_count >= 2;

    for (const long lag : plan.lags) {
        // one block of cells per lag, k-major
        const std::size_t cell_base = acc.cells.size();
        if (bounds_enabled) {
            for (const long k : k_values) {
                BoundCell cell;
                cell.k = k;
                cell.lag = lag;
                acc.cells.push_back(cell);
                acc.cell_old_values.emplace_back();
                acc.cell_new_values.emplace_back();
            }
        }

        const long wave = std::max<long>(1, std::min<long>(rep_count, 4 * std::max(1, threads)));
        for (long rep0 = 0; rep0 < rep_count; rep0 += wave) {
            const long reps_here = std::min<long>(wave, rep_count - rep0);

            // phase A: all couplings of the wave in parallel
            std::vector<CoupledTrace<S>> traces(static_cast<std::size_t>(reps_here * q_count));
            parallel_for(static_cast<std::size_t>(reps_here * q_count), threads, [&](std::size_t i) {
                const long rep = rep0 + static_cast<long>(i) / q_count;
                const long q = static_cast<long>(i) % q_count;
                RngStream rng = make_stream(plan.master_seed, lag, rep, q, StreamPurpose::trace);
                LagConfig<S> cfg;
                cfg.lag = lag;
                cfg.max_sweeps = plan.max_sweeps;
                cfg.initial_distribution = initial;
                try {
                    traces[i] = run_lagged_coupling(kernel, cfg, rng);
                } catch (const CapExceeded& e) {
                    throw CapExceeded(std::string(e.what()) + " (lag " + std::to_string(lag) +
                                      ", replicate " + std::to_string(rep) + ", process " +
                                      std::to_string(q) + ")");
                }
            });

            // phase B: per-replicate statistics, medians, extension, estimators
            std::vector<ReplicateOutput> outs(static_cast<std::size_t>(reps_here));
            parallel_for(static_cast<std::size_t>(reps_here), threads, [&](std::size_t ri) {
                const long rep = rep0 + static_cast<long>(ri);
                ReplicateOutput& ro = outs[ri];
                auto* trace_row = traces.data() + static_cast<std::size_t>(ri) * q_count;

                // meeting counts and their randomized companions, coins drawn
                // in ascending time order from each process's xi stream
                std::vector<std::vector<MeetingStats>> stats(ts.size(),
                                                             std::vector<MeetingStats>(q_count));
                for (long q = 0; q < q_count; ++q) {
                    RngStream xi = make_stream(plan.master_seed, lag, rep, q, StreamPurpose::xi);
                    for (std::size_t ti = 0; ti < ts.size(); ++ti)
                        stats[ti][static_cast<std::size_t>(q)] =
                            meeting_stats(trace_row[q], ts[ti], xi);
                }

                // leave-one-out medians per time index
                std::vector<std::vector<long>> medians(ts.size());
                if (q_count >= 2) {
                    std::vector<long> jt(static_cast<std::size_t>(q_count));
                    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
                        for (long q = 0; q < q_count; ++q)
                            jt[static_cast<std::size_t>(q)] = stats[ti][static_cast<std::size_t>(q)].j_tilde;
                        medians[ti] = loo_medians_all(jt);
                    }
                }

                // how far the estimator reads reach
                long horizon = -1;
                for (const auto& req : plan.estimators) {
                    horizon = std::max(horizon, req.k);
                    if (req.form == EstimatorForm::timeavg || req.form == EstimatorForm::timeavg_cv)
                        horizon = std::max(horizon, req.r);
                    if (req.form == EstimatorForm::single_cv || req.form == EstimatorForm::timeavg_cv) {
                        const long t_hi = req.form == EstimatorForm::single_cv ? req.k : req.r;
                        for (long t = req.k; t <= t_hi; ++t) {
                            const auto ti = time_index_of(ts, t);
                            for (long q = 0; q < q_count; ++q) {
                                const long m = medians[ti][static_cast<std::size_t>(q)];
                                if (m >= 0) horizon = std::max(horizon, t + m * lag);
                            }
                        }
                    }
                }
                if (horizon >= 0) {
                    for (long q = 0; q < q_count; ++q) {
                        if (trace_row[q].y_len() <= horizon) {
                            RngStream ext =
                                make_stream(plan.master_seed, lag, rep, q, StreamPurpose::extension);
                            extend_trace(trace_row[q], kernel, horizon, ext);
                        }
                    }
                }

                // estimator samples, one evaluated-h cache per (trace, h)
                ro.est_samples.resize(n_summaries);
                if (!plan.estimators.empty()) {
                    for (long q = 0; q < q_count; ++q) {
                        for (std::size_t hi = 0; hi < hs.size(); ++hi) {
                            const EvaluatedTrace ev = EvaluatedTrace::from(trace_row[q], hs[hi].fn);
                            for (std::size_t ri2 = 0; ri2 < plan.estimators.size(); ++ri2) {
                                const auto& req = plan.estimators[ri2];
                                std::vector<double> val;
                                switch (req.form) {
                                    case EstimatorForm::forward:
                                        val = detail::forward_core(ev, req.k);
                                        break;
                                    case EstimatorForm::backward:
                                        val = detail::backward_core(ev, req.k);
                                        break;
                                    case EstimatorForm::single_cv: {
                                        const auto ti = time_index_of(ts, req.k);
                                        val = detail::cv_single_core(
                                            ev, req.k, medians[ti][static_cast<std::size_t>(q)]);
                                        break;
                                    }
                                    case EstimatorForm::timeavg:
                                        val = detail::timeavg_core(ev, req.k, req.r);
                                        break;
                                    case EstimatorForm::timeavg_cv: {
                                        std::vector<long> ms(static_cast<std::size_t>(req.r - req.k + 1));
                                        for (long t = req.k; t <= req.r; ++t)
                                            ms[static_cast<std::size_t>(t - req.k)] =
                                                medians[time_index_of(ts, t)][static_cast<std::size_t>(q)];
                                        val = detail::timeavg_cv_core(ev, req.k, req.r, ms);
                                        break;
                                    }
                                }
                                auto& sink = ro.est_samples[ri2 * hs.size() + hi];
                                sink.insert(sink.end(), val.begin(), val.end());
                            }
                        }
                    }
                }

                // per-replicate bound estimates over the k grid
                if (q_count >= 2) {
                    ro.bound_hats.reserve(k_values.size());
                    for (const long k : k_values) {
                        const auto ti = time_index_of(ts, k);
                        const auto eb = empirical_bounds(stats[ti], medians[ti]);
                        ro.bound_hats.emplace_back(eb.old_hat, eb.new_hat);
                    }
                }

                for (long q = 0; q < q_count; ++q) {
                    ro.joint_steps += *trace_row[q].tau - lag;
                    ro.tau_sum += static_cast<double>(*trace_row[q].tau);
                }
            });

            // sequential merge in replicate order
            for (long ri = 0; ri < reps_here; ++ri) {
                const ReplicateOutput& ro = outs[static_cast<std::size_t>(ri)];
                if (bounds_enabled) {
                    for (std::size_t c = 0; c < k_values.size(); ++c) {
                        acc.cell_old_values[cell_base + c].push_back(ro.bound_hats[c].first);
                        acc.cell_new_values[cell_base + c].push_back(ro.bound_hats[c].second);
                    }
                }
                for (std::size_t s = 0; s < n_summaries; ++s) {
                    const auto& samples = ro.est_samples[s];
                    auto& summary = acc.summaries[s];
                    if (summary.dim == 0 && !samples.empty())
                        summary.dim = samples.size() / static_cast<std::size_t>(q_count);
                    if (acc.sum[s].size() != summary.dim) {
                        acc.sum[s].assign(summary.dim, 0.0);
                        acc.sum2[s].assign(summary.dim, 0.0);
                    }
                    const std::size_t dim = summary.dim;
                    for (std::size_t i = 0; i < samples.size(); ++i) {
                        acc.sum[s][i % dim] += samples[i];
                        acc.sum2[s][i % dim] += samples[i] * samples[i];
                    }
                    summary.n_samples += static_cast<long>(samples.size() / std::max<std::size_t>(dim, 1));
                    if (plan.keep_samples)
                        summary.samples.insert(summary.samples.end(), samples.begin(), samples.end());
                }
                acc.joint_steps += ro.joint_steps;
                acc.tau_sum += ro.tau_sum;
                acc.trace_count += q_count;
            }
        }
    }

    acc.finalize(out, plan);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

} // namespace lagcoup
