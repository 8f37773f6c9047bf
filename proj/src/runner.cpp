#include "lagcoup/runner/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>

#include "lagcoup/bounds/geometric.hpp"
#include "lagcoup/kernels/targets.hpp"
#include "lagcoup/runner/engine.hpp"

namespace lagcoup {

const char* estimator_form_name(EstimatorForm f) {
    switch (f) {
        case EstimatorForm::forward: return "forward";
        case EstimatorForm::backward: return "backward";
        case EstimatorForm::single_cv: return "single_cv";
        case EstimatorForm::timeavg: return "timeavg";
        case EstimatorForm::timeavg_cv: return "timeavg_cv";
    }
    return "?";
}

std::optional<EstimatorForm> estimator_form_from_name(const std::string& name) {
    if (name == "forward") return EstimatorForm::forward;
    if (name == "backward") return EstimatorForm::backward;
    if (name == "single_cv") return EstimatorForm::single_cv;
    if (name == "timeavg") return EstimatorForm::timeavg;
    if (name == "timeavg_cv") return EstimatorForm::timeavg_cv;
    return std::nullopt;
}

const char* kernel_family_name(const KernelSpec& spec) {
    return std::visit(
        [](const auto& s) -> const char* {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DiscreteKernelSpec>) return "discrete";
            else if constexpr (std::is_same_v<T, RwmKernelSpec>) return "rwm";
            else if constexpr (std::is_same_v<T, GibbsGaussianKernelSpec>) return "gibbs_gaussian";
            else if constexpr (std::is_same_v<T, IsingKernelSpec>) return "ising";
            else return "geometric";
        },
        spec);
}

void ExperimentPlan::validate() const {
    if (lags.empty()) throw PlanInvalid("at least one lag required");
    for (long lag : lags) {
        if (lag < 1) throw PlanInvalid("lags must be >= 1");
        if (max_sweeps <= lag) throw PlanInvalid("max_sweeps must exceed every lag");
    }
    if (k_grid.values().empty()) throw PlanInvalid("k grid is empty");
    if (k_grid.start < 0) throw PlanInvalid("k grid must be nonnegative");
    if (processes < 1) throw PlanInvalid("processes must be >= 1");
    if (replicates < 1) throw PlanInvalid("replicates must be >= 1");
    bool wants_cv = false;
    for (const auto& req : estimators) {
        if (req.k < 0) throw PlanInvalid("estimator k must be nonnegative");
        const bool ranged =
            req.form == EstimatorForm::timeavg || req.form == EstimatorForm::timeavg_cv;
        if (ranged && req.r < req.k) throw PlanInvalid("estimator r must be >= k");
        if (req.form == EstimatorForm::single_cv || req.form == EstimatorForm::timeavg_cv)
            wants_cv = true;
    }
    if (wants_cv && processes < 2)
        throw PlanInvalid("control-variate estimators need at least 2 processes");
    if (std::holds_alternative<GeometricInjectSpec>(kernel)) {
        if (!estimators.empty())
            throw PlanInvalid("the geometric family has no paths; estimators unavailable");
        if (processes < 2) throw PlanInvalid("the geometric family estimates bounds; need Q >= 2");
    }
}

namespace {

std::vector<NamedTestFunction<long>> discrete_h(const std::vector<std::string>& names,
                                                std::size_t n_states) {
    std::vector<NamedTestFunction<long>> out;
    for (const auto& name : names) {
        if (name == "identity") {
            out.push_back({name, [](const long& s) { return std::vector<double>{static_cast<double>(s)}; }});
        } else if (name.rfind("indicator:", 0) == 0) {
            const long target = std::stol(name.substr(10));
            if (target < 0 || target >= static_cast<long>(n_states))
                throw PlanInvalid("indicator state out of range: " + name);
            out.push_back({name, [target](const long& s) {
                               return std::vector<double>{s == target ? 1.0 : 0.0};
                           }});
        } else if (name == "indicator_each") {
            out.push_back({name, [n_states](const long& s) {
                               std::vector<double> v(n_states, 0.0);
                               v[static_cast<std::size_t>(s)] = 1.0;
                               return v;
                           }});
        } else {
            throw PlanInvalid("unknown test function for discrete kernels: " + name);
        }
    }
    return out;
}

std::vector<NamedTestFunction<std::vector<double>>> vector_h(const std::vector<std::string>& names) {
    std::vector<NamedTestFunction<std::vector<double>>> out;
    for (const auto& name : names) {
        if (name == "coordinates") {
            out.push_back({name, [](const std::vector<double>& s) { return s; }});
        } else if (name == "squares") {
            out.push_back({name, [](const std::vector<double>& s) {
                               std::vector<double> v(s.size());
                               for (std::size_t i = 0; i < s.size(); ++i) v[i] = s[i] * s[i];
                               return v;
                           }});
        } else {
            throw PlanInvalid("unknown test function for continuous kernels: " + name);
        }
    }
    return out;
}

std::vector<NamedTestFunction<std::vector<std::int8_t>>> ising_h(const std::vector<std::string>& names) {
    std::vector<NamedTestFunction<std::vector<std::int8_t>>> out;
    for (const auto& name : names) {
        if (name == "magnetization") {
            out.push_back({name, [](const std::vector<std::int8_t>& s) {
                               return std::vector<double>{IsingSsgKernel::magnetization(s)};
                           }});
        } else {
            throw PlanInvalid("unknown test function for the ising kernel: " + name);
        }
    }
    return out;
}

RunSummary run_geometric_plan(const GeometricInjectSpec& spec, const ExperimentPlan& plan, int threads) {
    using namespace engine_detail;
    const auto t_start = std::chrono::steady_clock::now();
    if (!(spec.p > 0.0) || !(spec.p <= 1.0)) throw PlanInvalid("geometric p must lie in (0, 1]");

    const auto k_values = plan.k_grid.values();
    const long q_count = plan.processes;
    const long rep_count = plan.replicates;

    RunSummary out;
    out.processes = plan.processes;
    out.replicates = plan.replicates;
    out.master_seed = plan.master_seed;

    for (const long lag : plan.lags) {
        std::vector<std::vector<double>> old_vals(k_values.size());
        std::vector<std::vector<double>> new_vals(k_values.size());
        for (auto& v : old_vals) v.reserve(static_cast<std::size_t>(rep_count));
        for (auto& v : new_vals) v.reserve(static_cast<std::size_t>(rep_count));

        std::vector<std::vector<std::pair<double, double>>> hats(
            static_cast<std::size_t>(rep_count));
        std::vector<double> tau_sums(static_cast<std::size_t>(rep_count), 0.0);
        parallel_for(static_cast<std::size_t>(rep_count), threads, [&](std::size_t rep) {
            const GeometricSpec gs{spec.p, 0, lag};
            std::vector<long> taus(static_cast<std::size_t>(q_count));
            for (long q = 0; q < q_count; ++q) {
                RngStream rng = make_stream(plan.master_seed, lag, static_cast<long>(rep), q,
                                            StreamPurpose::trace);
                taus[static_cast<std::size_t>(q)] = sample_geometric_tau(gs, rng);
                tau_sums[rep] += static_cast<double>(taus[static_cast<std::size_t>(q)]);
            }
            std::vector<std::vector<MeetingStats>> stats(
                k_values.size(), std::vector<MeetingStats>(static_cast<std::size_t>(q_count)));
            for (long q = 0; q < q_count; ++q) {
                RngStream xi =
                    make_stream(plan.master_seed, lag, static_cast<long>(rep), q, StreamPurpose::xi);
                for (std::size_t ki = 0; ki < k_values.size(); ++ki)
                    stats[ki][static_cast<std::size_t>(q)] = meeting_stats_from_tau(
                        taus[static_cast<std::size_t>(q)], lag, k_values[ki], xi);
            }
            auto& row = hats[rep];
            row.reserve(k_values.size());
            std::vector<long> jt(static_cast<std::size_t>(q_count));
            for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
                for (long q = 0; q < q_count; ++q)
                    jt[static_cast<std::size_t>(q)] = stats[ki][static_cast<std::size_t>(q)].j_tilde;
                const auto medians = loo_medians_all(jt);
                const auto eb = empirical_bounds(stats[ki], medians);
                row.emplace_back(eb.old_hat, eb.new_hat);
            }
        });

        for (long rep = 0; rep < rep_count; ++rep) {
            for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
                old_vals[ki].push_back(hats[static_cast<std::size_t>(rep)][ki].first);
                new_vals[ki].push_back(hats[static_cast<std::size_t>(rep)][ki].second);
            }
            out.mean_tau += tau_sums[static_cast<std::size_t>(rep)];
        }

        for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
            BoundCell cell;
            cell.k = k_values[ki];
            cell.lag = lag;
            const double n = static_cast<double>(rep_count);
            double om = 0.0, nm = 0.0;
            for (double v : old_vals[ki]) om += v;
            for (double v : new_vals[ki]) nm += v;
            om /= n;
            nm /= n;
            double os = 0.0, ns = 0.0;
            for (double v : old_vals[ki]) os += (v - om) * (v - om);
            for (double v : new_vals[ki]) ns += (v - nm) * (v - nm);
            cell.old_mean = om;
            cell.new_mean = nm;
            cell.old_sd = rep_count > 1 ? std::sqrt(os / (n - 1.0)) : 0.0;
            cell.new_sd = rep_count > 1 ? std::sqrt(ns / (n - 1.0)) : 0.0;
            cell.processes = plan.processes;
            cell.replicates = plan.replicates;
            cell.vacuous = cell.new_mean > 1.0;
            out.bounds.push_back(cell);
        }
    }
    out.mean_tau /= static_cast<double>(rep_count * q_count * static_cast<long>(plan.lags.size()));
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

std::function<long(RngStream&)> discrete_initial(const DiscreteKernelSpec& spec, std::size_t n) {
    std::vector<double> init = spec.initial;
    if (init.empty()) init.assign(n, 1.0 / static_cast<double>(n));
    double sum = 0.0;
    for (double v : init) {
        if (!(v >= 0.0)) throw PlanInvalid("initial distribution has negative mass");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw PlanInvalid("initial distribution must sum to 1");
    if (init.size() != n) throw PlanInvalid("initial distribution size mismatch");
    return [init](RngStream& rng) -> long { return CategoricalDist{init}.sample(rng); };
}

} // namespace

RunSummary execute(const ExperimentPlan& plan, int threads) {
    plan.validate();
    return std::visit(
        [&](const auto& spec) -> RunSummary {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, DiscreteKernelSpec>) {
                DiscreteMatrixKernel kernel{StochasticMatrix(spec.rows)};
                std::function<long(RngStream&)> init = discrete_initial(spec, kernel.states());
                return run_kernel_plan(kernel, init, discrete_h(plan.h_names, kernel.states()), plan,
                                       threads);
            } else if constexpr (std::is_same_v<T, RwmKernelSpec>) {
                if (spec.target != "std_normal")
                    throw PlanInvalid("unknown rwm target: " + spec.target);
                CoupledRwmKernel kernel(std_normal_log_density(spec.dimension), spec.dimension,
                                        spec.proposal_scale);
                const std::size_t dim = spec.dimension;
                std::function<std::vector<double>(RngStream&)> init =
                    [dim](RngStream& rng) {
                        std::vector<double> x(dim);
                        for (auto& v : x) v = rng.normal();
                        return x;
                    };
                return run_kernel_plan(kernel, init, vector_h(plan.h_names), plan, threads);
            } else if constexpr (std::is_same_v<T, GibbsGaussianKernelSpec>) {
                CoupledGibbsGaussianKernel kernel(spec.rho);
                std::function<std::vector<double>(RngStream&)> init = [](RngStream& rng) {
                    return std::vector<double>{rng.normal(), rng.normal()};
                };
                return run_kernel_plan(kernel, init, vector_h(plan.h_names), plan, threads);
            } else if constexpr (std::is_same_v<T, IsingKernelSpec>) {
                IsingSsgKernel kernel(spec.side, spec.beta);
                std::function<std::vector<std::int8_t>(RngStream&)> init =
                    [&kernel](RngStream& rng) { return kernel.random_state(rng); };
                return run_kernel_plan(kernel, init, ising_h(plan.h_names), plan, threads);
            } else {
                return run_geometric_plan(spec, plan, threads);
            }
        },
        plan.kernel);
}

std::vector<double> rrv(const RunSummary& summary, std::size_t plain_index, std::size_t cv_index) {
    if (plain_index >= summary.estimators.size() || cv_index >= summary.estimators.size())
        throw PlanInvalid("rrv indices out of range");
    const auto& plain = summary.estimators[plain_index];
    const auto& cv = summary.estimators[cv_index];
    const bool single_pair = plain.request.form == EstimatorForm::backward &&
                             cv.request.form == EstimatorForm::single_cv;
    const bool avg_pair = plain.request.form == EstimatorForm::timeavg &&
                          cv.request.form == EstimatorForm::timeavg_cv &&
                          plain.request.r == cv.request.r;
    if ((!single_pair && !avg_pair) || plain.h_name != cv.h_name ||
        plain.request.k != cv.request.k || plain.n_samples != cv.n_samples)
        throw PlanInvalid("rrv requires a paired plain/cv request on the same traces");
    std::vector<double> out(plain.dim, 0.0);
    for (std::size_t c = 0; c < plain.dim; ++c) {
        if (plain.variance[c] <= 0.0)
            throw ZeroVariance("plain estimator variance is zero for coordinate " + std::to_string(c));
        out[c] = cv.variance[c] / plain.variance[c];
    }
    return out;
}

std::vector<GeometricComparisonRow> geometric_comparison(const ExperimentPlan& plan, int threads) {
    const auto* spec = std::get_if<GeometricInjectSpec>(&plan.kernel);
    if (!spec) throw PlanInvalid("geometric_comparison needs the geometric kernel family");
    const RunSummary summary = execute(plan, threads);
    std::vector<GeometricComparisonRow> rows;
    rows.reserve(summary.bounds.size());
    for (const auto& cell : summary.bounds) {
        GeometricComparisonRow row;
        row.p = spec->p;
        row.k = cell.k;
        row.lag = cell.lag;
        const GeometricSpec gs{spec->p, cell.k, cell.lag};
        row.old_closed = geometric_old_bound(gs);
        row.new_closed = geometric_new_bound(gs);
        row.old_hat = cell.old_mean;
        row.new_hat = cell.new_mean;
        const double sqrt_n = std::sqrt(static_cast<double>(cell.replicates));
        row.old_se = cell.old_sd / sqrt_n;
        row.new_se = cell.new_sd / sqrt_n;
        row.processes = cell.processes;
        row.replicates = cell.replicates;
        rows.push_back(row);
    }
    return rows;
}

} // namespace lagcoup
