#include "lagcoup/cli/commands.hpp"

#include <fstream>
#include <vector>

#include <json.hpp>

#include "lagcoup/bounds/bounds.hpp"
#include "lagcoup/bounds/geometric.hpp"
#include "lagcoup/errors.hpp"
#include "lagcoup/oracle/discrete_chain.hpp"
#include "lagcoup/report/csv.hpp"
#include "lagcoup/runner/runner.hpp"
#include "lagcoup/validate/battery.hpp"

namespace lagcoup {

namespace {

Config apply_overrides(Config config, const CommandOptions& opts) {
    if (opts.seed_override) config.plan.master_seed = *opts.seed_override;
    if (opts.out_override) config.out_dir = *opts.out_override;
    return config;
}

std::ofstream open_output(const Config& config, const std::string& suffix) {
    std::filesystem::create_directories(config.out_dir);
    const auto path = config.out_dir / (config.prefix + "_" + suffix);
    std::ofstream out(path, std::ios::binary); // '\n' line endings everywhere
    if (!out) throw ConfigError("cannot open output file: " + path.string());
    return out;
}

const std::vector<std::string> kBoundColumns = {
    "k", "lag", "old_bound", "new_bound", "replicate_sd_old", "replicate_sd_new",
    "Q", "replicates", "vacuous"};

void write_exact_bound_row(CsvWriter& csv, long k, long lag, double old_b, double new_b) {
    csv.field(k)
        .field(lag)
        .field(old_b)
        .field(new_b)
        .field(0.0)
        .field(0.0)
        .field(0L)
        .field(0L)
        .field(new_b > 1.0 ? 1L : 0L);
}

} // namespace

int cmd_bounds(const Config& raw, const CommandOptions& opts, std::ostream& log) {
    const Config config = apply_overrides(raw, opts);
    const ExperimentPlan& plan = config.plan;
    auto out = open_output(config, "bounds.csv");

    if (const auto* geo = std::get_if<GeometricInjectSpec>(&plan.kernel)) {
        CsvWriter csv(out, config.config_hash, plan.master_seed, kBoundColumns);
        for (long lag : plan.lags)
            for (long k : plan.k_grid.values()) {
                const GeometricSpec spec{geo->p, k, lag};
                write_exact_bound_row(csv, k, lag, geometric_old_bound(spec),
                                      geometric_new_bound(spec));
                csv.end_row();
            }
        log << "bounds: closed-form geometric sweep written\n";
        return 0;
    }

    if (const auto* disc = std::get_if<DiscreteKernelSpec>(&plan.kernel)) {
        auto columns = kBoundColumns;
        columns.push_back("tv_exact");
        CsvWriter csv(out, config.config_hash, plan.master_seed, columns);
        std::vector<double> init = disc->initial;
        if (init.empty())
            init.assign(disc->rows.size(), 1.0 / static_cast<double>(disc->rows.size()));
        const DiscreteChain chain(StochasticMatrix(disc->rows), init);
        for (long lag : plan.lags) {
            const auto tau_pmf = meeting_time_pmf(chain, lag);
            for (long k : plan.k_grid.values()) {
                const auto jd = j_distribution_from_tau(tau_pmf, k);
                write_exact_bound_row(csv, k, lag, old_bound_exact(jd), new_bound_exact(jd));
                csv.field(tv_exact(chain, k));
                csv.end_row();
            }
        }
        log << "bounds: exact oracle sweep written\n";
        return 0;
    }

    // sampled kernels: Monte Carlo bound estimates over replicates
    const RunSummary summary = execute(plan, opts.threads);
    CsvWriter csv(out, config.config_hash, plan.master_seed, kBoundColumns);
    for (const auto& cell : summary.bounds) {
        csv.field(cell.k)
            .field(cell.lag)
            .field(cell.old_mean)
            .field(cell.new_mean)
            .field(cell.old_sd)
            .field(cell.new_sd)
            .field(cell.processes)
            .field(cell.replicates)
            .field(cell.vacuous ? 1L : 0L);
        csv.end_row();
    }
    log << "bounds: " << summary.bounds.size() << " cells from " << summary.replicates
        << " replicates in " << summary.wall_seconds << "s\n";
    return 0;
}

int cmd_estimate(const Config& raw, const CommandOptions& opts, std::ostream& log) {
    const Config config = apply_overrides(raw, opts);
    const ExperimentPlan& plan = config.plan;
    if (plan.estimators.empty()) throw ConfigError("estimate needs at least one estimator request");
    if (plan.h_names.empty()) throw ConfigError("estimate needs at least one test function in 'h'");

    const RunSummary summary = execute(plan, opts.threads);

    {
        auto out = open_output(config, "estimates.csv");
        CsvWriter csv(out, config.config_hash, plan.master_seed,
                      {"estimator", "k", "r", "h", "coord", "mean", "mc_se", "variance", "n"});
        for (const auto& es : summary.estimators) {
            for (std::size_t c = 0; c < es.dim; ++c) {
                csv.field(std::string(estimator_form_name(es.request.form)))
                    .field(es.request.k)
                    .field(es.request.r)
                    .field(es.h_name)
                    .field(static_cast<long>(c))
                    .field(es.grand_mean[c])
                    .field(es.mc_se[c])
                    .field(es.variance[c])
                    .field(es.n_samples);
                csv.end_row();
            }
        }
    }

    // paired plain/cv requests -> relative reduction in variance
    {
        auto out = open_output(config, "rrv.csv");
        CsvWriter csv(out, config.config_hash, plan.master_seed, {"h", "k", "r", "coord", "rrv"});
        for (std::size_t i = 0; i < summary.estimators.size(); ++i) {
            const auto& plain = summary.estimators[i];
            const bool is_plain = plain.request.form == EstimatorForm::backward ||
                                  plain.request.form == EstimatorForm::timeavg;
            if (!is_plain) continue;
            const EstimatorForm cv_form = plain.request.form == EstimatorForm::backward
                                              ? EstimatorForm::single_cv
                                              : EstimatorForm::timeavg_cv;
            for (std::size_t j = 0; j < summary.estimators.size(); ++j) {
                const auto& cv = summary.estimators[j];
                if (cv.request.form != cv_form || cv.h_name != plain.h_name ||
                    cv.request.k != plain.request.k)
                    continue;
                if (cv_form == EstimatorForm::timeavg_cv && cv.request.r != plain.request.r) continue;
                const auto ratios = rrv(summary, i, j);
                for (std::size_t c = 0; c < ratios.size(); ++c) {
                    csv.field(plain.h_name)
                        .field(plain.request.k)
                        .field(plain.request.r)
                        .field(static_cast<long>(c))
                        .field(ratios[c]);
                    csv.end_row();
                }
            }
        }
    }

    {
        auto out = open_output(config, "summary.json");
        nlohmann::json j;
        char hex[32];
        auto res = std::to_chars(hex, hex + sizeof(hex), config.config_hash, 16);
        j["config"] = std::string(hex, res.ptr);
        j["seed"] = plan.master_seed;
        j["kernel_family"] = kernel_family_name(plan.kernel);
        j["processes"] = summary.processes;
        j["replicates"] = summary.replicates;
        j["wall_seconds"] = summary.wall_seconds;
        j["total_joint_steps"] = summary.total_joint_steps;
        j["mean_tau"] = summary.mean_tau;
        j["estimators"] = nlohmann::json::array();
        for (const auto& es : summary.estimators) {
            nlohmann::json e;
            e["form"] = estimator_form_name(es.request.form);
            e["k"] = es.request.k;
            e["r"] = es.request.r;
            e["h"] = es.h_name;
            e["mean"] = es.grand_mean;
            e["mc_se"] = es.mc_se;
            e["variance"] = es.variance;
            e["n"] = es.n_samples;
            j["estimators"].push_back(e);
        }
        j["bounds"] = nlohmann::json::array();
        for (const auto& cell : summary.bounds) {
            nlohmann::json b;
            b["k"] = cell.k;
            b["lag"] = cell.lag;
            b["old_bound"] = cell.old_mean;
            b["new_bound"] = cell.new_mean;
            b["replicate_sd_old"] = cell.old_sd;
            b["replicate_sd_new"] = cell.new_sd;
            b["vacuous"] = cell.vacuous;
            j["bounds"].push_back(b);
        }
        out << j.dump(2) << "\n";
    }

    log << "estimate: " << summary.estimators.size() << " estimator summaries in "
        << summary.wall_seconds << "s\n";
    return 0;
}

int cmd_validate(const Config& raw, const CommandOptions& opts, std::ostream& log) {
    const Config config = apply_overrides(raw, opts);
    const auto results = run_validation_battery(config.plan.master_seed, config.plan);
    log << "validation battery (seed " << config.plan.master_seed << ")\n";
    bool all = true;
    for (const auto& r : results) {
        log << (r.pass ? "  [PASS] " : "  [FAIL] ") << r.name << ": " << r.detail << "\n";
        all = all && r.pass;
    }
    log << (all ? "all batteries passed\n" : "battery failures detected\n");
    return all ? 0 : 1;
}

int cmd_geometric(const Config& raw, const CommandOptions& opts, std::ostream& log) {
    const Config config = apply_overrides(raw, opts);
    if (!std::holds_alternative<GeometricInjectSpec>(config.plan.kernel))
        throw ConfigError("the geometric command needs kernel.family == \"geometric\"");
    const auto rows = geometric_comparison(config.plan, opts.threads);
    auto out = open_output(config, "geometric.csv");
    CsvWriter csv(out, config.config_hash, config.plan.master_seed,
                  {"p", "k", "lag", "old_closed", "new_closed", "old_hat", "new_hat", "old_se",
                   "new_se", "Q", "replicates"});
    for (const auto& row : rows) {
        csv.field(row.p)
            .field(row.k)
            .field(row.lag)
            .field(row.old_closed)
            .field(row.new_closed)
            .field(row.old_hat)
            .field(row.new_hat)
            .field(row.old_se)
            .field(row.new_se)
            .field(row.processes)
            .field(row.replicates);
        csv.end_row();
    }
    log << "geometric: " << rows.size() << " comparison rows written\n";
    return 0;
}

} // namespace lagcoup
