#include "lagcoup/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lagcoup/errors.hpp"
#include "lagcoup/report/csv.hpp"

namespace lagcoup {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

KernelSpec parse_kernel(const json& k) {
    if (!k.is_object()) throw ConfigError("'kernel' must be an object");
    const std::string family = k.value("family", "");
    if (family == "discrete") {
        reject_unknown_keys(k, {"family", "matrix", "initial"}, "kernel");
        if (!k.contains("matrix")) throw ConfigError("discrete kernel needs 'matrix'");
        DiscreteKernelSpec spec;
        spec.rows = k.at("matrix").get<std::vector<std::vector<double>>>();
        if (k.contains("initial")) spec.initial = k.at("initial").get<std::vector<double>>();
        return spec;
    }
    if (family == "rwm") {
        reject_unknown_keys(k, {"family", "dimension", "proposal_scale", "target"}, "kernel");
        RwmKernelSpec spec;
        spec.dimension = k.value("dimension", std::size_t{1});
        spec.proposal_scale = k.value("proposal_scale", 1.0);
        spec.target = k.value("target", std::string("std_normal"));
        return spec;
    }
    if (family == "gibbs_gaussian") {
        reject_unknown_keys(k, {"family", "rho"}, "kernel");
        GibbsGaussianKernelSpec spec;
        if (!k.contains("rho")) throw ConfigError("gibbs_gaussian kernel needs 'rho'");
        spec.rho = k.at("rho").get<double>();
        return spec;
    }
    if (family == "ising") {
        reject_unknown_keys(k, {"family", "side", "beta"}, "kernel");
        IsingKernelSpec spec;
        spec.side = k.value("side", 4L);
        spec.beta = k.value("beta", 0.1);
        return spec;
    }
    if (family == "geometric") {
        reject_unknown_keys(k, {"family", "p"}, "kernel");
        GeometricInjectSpec spec;
        if (!k.contains("p")) throw ConfigError("geometric kernel needs 'p'");
        spec.p = k.at("p").get<double>();
        return spec;
    }
    throw ConfigError("unknown kernel family: '" + family + "'");
}

} // namespace

Config parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    reject_unknown_keys(root,
                        {"kernel", "lags", "k_grid", "processes", "replicates", "seed", "max_sweeps",
                         "estimators", "h", "keep_samples", "output"},
                        "config root");

    Config cfg;
    if (!root.contains("kernel")) throw ConfigError("config needs a 'kernel' section");
    cfg.plan.kernel = parse_kernel(root.at("kernel"));

    if (root.contains("lags")) cfg.plan.lags = root.at("lags").get<std::vector<long>>();
    if (root.contains("k_grid")) {
        const json& g = root.at("k_grid");
        reject_unknown_keys(g, {"start", "stop", "step"}, "k_grid");
        cfg.plan.k_grid.start = g.value("start", 0L);
        cfg.plan.k_grid.stop = g.value("stop", cfg.plan.k_grid.start);
        cfg.plan.k_grid.step = g.value("step", 1L);
    }
    cfg.plan.processes = root.value("processes", 2);
    cfg.plan.replicates = root.value("replicates", 1);
    cfg.plan.master_seed = root.value("seed", std::uint64_t{1});
    cfg.plan.max_sweeps = root.value("max_sweeps", 1000000L);
    cfg.plan.keep_samples = root.value("keep_samples", false);

    if (root.contains("estimators")) {
        for (const json& e : root.at("estimators")) {
            reject_unknown_keys(e, {"form", "k", "r"}, "estimators[]");
            EstimatorRequest req;
            const std::string form = e.value("form", "");
            const auto parsed = estimator_form_from_name(form);
            if (!parsed) throw ConfigError("unknown estimator form: '" + form + "'");
            req.form = *parsed;
            req.k = e.value("k", 0L);
            req.r = e.value("r", req.k);
            cfg.plan.estimators.push_back(req);
        }
    }
    if (root.contains("h")) cfg.plan.h_names = root.at("h").get<std::vector<std::string>>();

    if (root.contains("output")) {
        const json& o = root.at("output");
        reject_unknown_keys(o, {"dir", "prefix"}, "output");
        cfg.out_dir = o.value("dir", std::string("."));
        cfg.prefix = o.value("prefix", std::string("run"));
    }

    try {
        cfg.plan.validate();
    } catch (const PlanInvalid& e) {
        throw ConfigError(std::string("invalid plan: ") + e.what());
    }

    cfg.config_hash = fnv1a_hash(root.dump());
    return cfg;
}

Config load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace lagcoup
