#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lagcoup/errors.hpp"

namespace lagcoup {

enum class EstimatorForm { forward, backward, single_cv, timeavg, timeavg_cv };

const char* estimator_form_name(EstimatorForm f);
std::optional<EstimatorForm> estimator_form_from_name(const std::string& name);

struct EstimatorRequest {
    EstimatorForm form = EstimatorForm::backward;
    long k = 0;
    long r = 0; // only the time-averaged forms read r
};

// Kernel families selectable from a plan. The geometric entry bypasses kernels
// entirely and draws the coupling time directly, exercising the meeting-count
// and bound pipeline against closed forms.
struct DiscreteKernelSpec {
    std::vector<std::vector<double>> rows;
    std::vector<double> initial; // empty selects the uniform distribution
};

struct RwmKernelSpec {
    std::size_t dimension = 1;
    double proposal_scale = 1.0;
    std::string target = "std_normal";
};

struct GibbsGaussianKernelSpec {
    double rho = 0.0;
};

struct IsingKernelSpec {
    long side = 4;
    double beta = 0.1;
};

struct GeometricInjectSpec {
    double p = 0.5;
};

using KernelSpec = std::variant<DiscreteKernelSpec, RwmKernelSpec, GibbsGaussianKernelSpec,
                                IsingKernelSpec, GeometricInjectSpec>;

const char* kernel_family_name(const KernelSpec& spec);

struct KGrid {
    long start = 0;
    long stop = 0; // inclusive
    long step = 1;

    std::vector<long> values() const {
        if (step < 1 || stop < start) throw PlanInvalid("k grid is empty or malformed");
        std::vector<long> out;
        for (long k = start; k <= stop; k += step) out.push_back(k);
        return out;
    }
};

struct ExperimentPlan {
    KernelSpec kernel;
    std::vector<long> lags{1};
    KGrid k_grid;
    int processes = 2; // Q coupled processes per replicate
    int replicates = 1;
    std::uint64_t master_seed = 1;
    long max_sweeps = 1000000;
    std::vector<EstimatorRequest> estimators;
    std::vector<std::string> h_names; // test functions, resolved per kernel family
    bool keep_samples = false;        // retain per-process estimates (bootstrap input)

    void validate() const;
};

// Empirical bound estimates for one (k, L) cell: replicate means and SDs of
// the Algorithm-style estimates across `replicates` independent replicates.
struct BoundCell {
    long k = 0;
    long lag = 1;
    double old_mean = 0.0;
    double new_mean = 0.0;
    double old_sd = 0.0;
    double new_sd = 0.0;
    int processes = 0;
    int replicates = 0;
    bool vacuous = false; // new bound above 1, where TV carries no information
};

struct EstimatorSummary {
    EstimatorRequest request;
    std::string h_name;
    std::size_t dim = 0;
    std::vector<double> grand_mean;
    std::vector<double> mc_se;
    std::vector<double> variance;
    long n_samples = 0;
    // flattened samples[i*dim + c] when keep_samples was set
    std::vector<double> samples;
};

struct RunSummary {
    std::vector<EstimatorSummary> estimators;
    std::vector<BoundCell> bounds;
    double wall_seconds = 0.0;
    std::int64_t total_joint_steps = 0;
    double mean_tau = 0.0;
    int processes = 0;
    int replicates = 0;
    std::uint64_t master_seed = 0;
};

} // namespace lagcoup
