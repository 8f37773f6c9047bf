#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lagcoup/errors.hpp"
#include "lagcoup/kernels/discrete.hpp"
#include "lagcoup/kernels/gibbs_gaussian.hpp"
#include "lagcoup/kernels/ising.hpp"
#include "lagcoup/kernels/rwm.hpp"
#include "lagcoup/stochastic_matrix.hpp"

namespace lagcoup {

// Target description as read from experiment configs. Exactly one of the
// optional blocks is set; validation happens on construction of the kernels
// (row sums within 1e-12, stationary residual within 1e-10, beta > 0).

struct ContinuousTargetData {
    LogDensity log_density;
    std::size_t dimension = 1;
};

struct DiscreteTargetData {
    StochasticMatrix transition;
    std::vector<double> stationary; // left fixed point; checked at 1e-10
};

struct IsingTargetData {
    long side = 2;
    double beta = 0.1;
};

struct TargetSpec {
    std::optional<ContinuousTargetData> continuous;
    std::optional<DiscreteTargetData> discrete;
    std::optional<IsingTargetData> ising;
};

inline DiscreteTargetData make_discrete_target(std::vector<std::vector<double>> rows) {
    DiscreteTargetData d{StochasticMatrix(std::move(rows)), {}};
    d.stationary = d.transition.stationary();
    return d;
}

inline CoupledRwmKernel coupled_rwm_kernel(const TargetSpec& target, double proposal_scale) {
    if (!target.continuous) throw PlanInvalid("rwm kernel needs a continuous target");
    return CoupledRwmKernel(target.continuous->log_density, target.continuous->dimension, proposal_scale);
}

inline CoupledGibbsGaussianKernel coupled_gibbs_gaussian(double rho) {
    return CoupledGibbsGaussianKernel(rho);
}

inline DiscreteMatrixKernel discrete_matrix_kernel(const TargetSpec& target) {
    if (!target.discrete) throw PlanInvalid("discrete kernel needs a transition matrix");
    if (!target.discrete->stationary.empty() &&
        target.discrete->transition.stationary_residual(target.discrete->stationary) > 1e-10)
        throw InvalidMatrix("stationary vector is not a left fixed point at 1e-10");
    return DiscreteMatrixKernel(target.discrete->transition);
}

inline IsingSsgKernel ising_ssg_kernel(long side, double beta) { return IsingSsgKernel(side, beta); }

} // namespace lagcoup
