#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "lagcoup/errors.hpp"
#include "lagcoup/kernels/maximal.hpp"
#include "lagcoup/rng.hpp"

namespace lagcoup {

using LogDensity = std::function<double(const std::vector<double>&)>;

inline LogDensity std_normal_log_density(std::size_t dim) {
    return [dim](const std::vector<double>& x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dim; ++i) acc -= 0.5 * x[i] * x[i];
        return acc;
    };
}

// Coupled random-walk Metropolis: proposals are maximally coupled isotropic
// Gaussians centred at the two current states, and one shared uniform decides
// both accept/reject steps. If the proposals coincide and both chains accept,
// the states become identical; the diagonal is absorbing.
class CoupledRwmKernel {
public:
    using state_type = std::vector<double>;

    CoupledRwmKernel(LogDensity log_density, std::size_t dim, double proposal_scale)
        : log_density_(std::move(log_density)), dim_(dim), scale_(proposal_scale) {
        if (!(proposal_scale > 0.0)) throw PlanInvalid("proposal_scale must be positive");
        if (dim == 0) throw PlanInvalid("dimension must be positive");
    }

    std::size_t dim() const { return dim_; }

    state_type marginal_step(const state_type& x, RngStream& rng) const {
        const state_type prop = IsoNormalDist{x, scale_}.sample(rng);
        const double u = rng.uniform_pos();
        return accept(x, prop, u) ? prop : x;
    }

    std::pair<state_type, state_type> joint_step(const state_type& x, const state_type& y,
                                                 RngStream& rng) const {
        auto prop = maximal_coupling_sample(IsoNormalDist{x, scale_}, IsoNormalDist{y, scale_}, rng);
        const double u = rng.uniform_pos();
        state_type nx = accept(x, prop.from_p, u) ? prop.from_p : x;
        state_type ny = accept(y, prop.from_q, u) ? prop.from_q : y;
        return {std::move(nx), std::move(ny)};
    }

private:
    bool accept(const state_type& from, const state_type& to, double u) const {
        const double lf = log_density_(from);
        const double lt = log_density_(to);
        if (std::isnan(lf) || std::isnan(lt)) throw EvaluationError("log-density evaluation returned NaN");
        return std::log(u) < lt - lf;
    }

    LogDensity log_density_;
    std::size_t dim_;
    double scale_;
};

} // namespace lagcoup
