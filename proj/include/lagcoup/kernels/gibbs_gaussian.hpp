#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "lagcoup/errors.hpp"
#include "lagcoup/kernels/maximal.hpp"
#include "lagcoup/rng.hpp"

namespace lagcoup {

// Systematic-scan Gibbs sampler for a bivariate standard Gaussian with
// correlation rho. Each conditional update maximally couples the two
// univariate Gaussian conditionals, so meeting is an exact event; common
// random numbers would only bring the chains together asymptotically.
class CoupledGibbsGaussianKernel {
public:
    using state_type = std::vector<double>;

    explicit CoupledGibbsGaussianKernel(double rho) : rho_(rho) {
        if (!(std::fabs(rho) < 1.0)) throw PlanInvalid("|rho| must be < 1");
        cond_sd_ = std::sqrt(1.0 - rho * rho);
    }

    double rho() const { return rho_; }

    state_type marginal_step(const state_type& x, RngStream& rng) const {
        state_type s = x;
        s[0] = rng.normal(rho_ * s[1], cond_sd_);
        s[1] = rng.normal(rho_ * s[0], cond_sd_);
        return s;
    }

    std::pair<state_type, state_type> joint_step(const state_type& x, const state_type& y,
                                                 RngStream& rng) const {
        state_type nx = x, ny = y;
        for (int coord = 0; coord < 2; ++coord) {
            const int other = 1 - coord;
            auto res = maximal_coupling_sample(NormalDist{rho_ * nx[other], cond_sd_},
                                               NormalDist{rho_ * ny[other], cond_sd_}, rng);
            nx[coord] = res.from_p;
            ny[coord] = res.from_q;
        }
        return {std::move(nx), std::move(ny)};
    }

private:
    double rho_;
    double cond_sd_;
};

} // namespace lagcoup
