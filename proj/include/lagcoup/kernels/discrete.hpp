#pragma once

#include <utility>

#include "lagcoup/kernels/maximal.hpp"
#include "lagcoup/rng.hpp"
#include "lagcoup/stochastic_matrix.hpp"

namespace lagcoup {

// Coupled kernel on a finite state space: the joint step maximally couples the
// two categorical next-state laws (matrix rows at x and y) via the rejection
// construction, so the joint law matches the exact-oracle enumeration.
class DiscreteMatrixKernel {
public:
    using state_type = long;

    explicit DiscreteMatrixKernel(StochasticMatrix matrix) : matrix_(std::move(matrix)) {}

    const StochasticMatrix& matrix() const { return matrix_; }
    std::size_t states() const { return matrix_.size(); }

    state_type marginal_step(const state_type& x, RngStream& rng) const {
        return CategoricalDist{matrix_.row(static_cast<std::size_t>(x))}.sample(rng);
    }

    std::pair<state_type, state_type> joint_step(const state_type& x, const state_type& y,
                                                 RngStream& rng) const {
        if (x == y) {
            const state_type nx = marginal_step(x, rng);
            return {nx, nx};
        }
        const CategoricalDist px{matrix_.row(static_cast<std::size_t>(x))};
        const CategoricalDist py{matrix_.row(static_cast<std::size_t>(y))};
        auto res = maximal_coupling_sample(px, py, rng);
        return {res.from_p, res.from_q};
    }

private:
    StochasticMatrix matrix_;
};

} // namespace lagcoup
