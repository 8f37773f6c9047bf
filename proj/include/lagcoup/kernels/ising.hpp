#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "lagcoup/errors.hpp"
#include "lagcoup/rng.hpp"

namespace lagcoup {

// Single-site Gibbs (heat-bath) coupling for the 2D Ising model on a periodic
// side x side lattice, pi_beta(x) ~ exp(beta * sum over neighbour pairs x_i x_j).
// One joint step is one full systematic sweep; at each site the two heat-bath
// Bernoulli conditionals are driven by a single shared uniform, which is a
// maximal coupling of the site conditionals and keeps the diagonal absorbing.
class IsingSsgKernel {
public:
    using state_type = std::vector<std::int8_t>; // spins in {-1,+1}, row-major

    IsingSsgKernel(long side, double beta) : side_(side), beta_(beta) {
        if (side < 2) throw PlanInvalid("lattice side must be >= 2");
        if (!(beta > 0.0)) throw PlanInvalid("beta must be positive");
        // neighbour sums are even values in [-4, 4]; index by nb + 4
        for (int nb = -4; nb <= 4; ++nb)
            p_plus_[static_cast<std::size_t>(nb + 4)] = 1.0 / (1.0 + std::exp(-2.0 * beta * nb));
    }

    long side() const { return side_; }
    std::size_t sites() const { return static_cast<std::size_t>(side_ * side_); }

    state_type all_up() const { return state_type(sites(), std::int8_t{1}); }

    state_type random_state(RngStream& rng) const {
        state_type s(sites());
        for (auto& v : s) v = rng.coin() ? std::int8_t{1} : std::int8_t{-1};
        return s;
    }

    state_type marginal_step(const state_type& x, RngStream& rng) const {
        state_type s = x;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double u = rng.uniform01();
            s[i] = u < p_plus_[neighbour_index(s, i)] ? std::int8_t{1} : std::int8_t{-1};
        }
        return s;
    }

    std::pair<state_type, state_type> joint_step(const state_type& x, const state_type& y,
                                                 RngStream& rng) const {
        state_type nx = x, ny = y;
        for (std::size_t i = 0; i < nx.size(); ++i) {
            const double u = rng.uniform01();
            nx[i] = u < p_plus_[neighbour_index(nx, i)] ? std::int8_t{1} : std::int8_t{-1};
            ny[i] = u < p_plus_[neighbour_index(ny, i)] ? std::int8_t{1} : std::int8_t{-1};
        }
        return {std::move(nx), std::move(ny)};
    }

    static double magnetization(const state_type& s) {
        long sum = 0;
        for (auto v : s) sum += v;
        return static_cast<double>(sum) / static_cast<double>(s.size());
    }

private:
    std::size_t neighbour_index(const state_type& s, std::size_t site) const {
        const long n = side_;
        const long r = static_cast<long>(site) / n;
        const long c = static_cast<long>(site) % n;
        const long up = ((r - 1 + n) % n) * n + c;
        const long down = ((r + 1) % n) * n + c;
        const long left = r * n + (c - 1 + n) % n;
        const long right = r * n + (c + 1) % n;
        const int nb = s[static_cast<std::size_t>(up)] + s[static_cast<std::size_t>(down)] +
                       s[static_cast<std::size_t>(left)] + s[static_cast<std::size_t>(right)];
        return static_cast<std::size_t>(nb + 4);
    }

    long side_;
    double beta_;
    std::array<double, 9> p_plus_{};
};

} // namespace lagcoup
