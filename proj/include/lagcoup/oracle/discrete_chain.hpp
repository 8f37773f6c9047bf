#pragma once

#include <cstddef>
#include <vector>

#include "lagcoup/bounds/j_distribution.hpp"
#include "lagcoup/stochastic_matrix.hpp"

namespace lagcoup {

// Ground-truth machinery for small discrete chains (n <= 64): exact k-step
// marginals, exact TV distance to stationarity, and the exact meeting-time
// distribution of the maximally coupled joint chain.
struct DiscreteChain {
    StochasticMatrix transition;
    std::vector<double> initial;    // distribution of X_0 and Y_0
    std::vector<double> stationary; // left fixed point, computed if empty

    DiscreteChain(StochasticMatrix t, std::vector<double> init);
};

// initial * P^k by iterated multiplication
std::vector<double> marginal_at(const DiscreteChain& chain, long k);

// d_TV(pi_k, pi) = half-L1 distance between the k-step marginal and stationarity
double tv_exact(const DiscreteChain& chain, long k);

// Exact distribution of the meeting time tau (x-path index of the first lagged
// coincidence) under the rejection-construction maximal coupling used by the
// sampling kernel: X warms up `lag` steps from initial, Y starts at initial,
// equality is checked on the warmed-up pair and after every joint step.
// pmf[t] = P(tau = lag + t); residual is the mass not absorbed by max_t.
struct MeetingTimePmf {
    long lag = 1;
    std::vector<double> pmf; // indexed by t = tau - lag
    double residual = 0.0;

    double prob_tau(long tau) const {
        const long t = tau - lag;
        if (t < 0 || t >= static_cast<long>(pmf.size())) return 0.0;
        return pmf[static_cast<std::size_t>(t)];
    }
};

// max_t <= 0 selects the default: run until residual < 1e-12, capped at 1e5.
MeetingTimePmf meeting_time_pmf(const DiscreteChain& chain, long lag, long max_t = 0);

// Pushforward of tau through J = max{0, ceil((tau - L - k)/L)}.
// Requires residual < 1e-12.
JDistribution j_distribution_from_tau(const MeetingTimePmf& tau_pmf, long k);

// Exact joint-state distribution after `steps` coupled transitions, starting
// from the warmed-up pair (X_lag, Y_0); entry (x * n + y). Diagonal entries are
// absorbed mass. Exposed for faithfulness cross-checks against matrix powers.
std::vector<double> joint_distribution_after(const DiscreteChain& chain, long lag, long steps);

} // namespace lagcoup
