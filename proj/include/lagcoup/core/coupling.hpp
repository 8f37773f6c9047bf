#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "lagcoup/errors.hpp"
#include "lagcoup/rng.hpp"

namespace lagcoup {

// Contract for a coupled transition kernel: a joint one-step transition with
// faithful marginals and an absorbing diagonal, plus the marginal kernel both
// chains follow individually. Kernels are immutable after construction and may
// be shared across threads; all randomness comes from the caller's stream.
template <class K>
concept CoupledKernelType = requires(const K k, const typename K::state_type& s, RngStream& rng) {
    typename K::state_type;
    { k.joint_step(s, s, rng) } -> std::same_as<std::pair<typename K::state_type, typename K::state_type>>;
    { k.marginal_step(s, rng) } -> std::same_as<typename K::state_type>;
};

template <class S>
struct LagConfig {
    long lag = 1;                                // L >= 1
    long max_sweeps = 1000000;                   // cap on the meeting time index; > lag
    std::function<S(RngStream&)> initial_distribution; // sampler for X_0 and Y_0

    void validate() const {
        if (lag < 1) throw PlanInvalid("lag must be >= 1");
        if (max_sweeps <= lag) throw PlanInvalid("max_sweeps must exceed lag");
        if (!initial_distribution) throw PlanInvalid("initial_distribution not set");
    }
};

// Realized paths of a lagged coupled pair. tau is the x-path index of the
// first lagged coincidence: the smallest t >= lag with x_path[t] == y_path[t-lag],
// checked at t = lag (the warmed-up pair) and after every joint step. Past tau
// the pair is collapsed: one chain is advanced and both paths record it at the
// lag offset, so x_path[t] == y_path[t-lag] holds exactly for every t >= tau.
template <class S>
struct CoupledTrace {
    std::vector<S> x_path; // X_0 .. X_{tau+lag} (longer if extended)
    std::vector<S> y_path; // Y_0 .. Y_{tau}
    std::optional<long> tau;
    long lag = 1;

    long x_len() const { return static_cast<long>(x_path.size()); }
    long y_len() const { return static_cast<long>(y_path.size()); }

    // Direct scan of the lagged-equality invariant over the recorded region.
    bool faithful() const {
        if (!tau) return true;
        for (long t = *tau; t < x_len(); ++t) {
            if (t - lag >= y_len()) break;
            if (!(x_path[static_cast<std::size_t>(t)] == y_path[static_cast<std::size_t>(t - lag)])) return false;
        }
        return true;
    }
};

// Runs the pair to its meeting time: X advances `lag` marginal steps alone,
// then both advance jointly until the lagged states coincide; after that the
// collapsed chain is advanced `lag` more marginal steps so the stored paths
// reach X_{tau+lag} / Y_{tau}. Throws CapExceeded if tau would exceed
// config.max_sweeps.
template <CoupledKernelType K>
CoupledTrace<typename K::state_type>
run_lagged_coupling(const K& kernel, const LagConfig<typename K::state_type>& config, RngStream& rng) {
    using S = typename K::state_type;
    config.validate();
    const long lag = config.lag;

    CoupledTrace<S> trace;
    trace.lag = lag;
    trace.x_path.push_back(config.initial_distribution(rng));
    trace.y_path.push_back(config.initial_distribution(rng));
    for (long t = 0; t < lag; ++t)
        trace.x_path.push_back(kernel.marginal_step(trace.x_path.back(), rng));

    long t = lag; // x-path index of the current lagged pair
    if (!(trace.x_path.back() == trace.y_path.front())) {
        while (true) {
            if (t >= config.max_sweeps)
                throw CapExceeded("no meeting by sweep cap " + std::to_string(config.max_sweeps));
            auto [xn, yn] = kernel.joint_step(trace.x_path.back(), trace.y_path.back(), rng);
            trace.x_path.push_back(std::move(xn));
            trace.y_path.push_back(std::move(yn));
            ++t;
            if (trace.x_path.back() == trace.y_path.back()) break;
        }
    }
    trace.tau = t;

    // collapse: advance one chain, record at the lag offset
    for (long s = 0; s < lag; ++s) {
        trace.x_path.push_back(kernel.marginal_step(trace.x_path.back(), rng));
        trace.y_path.push_back(trace.x_path.back());
    }
    return trace;
}

// Extends a completed trace with further collapsed steps until the y-path
// covers index target_y_index. The estimator layer reads both paths at common
// indices, so the runner extends traces once meeting statistics are known.
template <CoupledKernelType K>
void extend_trace(CoupledTrace<typename K::state_type>& trace, const K& kernel, long target_y_index,
                  RngStream& rng) {
    if (!trace.tau) throw MissingTau("cannot extend a capped trace");
    while (trace.y_len() <= target_y_index) {
        trace.x_path.push_back(kernel.marginal_step(trace.x_path.back(), rng));
        trace.y_path.push_back(trace.x_path.back());
    }
}

// J = max{0, ceil((tau - L - k)/L)}: the number of lagged pairs not yet
// coincident at burn-in k, the quantity behind both estimator corrections and
// the TV bounds.
inline long j_from_tau(long tau, long lag, long k) {
    const long excess = tau - lag - k;
    if (excess <= 0) return 0;
    return (excess + lag - 1) / lag;
}

struct MeetingStats {
    long j = 0;       // J_{k,L}
    long j_tilde = 0; // J - xi, xi a fair coin
    long k = 0;
    long lag = 1;
};

inline MeetingStats meeting_stats_from_tau(long tau, long lag, long k, RngStream& rng) {
    MeetingStats s;
    s.k = k;
    s.lag = lag;
    s.j = j_from_tau(tau, lag, k);
    s.j_tilde = s.j - (rng.coin() ? 1 : 0);
    return s;
}

template <class S>
MeetingStats meeting_stats(const CoupledTrace<S>& trace, long k, RngStream& rng) {
    if (!trace.tau) throw MissingTau("trace hit the sweep cap; no meeting time");
    if (k < 0) throw std::invalid_argument("k must be nonnegative");
    return meeting_stats_from_tau(*trace.tau, trace.lag, k, rng);
}

} // namespace lagcoup
