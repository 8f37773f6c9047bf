#include "lagcoup/oracle/discrete_chain.hpp"

#include <cmath>

#include "lagcoup/core/coupling.hpp"
#include "lagcoup/errors.hpp"

namespace lagcoup {

DiscreteChain::DiscreteChain(StochasticMatrix t, std::vector<double> init)
    : transition(std::move(t)), initial(std::move(init)) {
    const std::size_t n = transition.size();
    if (n > 64) throw StateSpaceTooLarge("oracle chains are limited to 64 states");
    if (initial.size() != n) throw InvalidMatrix("initial vector size mismatch");
    double sum = 0.0;
    for (double v : initial) {
        if (!(v >= 0.0)) throw InvalidMatrix("initial vector has negative mass");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw InvalidMatrix("initial vector does not sum to 1");
    stationary = transition.stationary();
}

std::vector<double> marginal_at(const DiscreteChain& chain, long k) {
    if (k < 0) throw std::invalid_argument("k must be nonnegative");
    std::vector<double> dist = chain.initial;
    for (long i = 0; i < k; ++i) dist = chain.transition.apply_left(dist);
    return dist;
}

double tv_exact(const DiscreteChain& chain, long k) {
    return total_variation(marginal_at(chain, k), chain.stationary);
}

namespace {

// Precomputed joint transition pieces for an off-diagonal pair (x, y):
// meeting probability and the two normalized residual laws. Under the
// rejection construction the non-met landing law is the product of residuals.
struct PairLaw {
    double meet = 0.0;                // 1 - d_TV(row_x, row_y)
    double separate = 0.0;            // d_TV(row_x, row_y)
    std::vector<double> rx;           // (p_x - p_y)^+ / d, sums to 1
    std::vector<double> ry;           // (p_y - p_x)^+ / d, sums to 1
    std::vector<double> meet_land;    // min(p_x, p_y), sums to meet
};

PairLaw pair_law(const StochasticMatrix& m, std::size_t x, std::size_t y) {
    const auto px = m.row(x);
    const auto py = m.row(y);
    const std::size_t n = m.size();
    PairLaw law;
    law.rx.assign(n, 0.0);
    law.ry.assign(n, 0.0);
    law.meet_land.assign(n, 0.0);
    double d = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
        law.meet_land[z] = std::min(px[z], py[z]);
        const double diff = px[z] - py[z];
        if (diff > 0.0)
            law.rx[z] = diff;
        else
            law.ry[z] = -diff;
        d += std::max(diff, 0.0);
    }
    law.separate = d;
    law.meet = 1.0 - d;
    if (d > 0.0) {
        for (auto& v : law.rx) v /= d;
        for (auto& v : law.ry) v /= d;
    }
    return law;
}

struct JointEvolution {
    std::size_t n = 0;
    std::vector<PairLaw> laws;       // indexed x * n + y for x != y
    std::vector<double> off;         // off-diagonal joint mass
    std::vector<double> diag;        // absorbed mass by current x-state
    double initial_diag_mass = 0.0;  // P(warmed-up pair already equal)

    explicit JointEvolution(const DiscreteChain& chain, long lag) {
        n = chain.transition.size();
        row_cache_.assign(n * n, 0.0);
        for (std::size_t x = 0; x < n; ++x) {
            const auto r = chain.transition.row(x);
            for (std::size_t z = 0; z < n; ++z) row_cache_[x * n + z] = r[z];
        }
        laws.resize(n * n);
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
                if (x != y) laws[x * n + y] = pair_law(chain.transition, x, y);

        const auto x_warm = marginal_at(chain, lag);
        off.assign(n * n, 0.0);
        diag.assign(n, 0.0);
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y) {
                const double w = x_warm[x] * chain.initial[y];
                if (x == y) {
                    diag[x] += w;
                    initial_diag_mass += w;
                } else {
                    off[x * n + y] = w;
                }
            }
    }

    // One coupled transition; returns the newly absorbed mass.
    double step() {
        std::vector<double> off_next(n * n, 0.0);
        std::vector<double> diag_next(n, 0.0);
        // absorbed mass keeps evolving as a single chain
        for (std::size_t z = 0; z < n; ++z) {
            const double w = diag[z];
            if (w == 0.0) continue;
            // row access through laws is not available for the diagonal; the
            // diagonal advances by the marginal kernel
            for (std::size_t t = 0; t < n; ++t) diag_next[t] += w * row_cache_[z * n + t];
        }
        double absorbed = 0.0;
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y) {
                if (x == y) continue;
                const double w = off[x * n + y];
                if (w <= 0.0) continue;
                const PairLaw& law = laws[x * n + y];
                absorbed += w * law.meet;
                for (std::size_t z = 0; z < n; ++z)
                    if (law.meet_land[z] > 0.0) diag_next[z] += w * law.meet_land[z];
                if (law.separate > 0.0) {
                    const double ws = w * law.separate;
                    for (std::size_t z1 = 0; z1 < n; ++z1) {
                        const double a = law.rx[z1];
                        if (a == 0.0) continue;
                        for (std::size_t z2 = 0; z2 < n; ++z2) {
                            const double b = law.ry[z2];
                            if (b == 0.0) continue;
                            off_next[z1 * n + z2] += ws * a * b;
                        }
                    }
                }
            }
        off = std::move(off_next);
        diag = std::move(diag_next);
        return absorbed;
    }

    double off_mass() const {
        double acc = 0.0;
        for (double v : off) acc += v;
        return acc;
    }

private:
    std::vector<double> row_cache_;
};

} // namespace

MeetingTimePmf meeting_time_pmf(const DiscreteChain& chain, long lag, long max_t) {
    if (lag < 1) throw std::invalid_argument("lag must be >= 1");
    const bool adaptive = max_t <= 0;
    const long hard_cap = adaptive ? 100000 : max_t;

    JointEvolution ev(chain, lag);

    MeetingTimePmf out;
    out.lag = lag;
    out.pmf.push_back(ev.initial_diag_mass); // tau = lag: the warmed-up pair coincides
    double residual = ev.off_mass();
    for (long t = 1; t <= hard_cap; ++t) {
        const double absorbed = ev.step();
        out.pmf.push_back(absorbed);
        residual -= absorbed;
        if (adaptive && residual < 1e-13) break;
    }
    out.residual = std::max(residual, 0.0);
    return out;
}

JDistribution j_distribution_from_tau(const MeetingTimePmf& tau_pmf, long k) {
    if (tau_pmf.residual >= 1e-12)
        throw TailTooHeavy("meeting-time pmf residual above 1e-12; extend max_t");
    std::vector<double> pmf;
    for (std::size_t t = 0; t < tau_pmf.pmf.size(); ++t) {
        const long tau = tau_pmf.lag + static_cast<long>(t);
        const long j = j_from_tau(tau, tau_pmf.lag, k);
        if (j >= static_cast<long>(pmf.size())) pmf.resize(static_cast<std::size_t>(j) + 1, 0.0);
        pmf[static_cast<std::size_t>(j)] += tau_pmf.pmf[t];
    }
    // park the sub-1e-12 residual above the realized support so the pmf sums
    // to 1 without deflating the bounds
    if (tau_pmf.residual > 0.0) pmf.push_back(tau_pmf.residual);
    return JDistribution(std::move(pmf));
}

std::vector<double> joint_distribution_after(const DiscreteChain& chain, long lag, long steps) {
    JointEvolution ev(chain, lag);
    for (long s = 0; s < steps; ++s) ev.step();
    std::vector<double> joint(ev.n * ev.n, 0.0);
    for (std::size_t x = 0; x < ev.n; ++x)
        for (std::size_t y = 0; y < ev.n; ++y) joint[x * ev.n + y] = ev.off[x * ev.n + y];
    for (std::size_t z = 0; z < ev.n; ++z) joint[z * ev.n + z] += ev.diag[z];
    return joint;
}

} // namespace lagcoup
