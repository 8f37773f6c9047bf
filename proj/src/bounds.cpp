#include "lagcoup/bounds/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "lagcoup/errors.hpp"

namespace lagcoup {

double old_bound_exact(const JDistribution& jd) { return jd.mean(); }

double new_bound_exact(const JDistribution& jd) {
    double acc = 0.0;
    const long n = static_cast<long>(jd.explicit_size());
    for (long j = 1; j <= n; ++j) {
        const double ge = jd.survival(j);
        const double le = jd.cdf(j);
        if (ge < 1e-14 && le < 1e-14) break;
        acc += std::min(ge, le);
    }
    if (jd.tail() && jd.tail()->mass > 0.0) {
        // beyond the explicit support the min is the upper tail; its sum is
        // sum_{j > n} P(J >= j) = mass * ratio/(1-ratio) ... plus j = n covered above
        const double r = jd.tail()->ratio;
        acc += jd.tail()->mass * r / (1.0 - r);
    }
    return acc;
}

double new_bound_median_form(const JDistribution& jd) {
    const long m = jd.smallest_integer_median();
    const double p_gt0 = jd.survival(1);
    const double above = jd.survival(m + 1);
    const double below = jd.cdf(m - 1);
    return jd.abs_deviation(m) + p_gt0 - std::max(above, below);
}

double new_bound_tilde_form(const JDistribution& jd) {
    // distribution of J - xi on {-1, 0, 1, ...}: P(Jt = j) = (p_j + p_{j+1}) / 2
    const long n = static_cast<long>(jd.explicit_size());
    // smallest integer median of Jt: P(Jt <= m) = cdf(m) - p(m... ) use
    // P(Jt <= m) = 0.5 (P(J <= m) + P(J <= m+1))
    long med = 0;
    {
        long m = -1;
        for (;; ++m) {
            const double c = 0.5 * (jd.cdf(m) + jd.cdf(m + 1));
            if (c >= 0.5) break;
            if (m > n + 2000000) throw InvalidDistribution("tilde median not reached");
        }
        med = m;
    }
    // E|Jt - med| = 0.5 (E|J - med| + E|J - (med+1)|)  since Jt = J - xi
    const double ead = 0.5 * (jd.abs_deviation(med) + jd.abs_deviation(med + 1));
    return ead + jd.survival(1) - 0.5;
}

double new_bound_tau_form(std::span<const double> survival, long /*k*/, long lag) {
    if (lag < 1) throw InvalidSurvival("lag must be >= 1");
    double prev = 1.0;
    for (double v : survival) {
        if (!(v >= 0.0) || !(v <= 1.0) || v > prev + 1e-12)
            throw InvalidSurvival("survival values must be nonincreasing probabilities");
        prev = v;
    }
    const auto at = [&](long j) -> double {
        if (j < static_cast<long>(survival.size())) return survival[static_cast<std::size_t>(j)];
        return 0.0;
    };
    if (!survival.empty() && survival.back() > 1e-12)
        throw InvalidSurvival("survival vector truncated above 1e-12");
    double acc = 0.0;
    for (long j = 1; j + 0 <= static_cast<long>(survival.size()); ++j) {
        const double sj = at(j);
        const double sj1 = at(j + 1);
        if (sj < 1e-15 && sj1 < 1e-15) break;
        acc += 0.5 * (1.0 - std::fabs(sj1 + sj - 1.0));
    }
    return acc + 0.5 * at(1);
}

std::vector<double> tau_survivals_from_j(const JDistribution& jd) {
    // P(tau > k + jL) = P(J >= j) for j >= 1; index 0 holds the total mass so
    // callers can index by j directly.
    long n = static_cast<long>(jd.explicit_size());
    if (jd.tail() && jd.tail()->mass > 0.0) {
        // extend until the analytic tail is negligible
        double m = jd.tail()->mass;
        while (m > 1e-15 && n < 40000000) {
            m *= jd.tail()->ratio;
            ++n;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(n) + 2, 0.0);
    for (long j = 0; j < static_cast<long>(out.size()); ++j) out[static_cast<std::size_t>(j)] = jd.survival(j);
    return out;
}

bool bounds_equal_predicate(const JDistribution& jd) {
    return 2.0 * jd.p(0) >= 1.0 - jd.p(1);
}

EmpiricalBounds empirical_bounds(std::span<const MeetingStats> stats, std::span<const long> loo_medians) {
    const std::size_t q_count = stats.size();
    if (q_count < 2) throw TooFewProcesses("empirical bounds need at least 2 processes");
    if (loo_medians.size() != q_count) throw TooFewProcesses("one leave-one-out median per process required");
    double e = 0.0, p = 0.0, g = 0.0, s = 0.0, jbar = 0.0;
    for (std::size_t q = 0; q < q_count; ++q) {
        const long j = stats[q].j;
        const long m = std::max<long>(0, loo_medians[q]);
        e += static_cast<double>(std::labs(j - m));
        p += j > 0 ? 1.0 : 0.0;
        g += j > m ? 1.0 : 0.0;
        s += j < m ? 1.0 : 0.0;
        jbar += static_cast<double>(j);
    }
    const double inv = 1.0 / static_cast<double>(q_count);
    e *= inv;
    p *= inv;
    g *= inv;
    s *= inv;
    jbar *= inv;
    return {jbar, e + p - std::max(g, s)};
}

} // namespace lagcoup
