#include "lagcoup/bounds/geometric.hpp"

#include <cmath>
#include <vector>

#include "lagcoup/errors.hpp"
#include "lagcoup/rng.hpp"

namespace lagcoup {

void GeometricSpec::validate() const {
    if (!(p > 0.0) || !(p <= 1.0)) throw PlanInvalid("geometric p must lie in (0, 1]");
    if (k < 0) throw PlanInvalid("k must be nonnegative");
    if (lag < 1) throw PlanInvalid("lag must be >= 1");
}

namespace {

// 1 - q^L computed stably for q near 1
double one_minus_qL(double p, long lag) { return -std::expm1(static_cast<double>(lag) * std::log1p(-p)); }

double q_pow(double q, double e) { return std::exp(e * std::log(q)); }

} // namespace

double geometric_old_bound(const GeometricSpec& spec) {
    spec.validate();
    if (spec.p >= 1.0) return 0.0;
    const double q = 1.0 - spec.p;
    return q_pow(q, static_cast<double>(spec.k + 1)) / one_minus_qL(spec.p, spec.lag);
}

namespace {

// largest integer m with P(J >= m) >= P(J <= m), i.e. with
// q^{k+1+L(m-1)} (1 + q^L) >= 1; computed from the log form and then nudged
// onto the exact integer boundary.
long crossover_m(const GeometricSpec& spec) {
    const double q = 1.0 - spec.p;
    const double lq = std::log(q);
    const double L = static_cast<double>(spec.lag);
    const double raw =
        (L - static_cast<double>(spec.k) - 1.0) / L - std::log1p(q_pow(q, L)) / (L * lq);
    long m = static_cast<long>(std::floor(raw));
    const auto holds = [&](long mm) {
        return (static_cast<double>(spec.k + 1) + L * (static_cast<double>(mm) - 1.0)) * lq +
                   std::log1p(q_pow(q, L)) >=
               0.0;
    };
    while (holds(m + 1)) ++m;
    while (m > 0 && !holds(m)) --m;
    return m;
}

} // namespace

double geometric_new_bound(const GeometricSpec& spec) {
    spec.validate();
    if (spec.p >= 1.0) return 0.0;
    const double q = 1.0 - spec.p;
    const long m = crossover_m(spec);
    if (m <= 0) return geometric_old_bound(spec);
    const double L = static_cast<double>(spec.lag);
    const double mL = static_cast<double>(m) * L;
    const double corr = q_pow(q, static_cast<double>(spec.k + 1) + L) *
                        (1.0 - q_pow(q, mL) - q_pow(q, mL - L)) / one_minus_qL(spec.p, spec.lag);
    return static_cast<double>(m) - corr;
}

double geometric_new_bound_series(const GeometricSpec& spec) {
    spec.validate();
    if (spec.p >= 1.0) return 0.0;
    const double q = 1.0 - spec.p;
    const double L = static_cast<double>(spec.lag);
    const double qL = q_pow(q, L);
    // survival at lag multiples: s_j = P(tau > k + jL) = q^{k+1+L(j-1)}
    double sj = q_pow(q, static_cast<double>(spec.k + 1)); // j = 1
    double acc = 0.5 * sj;                                 // the standalone P(tau > k+L) term
    for (long j = 1; j < 100000000; ++j) {
        const double sj1 = sj * qL;
        const double term = 0.5 * (1.0 - std::fabs(sj1 + sj - 1.0));
        acc += term;
        sj = sj1;
        if (sj * (1.0 + qL) < 1e-14) {
            // remaining terms are 0.5 (s_j + s_{j+1}) summed over the tail
            acc += 0.5 * sj * (1.0 + qL) / (1.0 - qL);
            break;
        }
    }
    return acc;
}

JDistribution geometric_j_distribution(const GeometricSpec& spec) {
    spec.validate();
    const double q = 1.0 - spec.p;
    if (spec.p >= 1.0) return JDistribution({1.0});
    const double qL = q_pow(q, static_cast<double>(spec.lag));
    std::vector<double> pmf;
    pmf.push_back(-std::expm1(static_cast<double>(spec.k + 1) * std::log(q))); // 1 - q^{k+1}
    // P(J = j) = q^{k+1+L(j-1)} (1 - q^L) for j >= 1, a geometric tail with ratio q^L
    double surv = q_pow(q, static_cast<double>(spec.k + 1)); // P(J > 0)
    while (surv > 1e-15 && pmf.size() < 2000000) {
        const double next = surv * qL;
        pmf.push_back(surv - next);
        surv = next;
    }
    std::optional<GeometricTail> tail;
    if (surv > 0.0) tail = GeometricTail{surv, qL};
    return JDistribution(std::move(pmf), tail);
}

long sample_geometric_tau(const GeometricSpec& spec, RngStream& rng) {
    return spec.lag - 1 + rng.geometric(spec.p);
}

} // namespace lagcoup
