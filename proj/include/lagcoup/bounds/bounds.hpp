#pragma once

#include <span>
#include <utility>
#include <vector>

#include "lagcoup/bounds/j_distribution.hpp"
#include "lagcoup/core/coupling.hpp"

namespace lagcoup {

// Total-variation bounds computed from the distribution of the meeting count J.
// old_bound_exact is E[J]; the remaining forms all evaluate the sharper bound
//   B = sum_{j>=1} min{P(J >= j), P(J <= j)}
// through its equivalent expressions, which agree to 1e-12 on valid inputs.

double old_bound_exact(const JDistribution& jd);

// sum_{j>=1} min{P(J>=j), P(J<=j)}
double new_bound_exact(const JDistribution& jd);

// E|J - m_J| + P(J>0) - max{P(J>m_J), P(J<m_J)}, m_J the smallest integer median of J
double new_bound_median_form(const JDistribution& jd);

// E|Jt - m| + P(J>0) - 0.5 where Jt = J - xi, xi a fair coin, m its smallest
// integer median
double new_bound_tilde_form(const JDistribution& jd);

// 0.5 sum_{j>=1} [1 - |P(tau>k+(j+1)L) + P(tau>k+jL) - 1|] + 0.5 P(tau>k+L).
// survival[j] = P(tau > k + jL); entries past the end are treated as 0, and
// the last provided entry must be below 1e-12 unless the vector is exhaustive.
double new_bound_tau_form(std::span<const double> survival, long k, long lag);

// survival[j] = P(tau > k + jL) induced by a J distribution via
// {J > j} = {tau > k + (j+1)L}; feeds new_bound_tau_form.
std::vector<double> tau_survivals_from_j(const JDistribution& jd);

// 2 p0 >= 1 - p1, exactly the condition for the two bounds to coincide
bool bounds_equal_predicate(const JDistribution& jd);

// Empirical bound estimates across Q coupled processes at a fixed (k, L):
//   old_hat = mean J^(q)
//   new_hat = e + p - max(g, s)
// with e = mean |J - m|, p = freq(J > 0), g = freq(J > m), s = freq(J < m).
// Medians m^(q) come from the leave-one-out procedure over the randomized
// counts; negative medians clamp to 0 (the estimated median is nonnegative).
struct EmpiricalBounds {
    double old_hat = 0.0;
    double new_hat = 0.0;
};

EmpiricalBounds empirical_bounds(std::span<const MeetingStats> stats, std::span<const long> loo_medians);

} // namespace lagcoup
