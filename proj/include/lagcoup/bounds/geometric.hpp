#pragma once

#include "lagcoup/bounds/j_distribution.hpp"

namespace lagcoup {

// Analytic family where the coupling time satisfies tau - (L - 1) ~ Geo(p) on
// {1, 2, ...}. With q = 1 - p:
//   P(J = 0) = 1 - q^{k+1},  P(J > j) = q^{k+1+Lj},
// so J mixes a point mass at 0 with a shifted geometric, E[J] = q^{k+1}/(1-q^L),
// and the sharper bound has a closed form.
struct GeometricSpec {
    double p = 0.5; // success probability in (0, 1]
    long k = 0;     // burn-in index
    long lag = 1;   // L

    void validate() const;
};

// E[J] = q^{k+1} / (1 - q^L)
double geometric_old_bound(const GeometricSpec& spec);

// Closed form of the sharper bound: with m the largest integer such that
// P(J >= m) >= P(J <= m), the bound is E[J] when m <= 0 and otherwise
//   m - q^{k+1+L} (1 - q^{mL} - q^{(m-1)L}) / (1 - q^L).
double geometric_new_bound(const GeometricSpec& spec);

// The same bound as the survival-form series, truncated once terms fall below
// 1e-14 with the geometric remainder added in closed form. Agrees with
// geometric_new_bound to 1e-10.
double geometric_new_bound_series(const GeometricSpec& spec);

// Explicit pmf of J (with analytic tail descriptor) for the spec.
JDistribution geometric_j_distribution(const GeometricSpec& spec);

// Draw tau ~ L - 1 + Geo(p); the injection mode of the runner.
long sample_geometric_tau(const GeometricSpec& spec, class RngStream& rng);

} // namespace lagcoup
