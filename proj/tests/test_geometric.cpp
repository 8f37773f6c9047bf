#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lagcoup/bounds/bounds.hpp"
#include "lagcoup/bounds/geometric.hpp"
#include "lagcoup/oracle/discrete_chain.hpp"
#include "lagcoup/rng.hpp"

using namespace lagcoup;

TEST_CASE("instant coupling is a point mass at zero") {
    const auto jd = geometric_j_distribution({1.0, 3, 2});
    CHECK(jd.p(0) == 1.0);
    CHECK(geometric_new_bound({1.0, 3, 2}) == 0.0);
    CHECK(geometric_old_bound({1.0, 3, 2}) == 0.0);
}

TEST_CASE("pmf values at p = 0.5, k = 0, L = 1") {
    const auto jd = geometric_j_distribution({0.5, 0, 1});
    CHECK(jd.p(0) == doctest::Approx(0.5).epsilon(1e-14));
    for (long j = 0; j <= 10; ++j)
        CHECK(jd.survival(j + 1) == doctest::Approx(std::pow(0.5, 1 + j)).epsilon(1e-12));
}

TEST_CASE("induced mean matches the closed form") {
    for (double p : {0.01, 0.05, 0.2, 0.5, 0.9, 0.99}) {
        for (long k : {0L, 1L, 5L, 17L}) {
            for (long lag : {1L, 2L, 5L, 10L}) {
                const GeometricSpec spec{p, k, lag};
                const double closed = geometric_old_bound(spec);
                const double induced = old_bound_exact(geometric_j_distribution(spec));
                REQUIRE(std::fabs(closed - induced) <= 1e-12 * std::max(1.0, closed));
            }
        }
    }
}

TEST_CASE("fast mixing collapses the sharper bound onto the mean bound") {
    // p = 0.9, k = 5, L = 1: the crossover sits at m <= 0
    const GeometricSpec spec{0.9, 5, 1};
    const double expected = std::pow(0.1, 6) / 0.9;
    CHECK(geometric_new_bound(spec) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(geometric_old_bound(spec) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("closed form, series form, and pmf route agree") {
    for (double p : {0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.95}) {
        for (long k : {0L, 2L, 9L, 20L}) {
            for (long lag : {1L, 2L, 5L, 10L}) {
                const GeometricSpec spec{p, k, lag};
                const double closed = geometric_new_bound(spec);
                const double series = geometric_new_bound_series(spec);
                REQUIRE(std::fabs(closed - series) <= 1e-10);
                const double via_pmf = new_bound_exact(geometric_j_distribution(spec));
                REQUIRE(std::fabs(closed - via_pmf) <= 1e-9 * std::max(1.0, closed));
            }
        }
    }
}

TEST_CASE("dominance across the slow-mixing grid, strict for small p") {
    for (double p = 0.01; p <= 0.5 + 1e-12; p += 0.07) {
        for (long k = 0; k <= 20; k += 4) {
            for (long lag = 1; lag <= 10; lag += 3) {
                const GeometricSpec spec{p, k, lag};
                REQUIRE(geometric_new_bound(spec) <= geometric_old_bound(spec) + 1e-10);
            }
        }
    }
    CHECK(geometric_new_bound({0.01, 0, 1}) < geometric_old_bound({0.01, 0, 1}) - 1.0);
}

TEST_CASE("injected coupling times reproduce the analytic meeting-count law") {
    const GeometricSpec spec{0.3, 2, 2};
    RngStream rng(51);
    const int n = 200000;
    std::vector<double> counts;
    for (int i = 0; i < n; ++i) {
        const long tau = sample_geometric_tau(spec, rng);
        REQUIRE(tau >= spec.lag);
        const long j = j_from_tau(tau, spec.lag, spec.k);
        if (j >= static_cast<long>(counts.size())) counts.resize(static_cast<std::size_t>(j) + 1, 0.0);
        counts[static_cast<std::size_t>(j)] += 1.0;
    }
    const auto jd = geometric_j_distribution(spec);
    for (std::size_t j = 0; j < counts.size(); ++j) {
        const double p = jd.p(j);
        const double expect = p * n;
        if (expect < 25.0) continue;
        const double sigma = std::sqrt(n * p * (1.0 - p));
        REQUIRE(std::fabs(counts[j] - expect) <= 3.5 * sigma);
    }
}

TEST_CASE("pushforward of an analytic tau pmf equals the direct construction") {
    const GeometricSpec spec{0.35, 3, 2};
    const double q = 1.0 - spec.p;
    MeetingTimePmf tau_pmf;
    tau_pmf.lag = spec.lag;
    double mass = spec.p; // P(tau = lag + t) = p q^t
    double total = 0.0;
    while (mass > 1e-16) {
        tau_pmf.pmf.push_back(mass);
        total += mass;
        mass *= q;
    }
    tau_pmf.residual = std::max(0.0, 1.0 - total);
    const auto pushed = j_distribution_from_tau(tau_pmf, spec.k);
    const auto direct = geometric_j_distribution(spec);
    const std::size_t n = std::min(pushed.explicit_size(), direct.explicit_size());
    REQUIRE(n >= 5);
    for (std::size_t j = 0; j < n; ++j)
        REQUIRE(std::fabs(pushed.p(j) - direct.p(j)) <= 1e-12);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(geometric_j_distribution({0.0, 0, 1}), PlanInvalid);
    CHECK_THROWS_AS(geometric_j_distribution({1.5, 0, 1}), PlanInvalid);
    CHECK_THROWS_AS(geometric_j_distribution({0.5, -1, 1}), PlanInvalid);
    CHECK_THROWS_AS(geometric_j_distribution({0.5, 0, 0}), PlanInvalid);
}
