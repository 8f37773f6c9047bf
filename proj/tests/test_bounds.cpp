#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lagcoup/bounds/bounds.hpp"
#include "lagcoup/bounds/geometric.hpp"
#include "lagcoup/validate/battery.hpp"

using namespace lagcoup;

TEST_CASE("mean bound: frozen sums") {
    CHECK(old_bound_exact(JDistribution({1.0})) == 0.0);
    CHECK(old_bound_exact(JDistribution({0.6, 0.4})) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(old_bound_exact(JDistribution({0.2, 0.2, 0.6})) == doctest::Approx(1.4).epsilon(1e-14));
}

TEST_CASE("sharper bound: frozen evaluations and equality regime") {
    CHECK(new_bound_exact(JDistribution({1.0})) == 0.0);
    // min(P(J>=1), P(J<=1)) = min(0.4, 1) = 0.4, equal to the mean bound
    CHECK(new_bound_exact(JDistribution({0.6, 0.4})) == doctest::Approx(0.4).epsilon(1e-14));
    // j=1: min(0.8, 0.4); j=2: min(0.6, 1) -> 1.0 < 1.4
    CHECK(new_bound_exact(JDistribution({0.2, 0.2, 0.6})) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("median form: frozen evaluations") {
    // m=2, E|J-2| = 0.6, P(J>0) = 0.8, max(P(J>2), P(J<2)) = 0.4
    CHECK(new_bound_median_form(JDistribution({0.2, 0.2, 0.6})) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(new_bound_median_form(JDistribution({1.0})) == 0.0);
    // m=0, E|J| = 0.4, P(J>0) = 0.4, S = 0.4
    CHECK(new_bound_median_form(JDistribution({0.6, 0.4})) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("randomized-count form agrees on a frozen case") {
    // P(Jt=-1)=0.1, median 1, E|Jt-1| = 0.7, + 0.8 - 0.5 = 1.0
    CHECK(new_bound_tilde_form(JDistribution({0.2, 0.2, 0.6})) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("survival form: degenerate and cross-form cases") {
    CHECK(new_bound_tau_form(std::vector<double>{1.0, 0.0, 0.0}, 0, 1) == 0.0);

    // geometric survivals must reproduce the closed form
    const GeometricSpec gs{0.5, 0, 1};
    const auto jd = geometric_j_distribution(gs);
    const auto surv = tau_survivals_from_j(jd);
    CHECK(new_bound_tau_form(surv, gs.k, gs.lag) ==
          doctest::Approx(geometric_new_bound(gs)).epsilon(1e-12));

    // malformed survivals
    CHECK_THROWS_AS(new_bound_tau_form(std::vector<double>{0.5, 0.9, 0.0}, 0, 1), InvalidSurvival);
    CHECK_THROWS_AS(new_bound_tau_form(std::vector<double>{1.0, 0.5}, 0, 1), InvalidSurvival);
}

TEST_CASE("survival form matches the direct form on a random battery") {
    RngStream rng(41);
    for (int i = 0; i < 100; ++i) {
        const auto jd = random_j_distribution(rng);
        const auto surv = tau_survivals_from_j(jd);
        const double direct = new_bound_exact(jd);
        const double via_tau = new_bound_tau_form(surv, 3, 2);
        REQUIRE(std::fabs(direct - via_tau) <= 1e-12);
    }
}

TEST_CASE("equality predicate: frozen cases") {
    CHECK(bounds_equal_predicate(JDistribution({0.6, 0.4})));
    CHECK_FALSE(bounds_equal_predicate(JDistribution({0.2, 0.2, 0.6})));
    // p0 = 0.5 exactly: 2 p0 = 1 >= 1 - p1 for any tail
    CHECK(bounds_equal_predicate(JDistribution({0.5, 0.0, 0.25, 0.25})));
}

TEST_CASE("equality witness with median 1 but unequal bounds") {
    const JDistribution jd({0.3, 0.3, 0.4});
    CHECK(jd.smallest_integer_median() == 1);
    CHECK_FALSE(bounds_equal_predicate(jd)); // 0.6 < 0.7
    CHECK(new_bound_exact(jd) < old_bound_exact(jd) - 1e-12);
}

TEST_CASE("dominance, form agreement, equality condition over a random battery") {
    RngStream rng(42);
    int equal_cases = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto jd = random_j_distribution(rng);
        const double old_b = old_bound_exact(jd);
        const double new_b = new_bound_exact(jd);
        REQUIRE(new_b <= old_b + 1e-9);
        REQUIRE(new_b >= -1e-12);
        REQUIRE(std::fabs(new_b - new_bound_median_form(jd)) <= 1e-12);
        REQUIRE(std::fabs(new_b - new_bound_tilde_form(jd)) <= 1e-12);
        const bool equal = std::fabs(new_b - old_b) < 1e-12;
        REQUIRE(equal == bounds_equal_predicate(jd));
        if (equal) {
            ++equal_cases;
            // equality forces the smallest integer median down to 0 or 1
            REQUIRE(jd.smallest_integer_median() <= 1);
        }
    }
    CHECK(equal_cases > 100); // the battery covers both regimes
}

TEST_CASE("coupling-interval criterion matches the predicate on geometric specs") {
    // equality holds iff P(zeta <= L) >= P(zeta > 2L) with zeta the residual
    // coupling time; for the analytic family that is 1 - q^{k+1} >= q^{k+1+L}
    for (double p : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (long k : {0L, 1L, 2L, 5L, 10L, 25L}) {
            for (long lag : {1L, 2L, 3L, 8L}) {
                const GeometricSpec spec{p, k, lag};
                const auto jd = geometric_j_distribution(spec);
                const double q = 1.0 - p;
                const bool interval_criterion =
                    1.0 - std::pow(q, k + 1) >= std::pow(q, static_cast<double>(k + 1 + lag));
                REQUIRE(bounds_equal_predicate(jd) == interval_criterion);
            }
        }
    }
}

TEST_CASE("empirical bound estimates: frozen examples") {
    const auto mk = [](std::vector<long> js) {
        std::vector<MeetingStats> stats;
        for (long j : js) stats.push_back({j, j, 0, 1});
        return stats;
    };
    // all processes coupled before k
    CHECK(empirical_bounds(mk({0, 0, 0, 0}), std::vector<long>{0, 0, 0, 0}).old_hat == 0.0);
    CHECK(empirical_bounds(mk({0, 0, 0, 0}), std::vector<long>{0, 0, 0, 0}).new_hat == 0.0);

    // J = [2,2,2,2] with medians 2: e=0, p=1, g=s=0
    const auto eb = empirical_bounds(mk({2, 2, 2, 2}), std::vector<long>{2, 2, 2, 2});
    CHECK(eb.old_hat == 2.0);
    CHECK(eb.new_hat == 1.0);

    CHECK_THROWS_AS(empirical_bounds(mk({1}), std::vector<long>{0}), TooFewProcesses);
}

TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(JDistribution({0.5, 0.4}), InvalidDistribution);      // mass deficit
    CHECK_THROWS_AS(JDistribution({0.5, -0.1, 0.6}), InvalidDistribution); // negative
    CHECK_THROWS_AS(JDistribution({}), InvalidDistribution);
    const JDistribution jd({0.25, 0.5, 0.25});
    CHECK(jd.cdf(0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(jd.survival(1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(jd.smallest_integer_median() == 1);
    CHECK(jd.abs_deviation(1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("analytic tail: moments and medians match a long explicit pmf") {
    // same distribution represented two ways
    const double r = 0.8, head = 0.3;
    std::vector<double> explicit_pmf{head};
    double mass = (1.0 - head) * (1.0 - r);
    for (int i = 0; i < 400; ++i) {
        explicit_pmf.push_back(mass);
        mass *= r;
    }
    double rest = 1.0;
    for (double v : explicit_pmf) rest -= v;
    const JDistribution with_tail({head}, GeometricTail{1.0 - head, r});
    JDistribution long_pmf = [&] {
        auto p = explicit_pmf;
        p.back() += rest;
        return JDistribution(p);
    }();
    CHECK(with_tail.mean() == doctest::Approx(long_pmf.mean()).epsilon(1e-9));
    CHECK(with_tail.smallest_integer_median() == long_pmf.smallest_integer_median());
    CHECK(new_bound_exact(with_tail) == doctest::Approx(new_bound_exact(long_pmf)).epsilon(1e-9));
    CHECK(new_bound_median_form(with_tail) ==
          doctest::Approx(new_bound_median_form(long_pmf)).epsilon(1e-9));
}
