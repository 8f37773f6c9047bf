#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lagcoup/core/coupling.hpp"
#include "lagcoup/estimators/estimators.hpp"
#include "lagcoup/kernels/discrete.hpp"
#include "lagcoup/stats.hpp"

using namespace lagcoup;

namespace {

// hand-buildable real-valued trace
CoupledTrace<double> make_trace(std::vector<double> x, std::vector<double> y, long tau, long lag) {
    CoupledTrace<double> t;
    t.x_path = std::move(x);
    t.y_path = std::move(y);
    t.tau = tau;
    t.lag = lag;
    return t;
}

const TestFunction<double> identity = [](const double& s) { return std::vector<double>{s}; };

DiscreteMatrixKernel two_state(double stay) {
    return DiscreteMatrixKernel{StochasticMatrix({{stay, 1.0 - stay}, {1.0 - stay, stay}})};
}

LagConfig<long> uniform_init(long lag) {
    LagConfig<long> cfg;
    cfg.lag = lag;
    cfg.max_sweeps = 1000000;
    cfg.initial_distribution = [](RngStream& r) { return r.coin() ? 1L : 0L; };
    return cfg;
}

const TestFunction<long> indicator1 = [](const long& s) {
    return std::vector<double>{s == 1 ? 1.0 : 0.0};
};

} // namespace

TEST_CASE("early meeting returns the plain draw") {
    // tau <= k + L: no correction terms
    auto t = make_trace({1.0, 2.0, 3.0, 4.0}, {2.0, 3.0, 4.0}, 1, 1);
    EstimatorInput<double> in{&t, 1, 1};
    CHECK(h_forward(in, identity)[0] == 2.0);
    CHECK(h_backward(in, identity)[0] == 2.0);
}

TEST_CASE("hand-unrolled correction terms at lag 1") {
    // tau=3, L=1, k=0: J=2
    auto t = make_trace({10.0, 20.0, 40.0, 80.0, 160.0}, {15.0, 25.0, 80.0, 160.0}, 3, 1);
    EstimatorInput<double> in{&t, 0, 0};
    const double fwd = h_forward(in, identity)[0];
    CHECK(fwd == doctest::Approx(10.0 + (20.0 - 15.0) + (40.0 - 25.0)).epsilon(1e-15));
    const double bwd = h_backward(in, identity)[0];
    CHECK(bwd == doctest::Approx(40.0 + (10.0 - 15.0) + (20.0 - 25.0)).epsilon(1e-15));
    CHECK(fwd == doctest::Approx(bwd).epsilon(1e-14));
}

TEST_CASE("backward anchor exceeds the naive meeting index") {
    // tau = L + k + M with 0 < M < L: the anchor k + J L sits above (tau-L) v k
    const long lag = 3, k = 1, tau = 6;
    CHECK(j_from_tau(tau, lag, k) == 1);
    std::vector<double> x(12), y(9);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 100.0 + static_cast<double>(i);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 200.0 + static_cast<double>(i);
    auto t = make_trace(x, y, tau, lag);
    EstimatorInput<double> in{&t, k, k};
    // anchor must be x[4], not x[3]
    CHECK(h_backward(in, identity)[0] ==
          doctest::Approx(x[4] + (x[1] - y[1])).epsilon(1e-15));
}

TEST_CASE("control-variate truncations") {
    auto t = make_trace({10.0, 20.0, 40.0, 80.0, 160.0}, {15.0, 25.0, 80.0, 160.0}, 3, 1);
    EstimatorInput<double> in{&t, 0, 0};
    const double bwd = h_backward(in, identity)[0];
    // m_hat = -1: empty sum
    CHECK(h_cv_single(in, identity, -1)[0] == bwd);
    // m_hat = 0: subtract h(X_0) - h(Y_0)
    CHECK(h_cv_single(in, identity, 0)[0] == doctest::Approx(bwd - (10.0 - 15.0)).epsilon(1e-14));
    // m_hat = 2: includes a term past the meeting time, which is nonzero
    CHECK(h_cv_single(in, identity, 2)[0] ==
          doctest::Approx(bwd - (10.0 - 15.0) - (20.0 - 25.0) - (40.0 - 80.0)).epsilon(1e-14));
}

TEST_CASE("time-averaged forms collapse to their single-burn-in versions") {
    auto t = make_trace({10.0, 20.0, 40.0, 80.0, 160.0, 320.0}, {15.0, 25.0, 80.0, 160.0, 320.0}, 3, 1);
    EstimatorInput<double> at_k{&t, 1, 1};
    CHECK(h_timeavg(at_k, identity)[0] == h_backward(at_k, identity)[0]);
    const std::vector<long> one_m{0};
    CHECK(h_timeavg_cv(at_k, identity, one_m)[0] == h_cv_single(at_k, identity, 0)[0]);

    // all sentinels: the control-variate sums are empty
    EstimatorInput<double> range{&t, 0, 3};
    const std::vector<long> sentinels(4, -1);
    CHECK(h_timeavg_cv(range, identity, sentinels)[0] == h_timeavg(range, identity)[0]);

    // tau <= k + L: plain ergodic average of the x path
    auto early = make_trace({1.0, 4.0, 9.0, 16.0, 25.0}, {4.0, 9.0, 16.0, 25.0}, 1, 1);
    EstimatorInput<double> erg{&early, 1, 3};
    CHECK(h_timeavg(erg, identity)[0] == doctest::Approx((4.0 + 9.0 + 16.0) / 3.0).epsilon(1e-15));
}

TEST_CASE("reads past the stored paths raise IndexOutOfTrace") {
    auto t = make_trace({1.0, 2.0, 3.0}, {2.0, 3.0}, 1, 1);
    EstimatorInput<double> in{&t, 5, 5};
    CHECK_THROWS_AS(h_backward(in, identity), IndexOutOfTrace);
    EstimatorInput<double> in2{&t, 0, 0};
    CHECK_THROWS_AS(h_cv_single(in2, identity, 10), IndexOutOfTrace);
}

TEST_CASE("leave-one-out medians: frozen examples and sorted-drop equivalence") {
    const std::vector<long> constant{3, 3, 3, 3};
    CHECK(loo_median(constant, 0) == 3);
    const std::vector<long> mixed{0, 1, 2, 5};
    CHECK(loo_median(mixed, 3) == 1);
    CHECK(loo_median(mixed, 0) == 2);
    // even-sized remainder takes the lower middle
    const std::vector<long> five{1, 2, 3, 4, 10};
    CHECK(loo_median(five, 4) == 2);

    RngStream rng(31);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 30.0);
        std::vector<long> v(n);
        for (auto& x : v) x = static_cast<long>(rng.uniform01() * 10.0) - 1;
        const auto all = loo_medians_all(v);
        for (std::size_t q = 0; q < n; ++q) REQUIRE(all[q] == loo_median(v, q));
    }
    CHECK_THROWS_AS(loo_median(std::vector<long>{1}, 0), TooFewProcesses);
}

TEST_CASE("estimators are linear in h") {
    auto kernel = two_state(0.7);
    RngStream rng(32);
    auto cfg = uniform_init(2);
    const TestFunction<long> h1 = [](const long& s) {
        return std::vector<double>{s == 0 ? 1.7 : -0.4};
    };
    const TestFunction<long> h2 = [](const long& s) {
        return std::vector<double>{s == 0 ? -2.5 : 3.1};
    };
    const double a = 1.25, b = -0.75;
    const TestFunction<long> combo = [&](const long& s) {
        return std::vector<double>{a * h1(s)[0] + b * h2(s)[0]};
    };
    for (int rep = 0; rep < 100; ++rep) {
        auto trace = run_lagged_coupling(kernel, cfg, rng);
        RngStream ext(1000 + static_cast<std::uint64_t>(rep));
        extend_trace(trace, kernel, 20, ext);
        for (long k : {0L, 2L, 5L}) {
            EstimatorInput<long> in{&trace, k, k + 4};
            const auto forms = {h_forward<long>, h_backward<long>};
            for (auto* fn : forms) {
                const double lhs = fn(in, combo)[0];
                const double rhs = a * fn(in, h1)[0] + b * fn(in, h2)[0];
                REQUIRE(std::fabs(lhs - rhs) <= 1e-10 * std::max(1.0, std::fabs(rhs)));
            }
            const double lhs = h_timeavg(in, combo)[0];
            const double rhs = a * h_timeavg(in, h1)[0] + b * h_timeavg(in, h2)[0];
            REQUIRE(std::fabs(lhs - rhs) <= 1e-10 * std::max(1.0, std::fabs(rhs)));
        }
    }
}

TEST_CASE("forward equals backward on random traces and burn-ins") {
    RngStream rng(33);
    for (int rep = 0; rep < 200; ++rep) {
        auto kernel = two_state(0.55 + 0.4 * rng.uniform01());
        const long lag = 1 + static_cast<long>(rng.uniform01() * 4.0);
        auto trace = run_lagged_coupling(kernel, uniform_init(lag), rng);
        RngStream ext(2000 + static_cast<std::uint64_t>(rep));
        extend_trace(trace, kernel, 16, ext);
        const double w0 = rng.normal(), w1 = rng.normal();
        const TestFunction<long> h = [w0, w1](const long& s) {
            return std::vector<double>{s == 0 ? w0 : w1};
        };
        for (long k = 0; k <= 15; ++k) {
            EstimatorInput<long> in{&trace, k, k};
            const double f = h_forward(in, h)[0];
            const double bk = h_backward(in, h)[0];
            REQUIRE(std::fabs(f - bk) <= 1e-12 * std::max({1.0, std::fabs(f), std::fabs(bk)}));
        }
    }
}

TEST_CASE("unbiasedness on the exactly solvable two-state chain") {
    // pi(1) = 3/7 for rows [[0.7,0.3],[0.4,0.6]]
    DiscreteMatrixKernel kernel{StochasticMatrix({{0.7, 0.3}, {0.4, 0.6}})};
    const double truth = 3.0 / 7.0;
    auto cfg = uniform_init(1);
    RngStream rng(34);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        auto trace = run_lagged_coupling(kernel, cfg, rng);
        EstimatorInput<long> in{&trace, 0, 0};
        const double v = h_forward(in, indicator1)[0];
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::fabs(mean - truth) <= 3.0 * se);
}

TEST_CASE("control variate keeps the mean: paired test on the slow chain") {
    auto kernel = two_state(0.95);
    auto cfg = uniform_init(1);

    // an independent batch supplies the truncation point
    RngStream rng_a(35);
    std::vector<long> jts;
    for (int i = 0; i < 2000; ++i) {
        auto trace = run_lagged_coupling(kernel, cfg, rng_a);
        jts.push_back(meeting_stats(trace, 0, rng_a).j_tilde);
    }
    long m_hat = loo_median(jts, 0);
    if (m_hat < 0) m_hat = -1;

    RngStream rng_b(36);
    const int n = 30000;
    double dsum = 0.0, dsum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        auto trace = run_lagged_coupling(kernel, cfg, rng_b);
        if (m_hat >= 0) {
            RngStream ext(5000 + static_cast<std::uint64_t>(i));
            extend_trace(trace, kernel, m_hat, ext);
        }
        EstimatorInput<long> in{&trace, 0, 0};
        const double plain = h_backward(in, indicator1)[0];
        const double cv = h_cv_single(in, indicator1, m_hat)[0];
        const double d = cv - plain;
        dsum += d;
        dsum2 += d * d;
    }
    const double dmean = dsum / n;
    const double dse = std::sqrt(std::max(dsum2 / n - dmean * dmean, 1e-30) / n);
    CHECK(std::fabs(dmean) <= 3.0 * dse + 1e-12);
}

TEST_CASE("time-averaged estimator is unbiased on the oracle chain") {
    DiscreteMatrixKernel kernel{StochasticMatrix({{0.7, 0.3}, {0.4, 0.6}})};
    const double truth = 3.0 / 7.0;
    auto cfg = uniform_init(1);
    RngStream rng(37);
    const int n = 30000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        auto trace = run_lagged_coupling(kernel, cfg, rng);
        RngStream ext(6000 + static_cast<std::uint64_t>(i));
        extend_trace(trace, kernel, 10, ext);
        EstimatorInput<long> in{&trace, 0, 10};
        const double v = h_timeavg(in, indicator1)[0];
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::fabs(mean - truth) <= 3.0 * se);
}
