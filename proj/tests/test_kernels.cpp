#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lagcoup/core/coupling.hpp"
#include "lagcoup/kernels/targets.hpp"
#include "lagcoup/stats.hpp"

using namespace lagcoup;

TEST_CASE("maximal coupling: identical distributions always meet") {
    RngStream rng(11);
    for (int i = 0; i < 2000; ++i) {
        auto res = maximal_coupling_sample(NormalDist{0.4, 1.3}, NormalDist{0.4, 1.3}, rng);
        REQUIRE(res.met);
        REQUIRE(res.from_p == res.from_q);
    }
}

TEST_CASE("maximal coupling meet rates match 1 - d_TV") {
    RngStream rng(12);
    const int n = 100000;
    int met_bern = 0, met_norm = 0;
    double cross_mean_p = 0.0;
    for (int i = 0; i < n; ++i) {
        met_bern += maximal_coupling_sample(BernoulliDist{0.7}, BernoulliDist{0.4}, rng).met;
        auto res = maximal_coupling_sample(NormalDist{0.0, 1.0}, NormalDist{1.0, 1.0}, rng);
        met_norm += res.met;
        cross_mean_p += res.from_p;
    }
    const auto within = [&](int count, double p) {
        const double sigma = std::sqrt(p * (1.0 - p) / n);
        return std::fabs(static_cast<double>(count) / n - p) <= 3.0 * sigma;
    };
    CHECK(within(met_bern, 0.7));                   // 1 - |0.7 - 0.4|
    CHECK(within(met_norm, 2.0 * normal_cdf(-0.5))); // unit-variance Gaussian pair
    // the p-marginal stays N(0,1) regardless of coupling
    CHECK(std::fabs(cross_mean_p / n) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("discrete kernel: one-step meet probability and marginal rows") {
    StochasticMatrix m({{0.7, 0.3}, {0.4, 0.6}});
    DiscreteMatrixKernel kernel{m};
    RngStream rng(13);
    const int n = 100000;
    int met = 0;
    for (int i = 0; i < n; ++i) {
        auto [nx, ny] = kernel.joint_step(0, 1, rng);
        met += nx == ny;
    }
    const double sigma = std::sqrt(0.7 * 0.3 / n);
    CHECK(std::fabs(static_cast<double>(met) / n - 0.7) <= 3.0 * sigma);

    // frozen-partner marginal: X-output of joint_step follows row 0 of a
    // seeded 3-state matrix
    StochasticMatrix m3({{0.22, 0.35, 0.43}, {0.55, 0.05, 0.40}, {0.30, 0.45, 0.25}});
    DiscreteMatrixKernel k3{m3};
    std::vector<double> counts(3, 0.0);
    for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(k3.joint_step(0, 2, rng).first)] += 1.0;
    for (std::size_t z = 0; z < 3; ++z) {
        const double p = m3.row(0)[z];
        const double sd = std::sqrt(n * p * (1.0 - p));
        CHECK(std::fabs(counts[z] - n * p) <= 3.0 * sd);
    }
}

TEST_CASE("discrete kernel diagonal is absorbing") {
    DiscreteMatrixKernel kernel{StochasticMatrix({{0.7, 0.3}, {0.4, 0.6}})};
    RngStream rng(14);
    long x = 1, y = 1;
    for (int i = 0; i < 10000; ++i) {
        auto [nx, ny] = kernel.joint_step(x, y, rng);
        REQUIRE(nx == ny);
        x = nx;
        y = ny;
    }
}

TEST_CASE("rwm: absorbing diagonal and faithful acceptance rate") {
    CoupledRwmKernel kernel(std_normal_log_density(1), 1, 2.0);
    RngStream rng(15);
    std::vector<double> x{0.5}, y{0.5};
    for (int i = 0; i < 2000; ++i) {
        auto [nx, ny] = kernel.joint_step(x, y, rng);
        REQUIRE(nx == ny);
        x = nx;
        y = ny;
    }

    // acceptance frequency of the X-chain inside the coupling vs a plain
    // marginal walker, two independent streams
    const int n = 100000;
    RngStream rng_joint(16), rng_plain(17);
    std::vector<double> xj{0.2}, yj{-1.0}, xp{0.2};
    int acc_joint = 0, acc_plain = 0;
    for (int i = 0; i < n; ++i) {
        auto [nx, ny] = kernel.joint_step(xj, yj, rng_joint);
        acc_joint += nx != xj;
        xj = nx;
        yj = ny;
        auto np = kernel.marginal_step(xp, rng_plain);
        acc_plain += np != xp;
        xp = np;
    }
    const double pj = static_cast<double>(acc_joint) / n;
    const double pp = static_cast<double>(acc_plain) / n;
    const double sigma = std::sqrt((pj * (1.0 - pj) + pp * (1.0 - pp)) / n);
    CHECK(std::fabs(pj - pp) <= 3.0 * sigma);
}

TEST_CASE("rwm couples before the cap") {
    CoupledRwmKernel kernel(std_normal_log_density(1), 1, 2.0);
    LagConfig<std::vector<double>> cfg;
    cfg.lag = 1;
    cfg.max_sweeps = 1000000;
    cfg.initial_distribution = [](RngStream& r) { return std::vector<double>{r.normal()}; };
    RngStream rng(18);
    double tau_sum = 0.0;
    for (int i = 0; i < 300; ++i) {
        auto trace = run_lagged_coupling(kernel, cfg, rng);
        REQUIRE(trace.tau.has_value());
        tau_sum += static_cast<double>(*trace.tau);
    }
    CHECK(tau_sum / 300.0 < 100.0); // meets quickly for a unit Gaussian target
}

TEST_CASE("gibbs: absorbing diagonal; rho = 0 meets at the first joint step") {
    CoupledGibbsGaussianKernel kernel(0.0);
    LagConfig<std::vector<double>> cfg;
    cfg.lag = 2;
    cfg.max_sweeps = 10000;
    cfg.initial_distribution = [](RngStream& r) {
        return std::vector<double>{r.normal(), r.normal()};
    };
    RngStream rng(19);
    for (int i = 0; i < 1000; ++i) {
        auto trace = run_lagged_coupling(kernel, cfg, rng);
        REQUIRE(trace.tau.has_value());
        // the two conditionals coincide, so the maximal coupling meets surely;
        // the warmed-up pair itself never matches (continuous states)
        CHECK(*trace.tau == cfg.lag + 1);
    }

    CoupledGibbsGaussianKernel k9(0.9);
    std::vector<double> x{0.3, -0.4}, y{0.3, -0.4};
    for (int i = 0; i < 5000; ++i) {
        auto [nx, ny] = k9.joint_step(x, y, rng);
        REQUIRE(nx == ny);
        x = nx;
        y = ny;
    }
}

TEST_CASE("gibbs rho=0.9: first coordinate centred at zero after burn-in") {
    CoupledGibbsGaussianKernel kernel(0.9);
    RngStream rng(20);
    const int chains = 4000, sweeps = 60;
    double sum = 0.0, sum2 = 0.0;
    for (int c = 0; c < chains; ++c) {
        std::vector<double> s{rng.normal(), rng.normal()};
        for (int i = 0; i < sweeps; ++i) s = kernel.marginal_step(s, rng);
        sum += s[0];
        sum2 += s[0] * s[0];
    }
    const double mean = sum / chains;
    const double sd = std::sqrt((sum2 / chains - mean * mean) / chains);
    CHECK(std::fabs(mean) <= 3.0 * sd);
}

TEST_CASE("ising: identical configurations stay identical through sweeps") {
    IsingSsgKernel kernel(4, 0.3);
    RngStream rng(21);
    auto x = kernel.random_state(rng);
    auto y = x;
    for (int i = 0; i < 500; ++i) {
        auto [nx, ny] = kernel.joint_step(x, y, rng);
        REQUIRE(nx == ny);
        x = nx;
        y = ny;
    }
}

TEST_CASE("ising: vanishing beta couples in one sweep") {
    IsingSsgKernel kernel(4, 1e-9);
    LagConfig<std::vector<std::int8_t>> cfg;
    cfg.lag = 1;
    cfg.max_sweeps = 10000;
    cfg.initial_distribution = [&kernel](RngStream& r) { return kernel.random_state(r); };
    RngStream rng(22);
    for (int i = 0; i < 100; ++i) {
        auto trace = run_lagged_coupling(kernel, cfg, rng);
        REQUIRE(trace.tau.has_value());
        CHECK(*trace.tau <= cfg.lag + 1);
    }
}

TEST_CASE("ising side=8 beta=0.2: magnetization symmetric around zero") {
    IsingSsgKernel kernel(8, 0.2);
    RngStream rng(23);
    const int chains = 800, sweeps = 30;
    double sum = 0.0, sum2 = 0.0;
    for (int c = 0; c < chains; ++c) {
        auto s = kernel.random_state(rng);
        for (int i = 0; i < sweeps; ++i) s = kernel.marginal_step(s, rng);
        const double m = IsingSsgKernel::magnetization(s);
        sum += m;
        sum2 += m * m;
    }
    const double mean = sum / chains;
    const double sd = std::sqrt((sum2 / chains - mean * mean) / chains);
    CHECK(std::fabs(mean) <= 3.0 * sd);
}

TEST_CASE("target spec validation") {
    CHECK_THROWS_AS(StochasticMatrix({{0.7, 0.31}, {0.4, 0.6}}), InvalidMatrix);
    CHECK_THROWS_AS(coupled_gibbs_gaussian(1.0), PlanInvalid);
    CHECK_THROWS_AS(ising_ssg_kernel(1, 0.2), PlanInvalid);
    CHECK_THROWS_AS(ising_ssg_kernel(4, 0.0), PlanInvalid);

    TargetSpec spec;
    spec.discrete = make_discrete_target({{0.7, 0.3}, {0.4, 0.6}});
    auto kernel = discrete_matrix_kernel(spec);
    CHECK(kernel.states() == 2);
    // stationary of [[1-a,a],[b,1-b]] is (b, a)/(a+b)
    CHECK(spec.discrete->stationary[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
    CHECK(spec.discrete->stationary[1] == doctest::Approx(3.0 / 7.0).epsilon(1e-12));

    spec.discrete->stationary = {0.9, 0.1}; // not a fixed point
    CHECK_THROWS_AS(discrete_matrix_kernel(spec), InvalidMatrix);
}
