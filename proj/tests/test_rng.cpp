#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "lagcoup/rng.hpp"
#include "lagcoup/stats.hpp"

using namespace lagcoup;

TEST_CASE("derived seeds separate by any key component") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t rep = 0; rep < 20; ++rep)
        for (std::uint64_t q = 0; q < 20; ++q)
            for (std::uint64_t purpose = 1; purpose <= 3; ++purpose)
                seen.insert(derive_seed(42, {1, rep, q, purpose}));
    CHECK(seen.size() == 20 * 20 * 3);
    CHECK(derive_seed(42, {1, 2, 3}) != derive_seed(43, {1, 2, 3}));
    // order matters
    CHECK(derive_seed(42, {1, 2}) != derive_seed(42, {2, 1}));
}

TEST_CASE("streams are reproducible") {
    RngStream a = RngStream::from_key(7, {1, 2, 3});
    RngStream b = RngStream::from_key(7, {1, 2, 3});
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform01 moments") {
    RngStream rng(12345);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::fabs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normal draws match the Gaussian cdf at a few quantiles") {
    RngStream rng(99);
    const int n = 200000;
    int below_0 = 0, below_1 = 0, below_m2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        below_0 += z < 0.0;
        below_1 += z < 1.0;
        below_m2 += z < -2.0;
    }
    const auto check_freq = [&](int count, double p) {
        const double sigma = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::fabs(static_cast<double>(count) / n - p) < 4.0 * sigma);
    };
    check_freq(below_0, 0.5);
    check_freq(below_1, normal_cdf(1.0));
    check_freq(below_m2, normal_cdf(-2.0));
}

TEST_CASE("geometric inversion has the right pmf") {
    RngStream rng(4242);
    const double p = 0.37;
    const int n = 200000;
    std::vector<int> counts(8, 0);
    for (int i = 0; i < n; ++i) {
        const long g = rng.geometric(p);
        REQUIRE(g >= 1);
        if (g < static_cast<long>(counts.size())) ++counts[static_cast<std::size_t>(g)];
    }
    for (int g = 1; g <= 5; ++g) {
        const double expect = p * std::pow(1.0 - p, g - 1);
        const double sigma = std::sqrt(expect * (1.0 - expect) / n);
        CHECK(std::fabs(static_cast<double>(counts[static_cast<std::size_t>(g)]) / n - expect) <
              4.0 * sigma);
    }
    CHECK(rng.geometric(1.0) == 1);
}

TEST_CASE("fair coin frequency") {
    RngStream rng(5);
    const int n = 100000;
    int heads = 0;
    for (int i = 0; i < n; ++i) heads += rng.coin();
    const double sigma = 0.5 / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(static_cast<double>(heads) / n - 0.5) < 3.0 * sigma);
}
