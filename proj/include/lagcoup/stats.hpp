#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace lagcoup {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730950488016887242097); }

namespace detail {

// Regularized lower incomplete gamma P(a,x): series for x < a+1, continued
// fraction otherwise (Numerical Recipes style).
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Lentz continued fraction for Q(a,x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

} // namespace detail

// Upper-tail p-value of a chi-square statistic with df degrees of freedom.
inline double chi_square_pvalue(double stat, double df) {
    if (stat <= 0.0) return 1.0;
    return 1.0 - detail::gamma_p(0.5 * df, 0.5 * stat);
}

// Asymptotic Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double ks_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size(), m = b.size();
    if (n == 0 || m == 0) throw std::invalid_argument("ks_two_sample: empty sample");
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        const double x = std::min(a[i], b[j]);
        while (i < n && a[i] <= x) ++i;
        while (j < m && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    return ks_tail(lambda);
}

// Chi-square goodness-of-fit p-value of observed counts against expected
// counts. Cells with expected < min_expected are pooled into a rest cell.
inline double chi_square_gof_pvalue(std::span<const double> observed,
                                    std::span<const double> expected,
                                    double min_expected = 5.0) {
    if (observed.size() != expected.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
    double stat = 0.0;
    double pool_obs = 0.0, pool_exp = 0.0;
    long cells = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] >= min_expected) {
            const double diff = observed[i] - expected[i];
            stat += diff * diff / expected[i];
            ++cells;
        } else {
            pool_obs += observed[i];
            pool_exp += expected[i];
        }
    }
    if (pool_exp > 0.0) {
        const double diff = pool_obs - pool_exp;
        stat += diff * diff / std::max(pool_exp, 1e-12);
        ++cells;
    }
    if (cells < 2) return 1.0;
    return chi_square_pvalue(stat, static_cast<double>(cells - 1));
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance: need >= 2 samples");
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / static_cast<double>(xs.size() - 1);
}

inline double std_error_of_mean(std::span<const double> xs) {
    return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

// Average ranks with ties.
inline std::vector<double> ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
        i = j + 1;
    }
    return r;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson: bad input");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: degenerate input");
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    return pearson(rx, ry);
}

} // namespace lagcoup
