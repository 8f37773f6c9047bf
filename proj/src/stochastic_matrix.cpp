#include "lagcoup/stochastic_matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "lagcoup/errors.hpp"

namespace lagcoup {

StochasticMatrix::StochasticMatrix(std::vector<std::vector<double>> rows) {
    n_ = rows.size();
    if (n_ == 0) throw InvalidMatrix("empty transition matrix");
    data_.reserve(n_ * n_);
    for (const auto& r : rows) {
        if (r.size() != n_) throw InvalidMatrix("transition matrix is not square");
        double sum = 0.0;
        for (double v : r) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidMatrix("negative or non-finite entry");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-12) throw InvalidMatrix("row sum differs from 1 by more than 1e-12");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

std::vector<double> StochasticMatrix::apply_left(std::span<const double> dist) const {
    if (dist.size() != n_) throw InvalidMatrix("distribution size mismatch");
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const double w = dist[i];
        if (w == 0.0) continue;
        const double* r = data_.data() + i * n_;
        for (std::size_t j = 0; j < n_; ++j) out[j] += w * r[j];
    }
    return out;
}

double StochasticMatrix::stationary_residual(std::span<const double> pi) const {
    const auto next = apply_left(pi);
    double res = 0.0;
    for (std::size_t j = 0; j < n_; ++j) res = std::max(res, std::fabs(next[j] - pi[j]));
    return res;
}

std::vector<double> StochasticMatrix::stationary() const {
    // Solve pi (P - I) = 0 with sum(pi) = 1: replace the last equation of
    // (P^T - I) x = 0 by the normalization row.
    const std::size_t n = n_;
    std::vector<double> a(n * n, 0.0);
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = (*this)(j, i) - (i == j ? 1.0 : 0.0);
    for (std::size_t j = 0; j < n; ++j) a[(n - 1) * n + j] = 1.0;
    b[n - 1] = 1.0;

    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
        if (std::fabs(a[piv * n + col]) < 1e-14) throw InvalidMatrix("singular system; chain may be reducible");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[piv * n + j], a[col * n + j]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = b[i] / a[i * n + i];
    for (double& v : pi)
        if (v < 0.0 && v > -1e-12) v = 0.0;
    double sum = 0.0;
    for (double v : pi) {
        if (v < 0.0) throw InvalidMatrix("stationary solve produced a negative mass");
        sum += v;
    }
    for (double& v : pi) v /= sum;
    if (stationary_residual(pi) > 1e-10) throw InvalidMatrix("stationary residual above 1e-10");
    return pi;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::fabs(p[i] - q[i]);
    return 0.5 * acc;
}

} // namespace lagcoup
