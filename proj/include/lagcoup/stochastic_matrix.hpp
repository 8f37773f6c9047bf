#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lagcoup {

// Row-stochastic transition matrix over a small finite state space.
// Validation tolerances: row sums within 1e-12 of 1, stationary residual 1e-10.
class StochasticMatrix {
public:
    StochasticMatrix() = default;

    // Throws InvalidMatrix unless every row is a probability vector.
    explicit StochasticMatrix(std::vector<std::vector<double>> rows);

    std::size_t size() const { return n_; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    // dist * P
    std::vector<double> apply_left(std::span<const double> dist) const;

    // Left fixed point with unit sum, by Gaussian elimination on (P^T - I).
    // Result satisfies the 1e-10 residual invariant or InvalidMatrix is thrown.
    std::vector<double> stationary() const;

    double stationary_residual(std::span<const double> pi) const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_; // row-major
};

// Half-L1 distance between two probability vectors.
double total_variation(std::span<const double> p, std::span<const double> q);

} // namespace lagcoup
