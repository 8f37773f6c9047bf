#pragma once

#include <optional>
#include <vector>

namespace lagcoup {

// Analytic tail attached past the explicit pmf: P(J = size + m) = mass * (1 - ratio) * ratio^m,
// so the total tail probability is `mass`. Used by the geometric family where
// the tail is known exactly; plain finite pmfs carry no tail.
struct GeometricTail {
    double mass = 0.0;
    double ratio = 0.0;
};

// Explicit probability mass function over meeting counts J >= 0, the input to
// every closed-form bound computation. Probabilities must be nonnegative and
// total 1 within 1e-10 (including any analytic tail); any truncated remainder
// must sit below 1e-12 or be described by the tail.
class JDistribution {
public:
    JDistribution() = default;
    explicit JDistribution(std::vector<double> pmf, std::optional<GeometricTail> tail = std::nullopt);

    const std::vector<double>& pmf() const { return pmf_; }
    const std::optional<GeometricTail>& tail() const { return tail_; }

    std::size_t explicit_size() const { return pmf_.size(); }
    double p(std::size_t j) const; // P(J = j), tail-aware
    double cdf(long j) const;      // P(J <= j)
    double survival(long j) const; // P(J >= j)
    double mean() const;           // E[J]

    // min{m : P(J <= m) >= 1/2}
    long smallest_integer_median() const;

    // E|J - m|
    double abs_deviation(long m) const;

private:
    std::vector<double> pmf_;
    std::optional<GeometricTail> tail_;
    std::vector<double> suffix_; // suffix_[j] = sum_{i >= j} pmf_[i] (explicit part)
    std::vector<double> prefix_; // prefix_[j] = sum_{i <= j} pmf_[i]
};

} // namespace lagcoup
