#include "lagcoup/bounds/j_distribution.hpp"

#include <cmath>

#include "lagcoup/errors.hpp"

namespace lagcoup {

JDistribution::JDistribution(std::vector<double> pmf, std::optional<GeometricTail> tail)
    : pmf_(std::move(pmf)), tail_(tail) {
    if (pmf_.empty()) throw InvalidDistribution("empty pmf");
    double total = 0.0;
    for (double v : pmf_) {
        if (!(v >= -1e-15) || !std::isfinite(v)) throw InvalidDistribution("negative or non-finite mass");
        total += v;
    }
    if (tail_) {
        if (!(tail_->mass >= 0.0) || !(tail_->ratio >= 0.0) || !(tail_->ratio < 1.0))
            throw InvalidDistribution("bad tail descriptor");
        total += tail_->mass;
    }
    if (std::fabs(total - 1.0) > 1e-10) throw InvalidDistribution("pmf does not sum to 1 within 1e-10");

    suffix_.assign(pmf_.size() + 1, 0.0);
    for (std::size_t j = pmf_.size(); j-- > 0;) suffix_[j] = suffix_[j + 1] + pmf_[j];
    prefix_.assign(pmf_.size(), 0.0);
    double acc = 0.0;
    for (std::size_t j = 0; j < pmf_.size(); ++j) {
        acc += pmf_[j];
        prefix_[j] = acc;
    }
}

double JDistribution::p(std::size_t j) const {
    if (j < pmf_.size()) return pmf_[j];
    if (!tail_) return 0.0;
    const double m = static_cast<double>(j - pmf_.size());
    return tail_->mass * (1.0 - tail_->ratio) * std::pow(tail_->ratio, m);
}

double JDistribution::survival(long j) const {
    if (j <= 0) return suffix_[0] + (tail_ ? tail_->mass : 0.0);
    if (j < static_cast<long>(pmf_.size()))
        return suffix_[static_cast<std::size_t>(j)] + (tail_ ? tail_->mass : 0.0);
    if (!tail_) return 0.0;
    const double m = static_cast<double>(j - static_cast<long>(pmf_.size()));
    return tail_->mass * std::pow(tail_->ratio, m);
}

double JDistribution::cdf(long j) const {
    if (j < 0) return 0.0;
    if (j < static_cast<long>(pmf_.size())) return prefix_[static_cast<std::size_t>(j)];
    return 1.0 - survival(j + 1);
}

double JDistribution::mean() const {
    double acc = 0.0;
    for (std::size_t j = 1; j < pmf_.size(); ++j) acc += static_cast<double>(j) * pmf_[j];
    if (tail_) {
        // sum_{m>=0} (size + m) * mass (1-r) r^m = mass * size + mass * r/(1-r)
        const double size = static_cast<double>(pmf_.size());
        acc += tail_->mass * (size + tail_->ratio / (1.0 - tail_->ratio));
    }
    return acc;
}

long JDistribution::smallest_integer_median() const {
    double acc = 0.0;
    for (std::size_t j = 0; j < pmf_.size(); ++j) {
        acc += pmf_[j];
        if (acc >= 0.5) return static_cast<long>(j);
    }
    if (tail_) {
        // find smallest m with tail cdf reaching the deficit
        double deficit = 0.5 - acc;
        double mass = tail_->mass * (1.0 - tail_->ratio);
        for (long m = 0; m < 1000000; ++m) {
            deficit -= mass;
            if (deficit <= 0.0) return static_cast<long>(pmf_.size()) + m;
            mass *= tail_->ratio;
        }
    }
    throw InvalidDistribution("median not reached; mass deficit");
}

double JDistribution::abs_deviation(long m) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < pmf_.size(); ++j)
        acc += std::fabs(static_cast<double>(j) - static_cast<double>(m)) * pmf_[j];
    if (tail_) {
        const long start = static_cast<long>(pmf_.size());
        if (start > m) {
            // all tail indices are above m: sum (j - m) over the tail
            const double r = tail_->ratio;
            acc += tail_->mass * (static_cast<double>(start - m) + r / (1.0 - r));
        } else {
            // walk the tail explicitly until past m, then close the remainder
            double massj = tail_->mass * (1.0 - tail_->ratio);
            double rest = tail_->mass;
            long j = start;
            while (j <= m) {
                acc += static_cast<double>(m - j) * massj;
                rest -= massj;
                massj *= tail_->ratio;
                ++j;
            }
            const double r = tail_->ratio;
            if (rest > 0.0) acc += rest * (static_cast<double>(j - m) + r / (1.0 - r));
        }
    }
    return acc;
}

} // namespace lagcoup
