#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lagcoup/errors.hpp"
#include "lagcoup/rng.hpp"

namespace lagcoup {

// Maximal coupling of two distributions that expose a sampler and a pointwise
// density (or pmf). Construction: draw X ~ p and accept it as the q-sample too
// when u * p(X) <= q(X); otherwise rejection-sample Y ~ q until u' * q(Y) > p(Y).
// The outputs are marginally p and q, and P(outputs equal) = 1 - d_TV(p, q).
//
// A Dist provides: value_type sample(RngStream&) const; double logpdf(value) const.

template <class T>
struct MaximalCouplingResult {
    T from_p;
    T from_q;
    bool met = false;
};

template <class DistP, class DistQ>
auto maximal_coupling_sample(const DistP& p, const DistQ& q, RngStream& rng)
    -> MaximalCouplingResult<decltype(p.sample(rng))> {
    using T = decltype(p.sample(rng));
    MaximalCouplingResult<T> out;
    out.from_p = p.sample(rng);
    const double lp = p.logpdf(out.from_p);
    const double lq = q.logpdf(out.from_p);
    if (std::isnan(lp) || std::isnan(lq)) throw EvaluationError("density evaluation returned NaN");
    if (std::log(rng.uniform_pos()) + lp <= lq) {
        out.from_q = out.from_p;
        out.met = true;
        return out;
    }
    while (true) {
        T y = q.sample(rng);
        const double lqy = q.logpdf(y);
        const double lpy = p.logpdf(y);
        if (std::isnan(lqy) || std::isnan(lpy)) throw EvaluationError("density evaluation returned NaN");
        if (std::log(rng.uniform_pos()) + lqy > lpy) {
            out.from_q = std::move(y);
            out.met = false;
            return out;
        }
    }
}

// --- distributions used by the shipped kernels ---

struct NormalDist {
    double mean = 0.0;
    double sd = 1.0;
    double sample(RngStream& rng) const { return rng.normal(mean, sd); }
    double logpdf(double x) const {
        const double z = (x - mean) / sd;
        return -0.5 * z * z - std::log(sd) - 0.91893853320467274178032973640562; // log sqrt(2 pi)
    }
};

// Isotropic Gaussian on R^d; the proposal law of the random-walk kernel.
struct IsoNormalDist {
    std::span<const double> mean;
    double sd = 1.0;
    std::vector<double> sample(RngStream& rng) const {
        std::vector<double> x(mean.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = mean[i] + sd * rng.normal();
        return x;
    }
    double logpdf(const std::vector<double>& x) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double z = (x[i] - mean[i]) / sd;
            acc += -0.5 * z * z;
        }
        return acc - static_cast<double>(mean.size()) *
                         (std::log(sd) + 0.91893853320467274178032973640562);
    }
};

struct BernoulliDist {
    double p = 0.5;
    long sample(RngStream& rng) const { return rng.uniform01() < p ? 1 : 0; }
    double logpdf(long x) const { return std::log(x == 1 ? p : 1.0 - p); }
};

// Categorical over {0..n-1} given by a probability row. Sampling is CDF
// inversion so draws are a pure function of the stream.
struct CategoricalDist {
    std::span<const double> probs;
    long sample(RngStream& rng) const {
        const double u = rng.uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<long>(i);
        }
        return static_cast<long>(probs.size()) - 1;
    }
    double logpdf(long x) const { return std::log(probs[static_cast<std::size_t>(x)]); }
};

} // namespace lagcoup
