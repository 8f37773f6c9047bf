#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lagcoup/core/coupling.hpp"
#include "lagcoup/errors.hpp"

namespace lagcoup {

// Vector-valued test function evaluated on states; estimators are linear in h.
template <class S>
using TestFunction = std::function<std::vector<double>(const S&)>;

template <class S>
struct EstimatorInput {
    const CoupledTrace<S>* trace = nullptr;
    long k = 0; // burn-in index
    long r = 0; // averaging endpoint for the time-averaged forms, >= k

    void validate_single() const {
        if (!trace || !trace->tau) throw MissingTau("estimator input needs a completed trace");
        if (k < 0) throw std::invalid_argument("k must be nonnegative");
    }
    void validate_range() const {
        validate_single();
        if (r < k) throw std::invalid_argument("r must be >= k");
    }
};

// h evaluated along both paths; the runner builds one of these per trace and
// reuses it across every estimator form, burn-in and time index.
struct EvaluatedTrace {
    std::vector<std::vector<double>> hx;
    std::vector<std::vector<double>> hy;
    long tau = 0;
    long lag = 1;
    std::size_t dim = 0;

    template <class S>
    static EvaluatedTrace from(const CoupledTrace<S>& trace, const TestFunction<S>& h) {
        if (!trace.tau) throw MissingTau("cannot evaluate a capped trace");
        EvaluatedTrace ev;
        ev.tau = *trace.tau;
        ev.lag = trace.lag;
        ev.hx.reserve(trace.x_path.size());
        ev.hy.reserve(trace.y_path.size());
        for (const auto& s : trace.x_path) ev.hx.push_back(h(s));
        for (const auto& s : trace.y_path) ev.hy.push_back(h(s));
        ev.dim = ev.hx.empty() ? 0 : ev.hx.front().size();
        return ev;
    }

    long x_len() const { return static_cast<long>(hx.size()); }
    long y_len() const { return static_cast<long>(hy.size()); }

    const std::vector<double>& x_at(long t) const {
        if (t < 0 || t >= x_len()) throw IndexOutOfTrace("x index " + std::to_string(t) + " outside trace");
        return hx[static_cast<std::size_t>(t)];
    }
    const std::vector<double>& y_at(long t) const {
        if (t < 0 || t >= y_len()) throw IndexOutOfTrace("y index " + std::to_string(t) + " outside trace");
        return hy[static_cast<std::size_t>(t)];
    }
};

namespace detail {

inline void add(std::vector<double>& acc, const std::vector<double>& v, double w = 1.0) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * v[i];
}

// h(X_k) + sum_{j=1..J} [h(X_{k+jL}) - h(Y_{k+(j-1)L})]
inline std::vector<double> forward_core(const EvaluatedTrace& ev, long k) {
    const long L = ev.lag;
    const long J = j_from_tau(ev.tau, L, k);
    std::vector<double> out = ev.x_at(k);
    for (long j = 1; j <= J; ++j) {
        add(out, ev.x_at(k + j * L), 1.0);
        add(out, ev.y_at(k + (j - 1) * L), -1.0);
    }
    return out;
}

// h(X_{k+JL}) + sum_{j=0..J-1} [h(X_{k+jL}) - h(Y_{k+jL})]
inline std::vector<double> backward_core(const EvaluatedTrace& ev, long k) {
    const long L = ev.lag;
    const long J = j_from_tau(ev.tau, L, k);
    std::vector<double> out = ev.x_at(k + J * L);
    for (long j = 0; j < J; ++j) {
        add(out, ev.x_at(k + j * L), 1.0);
        add(out, ev.y_at(k + j * L), -1.0);
    }
    return out;
}

// sum_{j=0..m_hat} [h(X_{k+jL}) - h(Y_{k+jL})]; empty when m_hat < 0. The
// differences do not vanish past the meeting time (the paths are offset by the
// lag), so every term is evaluated from the stored paths.
inline void subtract_cv_sum(std::vector<double>& acc, const EvaluatedTrace& ev, long k, long m_hat) {
    const long L = ev.lag;
    for (long j = 0; j <= m_hat; ++j) {
        add(acc, ev.x_at(k + j * L), -1.0);
        add(acc, ev.y_at(k + j * L), 1.0);
    }
}

inline std::vector<double> cv_single_core(const EvaluatedTrace& ev, long k, long m_hat) {
    std::vector<double> out = backward_core(ev, k);
    subtract_cv_sum(out, ev, k, m_hat);
    return out;
}

inline std::vector<double> timeavg_core(const EvaluatedTrace& ev, long k, long r) {
    std::vector<double> out(ev.dim, 0.0);
    for (long t = k; t <= r; ++t) add(out, backward_core(ev, t), 1.0);
    const double inv = 1.0 / static_cast<double>(r - k + 1);
    for (auto& v : out) v *= inv;
    return out;
}

inline std::vector<double> timeavg_cv_core(const EvaluatedTrace& ev, long k, long r,
                                           std::span<const long> m_hats) {
    if (static_cast<long>(m_hats.size()) != r - k + 1)
        throw std::invalid_argument("one m_hat per t in [k, r] required");
    std::vector<double> out(ev.dim, 0.0);
    for (long t = k; t <= r; ++t) {
        add(out, backward_core(ev, t), 1.0);
        subtract_cv_sum(out, ev, t, m_hats[static_cast<std::size_t>(t - k)]);
    }
    const double inv = 1.0 / static_cast<double>(r - k + 1);
    for (auto& v : out) v *= inv;
    return out;
}

} // namespace detail

// Forward-corrected unbiased estimator of E[h(X_pi)].
template <class S>
std::vector<double> h_forward(const EstimatorInput<S>& in, const TestFunction<S>& h) {
    in.validate_single();
    return detail::forward_core(EvaluatedTrace::from(*in.trace, h), in.k);
}

// Backward-corrected form; algebraically identical to h_forward.
template <class S>
std::vector<double> h_backward(const EstimatorInput<S>& in, const TestFunction<S>& h) {
    in.validate_single();
    return detail::backward_core(EvaluatedTrace::from(*in.trace, h), in.k);
}

// Backward form minus the control-variate sum truncated at m_hat. m_hat must
// be computed without this trace; m_hat = -1 means no control variate.
template <class S>
std::vector<double> h_cv_single(const EstimatorInput<S>& in, const TestFunction<S>& h, long m_hat) {
    in.validate_single();
    return detail::cv_single_core(EvaluatedTrace::from(*in.trace, h), in.k, m_hat);
}

// Mean of the backward estimator over burn-ins t in [k, r].
template <class S>
std::vector<double> h_timeavg(const EstimatorInput<S>& in, const TestFunction<S>& h) {
    in.validate_range();
    return detail::timeavg_core(EvaluatedTrace::from(*in.trace, h), in.k, in.r);
}

// Time-averaged form with one control-variate truncation per t in [k, r].
template <class S>
std::vector<double> h_timeavg_cv(const EstimatorInput<S>& in, const TestFunction<S>& h,
                                 std::span<const long> m_hats) {
    in.validate_range();
    return detail::timeavg_cv_core(EvaluatedTrace::from(*in.trace, h), in.k, in.r, m_hats);
}

// Floor of the sample median of all entries except index q. The median of an
// even-sized set is the lower of the two middle order statistics, matching the
// smallest-integer-median convention.
inline long loo_median(std::span<const long> j_tildes, std::size_t q) {
    if (j_tildes.size() < 2) throw TooFewProcesses("leave-one-out median needs >= 2 processes");
    if (q >= j_tildes.size()) throw std::invalid_argument("q out of range");
    std::vector<long> rest;
    rest.reserve(j_tildes.size() - 1);
    for (std::size_t i = 0; i < j_tildes.size(); ++i)
        if (i != q) rest.push_back(j_tildes[i]);
    std::nth_element(rest.begin(), rest.begin() + static_cast<long>((rest.size() - 1) / 2), rest.end());
    return rest[(rest.size() - 1) / 2];
}

// Leave-one-out medians for every process at once: sort once, then drop each
// element by index arithmetic. Equivalent to calling loo_median per q.
inline std::vector<long> loo_medians_all(std::span<const long> j_tildes) {
    const std::size_t n = j_tildes.size();
    if (n < 2) throw TooFewProcesses("leave-one-out median needs >= 2 processes");
    std::vector<long> sorted(j_tildes.begin(), j_tildes.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = (n - 2) / 2; // lower-middle index after removing one element
    std::vector<long> out(n);
    for (std::size_t q = 0; q < n; ++q) {
        // position of one occurrence of j_tildes[q] in the sorted array
        const std::size_t pos = static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), j_tildes[q]) - sorted.begin());
        out[q] = pos <= mid ? sorted[mid + 1] : sorted[mid];
    }
    return out;
}

} // namespace lagcoup
