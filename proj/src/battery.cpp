#include "lagcoup/validate/battery.hpp"

#include <cmath>
#include <sstream>

#include "lagcoup/bounds/bounds.hpp"
#include "lagcoup/bounds/geometric.hpp"
#include "lagcoup/core/coupling.hpp"
#include "lagcoup/estimators/estimators.hpp"
#include "lagcoup/kernels/targets.hpp"
#include "lagcoup/stats.hpp"

namespace lagcoup {

JDistribution random_j_distribution(RngStream& rng) {
    const double shape = rng.uniform01();
    std::vector<double> w;
    if (shape < 0.15) {
        // boundary family: 2 p0 = 1 - p1 exactly, remainder spread above
        const double p0 = 0.5 * rng.uniform01(); // p0 in [0, 0.5)
        const double p1 = 1.0 - 2.0 * p0;
        w = {p0, p1};
        double rest = p0;
        const int extra = 1 + static_cast<int>(rng.uniform01() * 6.0);
        for (int i = 0; i < extra; ++i) {
            const double piece = i + 1 == extra ? rest : rest * rng.uniform01();
            w.push_back(piece);
            rest -= piece;
        }
    } else if (shape < 0.3) {
        // heavy first atom: equality regime
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 6.0);
        w.assign(n, 0.0);
        w[0] = 0.5 + 0.5 * rng.uniform01();
        double rest = 1.0 - w[0];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double piece = rest * rng.uniform01();
            w[i] = piece;
            rest -= piece;
        }
        w[n - 1] = rest;
    } else if (shape < 0.4) {
        // single atom somewhere
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * 8.0);
        w.assign(n + 1, 0.0);
        w[n] = 1.0;
    } else {
        // generic random pmf, sizes up to ~40
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 39.0);
        w.resize(n);
        double sum = 0.0;
        for (auto& v : w) {
            v = -std::log(rng.uniform_pos());
            if (rng.uniform01() < 0.2) v *= 0.01; // occasional near-zero atoms
            sum += v;
        }
        for (auto& v : w) v /= sum;
    }
    return JDistribution(std::move(w));
}

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

BatteryResult dominance_battery(std::uint64_t seed, int n_dists) {
    RngStream rng = RngStream::from_key(seed, {101});
    double worst = -1.0;
    for (int i = 0; i < n_dists; ++i) {
        const auto jd = random_j_distribution(rng);
        const double gap = new_bound_exact(jd) - old_bound_exact(jd);
        worst = std::max(worst, gap);
        if (gap > 1e-9)
            return {"bound dominance", false, "violation " + fmt(gap) + " at case " + std::to_string(i)};
    }
    return {"bound dominance", true,
            std::to_string(n_dists) + " distributions, worst slack " + fmt(worst)};
}

BatteryResult forms_battery(std::uint64_t seed, int n_dists) {
    RngStream rng = RngStream::from_key(seed, {102});
    double worst = 0.0;
    for (int i = 0; i < n_dists; ++i) {
        const auto jd = random_j_distribution(rng);
        const double b = new_bound_exact(jd);
        const double viaj = new_bound_median_form(jd);
        const double viat = new_bound_tilde_form(jd);
        const double viasurv = new_bound_tau_form(tau_survivals_from_j(jd), 0, 1);
        const double err =
            std::max({std::fabs(b - viaj), std::fabs(b - viat), std::fabs(b - viasurv)});
        worst = std::max(worst, err);
        if (err > 1e-12)
            return {"bound form agreement", false,
                    "forms disagree by " + fmt(err) + " at case " + std::to_string(i)};
    }
    return {"bound form agreement", true,
            std::to_string(n_dists) + " distributions, worst gap " + fmt(worst)};
}

BatteryResult equality_battery(std::uint64_t seed, int n_dists) {
    RngStream rng = RngStream::from_key(seed, {103});
    for (int i = 0; i < n_dists; ++i) {
        const auto jd = random_j_distribution(rng);
        const bool predicate = bounds_equal_predicate(jd);
        const bool equal = std::fabs(new_bound_exact(jd) - old_bound_exact(jd)) < 1e-12;
        if (predicate != equal)
            return {"bound equality condition", false,
                    std::string("predicate ") + (predicate ? "true" : "false") +
                        " but bounds " + (equal ? "equal" : "differ") + " at case " + std::to_string(i)};
    }
    return {"bound equality condition", true, std::to_string(n_dists) + " distributions"};
}

BatteryResult forward_backward_battery(std::uint64_t seed, int n_cases) {
    RngStream rng = RngStream::from_key(seed, {104});
    double worst = 0.0;
    for (int i = 0; i < n_cases; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 4.0);
        std::vector<std::vector<double>> rows(n, std::vector<double>(n));
        for (auto& row : rows) {
            double sum = 0.0;
            for (auto& v : row) {
                v = 0.05 + rng.uniform01();
                sum += v;
            }
            for (auto& v : row) v /= sum;
        }
        DiscreteMatrixKernel kernel{StochasticMatrix(rows)};
        LagConfig<long> cfg;
        cfg.lag = 1 + static_cast<long>(rng.uniform01() * 4.0);
        cfg.max_sweeps = 100000;
        const std::size_t n_states = n;
        cfg.initial_distribution = [n_states](RngStream& r) {
            return static_cast<long>(r.uniform01() * static_cast<double>(n_states));
        };
        auto trace = run_lagged_coupling(kernel, cfg, rng);
        RngStream ext = RngStream::from_key(seed, {105, static_cast<std::uint64_t>(i)});
        extend_trace(trace, kernel, 13, ext); // burn-ins below can reach index 12
        // random linear h over indicator features
        std::vector<double> weights(n);
        for (auto& v : weights) v = rng.normal();
        TestFunction<long> h = [weights](const long& s) {
            return std::vector<double>{weights[static_cast<std::size_t>(s)]};
        };
        for (long k = 0; k <= 12; ++k) {
            EstimatorInput<long> in{&trace, k, k};
            const double f = h_forward(in, h)[0];
            const double b = h_backward(in, h)[0];
            const double scale = std::max({1.0, std::fabs(f), std::fabs(b)});
            const double rel = std::fabs(f - b) / scale;
            worst = std::max(worst, rel);
            if (rel > 1e-12)
                return {"forward/backward identity", false,
                        "relative gap " + fmt(rel) + " at case " + std::to_string(i) +
                            ", k=" + std::to_string(k)};
        }
    }
    return {"forward/backward identity", true,
            std::to_string(n_cases) + " traces x 13 burn-ins, worst " + fmt(worst)};
}

BatteryResult maximal_meet_rate_battery(std::uint64_t seed) {
    RngStream rng = RngStream::from_key(seed, {106});
    const int n = 100000;
    // meeting frequency must equal 1 - d_TV for analytically tractable pairs
    const double cases_expected[3] = {0.7, 2.0 * normal_cdf(-0.5), 1.0};
    int met[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
        if (maximal_coupling_sample(BernoulliDist{0.7}, BernoulliDist{0.4}, rng).met) ++met[0];
        if (maximal_coupling_sample(NormalDist{0.0, 1.0}, NormalDist{1.0, 1.0}, rng).met) ++met[1];
        if (maximal_coupling_sample(NormalDist{0.3, 0.7}, NormalDist{0.3, 0.7}, rng).met) ++met[2];
    }
    for (int c = 0; c < 3; ++c) {
        const double p = cases_expected[c];
        const double freq = static_cast<double>(met[c]) / n;
        const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
        if (std::fabs(freq - p) > 3.0 * sigma + 1e-12)
            return {"maximal coupling meet rate", false,
                    "pair " + std::to_string(c) + ": " + fmt(freq) + " vs " + fmt(p)};
    }
    return {"maximal coupling meet rate", true, "3 tractable pairs within 3 sigma"};
}

BatteryResult absorption_battery(std::uint64_t seed) {
    RngStream rng = RngStream::from_key(seed, {107});
    // discrete
    DiscreteMatrixKernel dk{StochasticMatrix({{0.7, 0.3}, {0.4, 0.6}})};
    long x = 0, y = 0;
    for (int i = 0; i < 10000; ++i) {
        auto [nx, ny] = dk.joint_step(x, y, rng);
        if (nx != ny) return {"diagonal absorption", false, "discrete kernel separated"};
        x = nx;
        y = ny;
    }
    CoupledRwmKernel rk(std_normal_log_density(1), 1, 2.0);
    std::vector<double> rx{0.3}, ry{0.3};
    for (int i = 0; i < 10000; ++i) {
        auto [nx, ny] = rk.joint_step(rx, ry, rng);
        if (nx != ny) return {"diagonal absorption", false, "rwm kernel separated"};
        rx = nx;
        ry = ny;
    }
    CoupledGibbsGaussianKernel gk(0.9);
    std::vector<double> gx{0.1, -0.2}, gy{0.1, -0.2};
    for (int i = 0; i < 10000; ++i) {
        auto [nx, ny] = gk.joint_step(gx, gy, rng);
        if (nx != ny) return {"diagonal absorption", false, "gibbs kernel separated"};
        gx = nx;
        gy = ny;
    }
    IsingSsgKernel ik(4, 0.3);
    auto ix = ik.random_state(rng);
    auto iy = ix;
    for (int i = 0; i < 10000; ++i) {
        auto [nx, ny] = ik.joint_step(ix, iy, rng);
        if (nx != ny) return {"diagonal absorption", false, "ising kernel separated"};
        ix = nx;
        iy = ny;
    }
    return {"diagonal absorption", true, "4 kernels x 10^4 joint steps"};
}

BatteryResult faithfulness_battery(std::uint64_t seed) {
    const int n = 100000;
    const double level = 0.001;

    // discrete: frozen partner, exact row as reference
    {
        RngStream rng = RngStream::from_key(seed, {108});
        StochasticMatrix m({{0.5, 0.2, 0.3}, {0.1, 0.6, 0.3}, {0.25, 0.25, 0.5}});
        DiscreteMatrixKernel k{m};
        std::vector<double> counts(3, 0.0);
        for (int i = 0; i < n; ++i) {
            auto [nx, ny] = k.joint_step(0, 2, rng);
            counts[static_cast<std::size_t>(nx)] += 1.0;
            (void)ny;
        }
        std::vector<double> expected(3);
        for (std::size_t j = 0; j < 3; ++j) expected[j] = m.row(0)[j] * n;
        const double pv = chi_square_gof_pvalue(counts, expected);
        if (pv < level)
            return {"kernel faithfulness", false, "discrete joint-step marginal, p=" + fmt(pv)};
    }
    // rwm: two-sample joint-vs-marginal
    {
        RngStream rng = RngStream::from_key(seed, {109});
        CoupledRwmKernel k(std_normal_log_density(1), 1, 2.0);
        std::vector<double> a, b;
        a.reserve(n);
        b.reserve(n);
        const std::vector<double> x{0.4}, y{-1.2};
        for (int i = 0; i < n; ++i) a.push_back(k.joint_step(x, y, rng).first[0]);
        for (int i = 0; i < n; ++i) b.push_back(k.marginal_step(x, rng)[0]);
        const double pv = ks_two_sample_pvalue(std::move(a), std::move(b));
        if (pv < level) return {"kernel faithfulness", false, "rwm joint-step marginal, p=" + fmt(pv)};
    }
    // gibbs: per-coordinate two-sample
    {
        RngStream rng = RngStream::from_key(seed, {110});
        CoupledGibbsGaussianKernel k(0.8);
        std::vector<double> a0, b0, a1, b1;
        const std::vector<double> x{0.7, -0.3}, y{-0.5, 1.1};
        for (int i = 0; i < n; ++i) {
            auto s = k.joint_step(x, y, rng).first;
            a0.push_back(s[0]);
            a1.push_back(s[1]);
        }
        for (int i = 0; i < n; ++i) {
            auto s = k.marginal_step(x, rng);
            b0.push_back(s[0]);
            b1.push_back(s[1]);
        }
        const double pv0 = ks_two_sample_pvalue(std::move(a0), std::move(b0));
        const double pv1 = ks_two_sample_pvalue(std::move(a1), std::move(b1));
        if (std::min(pv0, pv1) < level / 2.0)
            return {"kernel faithfulness", false,
                    "gibbs joint-step marginal, p=" + fmt(std::min(pv0, pv1))};
    }
    // ising: magnetization distribution of the swept lattice, binned chi-square
    {
        RngStream rng = RngStream::from_key(seed, {111});
        IsingSsgKernel k(4, 0.25);
        const auto x = k.random_state(rng);
        const auto y = k.random_state(rng);
        const std::size_t sites = k.sites();
        std::vector<double> ca(sites + 1, 0.0), cb(sites + 1, 0.0);
        for (int i = 0; i < n; ++i) {
            auto s = k.joint_step(x, y, rng).first;
            std::size_t ups = 0;
            for (auto v : s) ups += v > 0 ? 1 : 0;
            ca[ups] += 1.0;
        }
        for (int i = 0; i < n; ++i) {
            auto s = k.marginal_step(x, rng);
            std::size_t ups = 0;
            for (auto v : s) ups += v > 0 ? 1 : 0;
            cb[ups] += 1.0;
        }
        // two-sample chi-square over the up-count histogram
        double stat = 0.0;
        long cells = 0;
        for (std::size_t j = 0; j <= sites; ++j) {
            const double tot = ca[j] + cb[j];
            if (tot < 10.0) continue;
            const double diff = ca[j] - cb[j];
            stat += diff * diff / tot;
            ++cells;
        }
        const double pv = cells > 1 ? chi_square_pvalue(stat, static_cast<double>(cells - 1)) : 1.0;
        if (pv < level) return {"kernel faithfulness", false, "ising joint-step marginal, p=" + fmt(pv)};
    }
    return {"kernel faithfulness", true, "4 kernels at the 0.001 level, 10^5 draws each"};
}

BatteryResult geometric_forms_battery() {
    double worst = 0.0;
    for (double p : {0.01, 0.05, 0.1, 0.2, 0.5, 0.9, 0.99}) {
        for (long k : {0L, 1L, 3L, 10L, 20L}) {
            for (long lag : {1L, 2L, 5L, 10L}) {
                const GeometricSpec spec{p, k, lag};
                const double closed = geometric_new_bound(spec);
                const double series = geometric_new_bound_series(spec);
                const double old_b = geometric_old_bound(spec);
                worst = std::max(worst, std::fabs(closed - series));
                if (std::fabs(closed - series) > 1e-10)
                    return {"geometric bound forms", false,
                            "closed vs series gap " + fmt(std::fabs(closed - series)) + " at p=" +
                                fmt(p) + " k=" + std::to_string(k) + " L=" + std::to_string(lag)};
                if (closed > old_b + 1e-9)
                    return {"geometric bound forms", false,
                            "sharper bound exceeds the mean bound at p=" + fmt(p)};
            }
        }
    }
    return {"geometric bound forms", true, "140 grid points, worst gap " + fmt(worst)};
}

BatteryResult kernel_spec_battery(const ExperimentPlan& plan) {
    try {
        if (const auto* d = std::get_if<DiscreteKernelSpec>(&plan.kernel)) {
            StochasticMatrix m(d->rows); // row-sum and nonnegativity checks
            m.stationary();              // fixed-point residual check
        } else if (const auto* r = std::get_if<RwmKernelSpec>(&plan.kernel)) {
            CoupledRwmKernel k(std_normal_log_density(r->dimension), r->dimension, r->proposal_scale);
            (void)k;
        } else if (const auto* g = std::get_if<GibbsGaussianKernelSpec>(&plan.kernel)) {
            CoupledGibbsGaussianKernel k(g->rho);
            (void)k;
        } else if (const auto* is = std::get_if<IsingKernelSpec>(&plan.kernel)) {
            IsingSsgKernel k(is->side, is->beta);
            (void)k;
        } else if (const auto* ge = std::get_if<GeometricInjectSpec>(&plan.kernel)) {
            GeometricSpec{ge->p, 0, 1}.validate();
        }
    } catch (const std::exception& e) {
        return {"config kernel parameters", false, e.what()};
    }
    return {"config kernel parameters", true, kernel_family_name(plan.kernel)};
}

} // namespace

std::vector<BatteryResult> run_validation_battery(std::uint64_t seed,
                                                  const std::optional<ExperimentPlan>& plan) {
    std::vector<BatteryResult> out;
    if (plan) out.push_back(kernel_spec_battery(*plan));
    out.push_back(dominance_battery(seed, 10000));
    out.push_back(forms_battery(seed, 10000));
    out.push_back(equality_battery(seed, 10000));
    out.push_back(forward_backward_battery(seed, 60));
    out.push_back(maximal_meet_rate_battery(seed));
    out.push_back(absorption_battery(seed));
    out.push_back(faithfulness_battery(seed));
    out.push_back(geometric_forms_battery());
    return out;
}

} // namespace lagcoup
