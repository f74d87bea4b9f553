#include "fas/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fas/copula.hpp"
#include "fas/error.hpp"
#include "fas/normal.hpp"
#include "fas/quadrature.hpp"
#include "fas/rng.hpp"

namespace fas {

double erlang_cdf(int n, double x) {
    if (n < 1) throw DomainError("erlang_cdf: shape must be >= 1");
    if (!(x > 0.0)) return 0.0;
    if (x == std::numeric_limits<double>::infinity()) return 1.0;
    if (x < n + 1.0) {
        // e^{-x} Σ_{k≥n} x^k/k!
        const double lead = std::exp(-x + n * std::log(x) - std::lgamma(n + 1.0));
        double term = 1.0, sum = 1.0;
        for (int j = 1; j < 1000; ++j) {
            term *= x / (n + j);
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return std::min(1.0, lead * sum);
    }
    // 1 - e^{-x} Σ_{k<n} x^k/k!
    double q = 0.0;
    for (int k = 0; k < n; ++k) q += std::exp(-x + k * std::log(x) - std::lgamma(k + 1.0));
    return std::clamp(1.0 - q, 0.0, 1.0);
}

MvnEstimate effective_cdf(const NodeParams& node, double r, double rel_tol, std::uint64_t seed) {
    if (std::isnan(r)) throw DomainError("effective_cdf: r is NaN");
    if (r <= 0.0) return {0.0, 0.0, 0, false, 0};
    switch (node.channel) {
        case ChannelKind::fas:
            return fas_gain_cdf(r, node.grid, node.marginal, node.corr, rel_tol, seed);
        case ChannelKind::mrc:
            return {erlang_cdf(node.antennas, node.marginal.eta * r), 0.0, 0, false, 0};
        case ChannelKind::sc:
            return {std::pow(node.marginal.cdf(r), node.antennas), 0.0, 0, false, 0};
    }
    return {};
}

double effective_pdf_paper(const NodeParams& node, double r) {
    if (!(r > 0.0)) return 0.0;
    switch (node.channel) {
        case ChannelKind::fas:
            return fas_gain_pdf_paper(r, node.grid, node.marginal, node.corr);
        case ChannelKind::mrc: {
            const double eta = node.marginal.eta;
            const int n = node.antennas;
            return eta * std::exp((n - 1) * std::log(eta * r) - eta * r - std::lgamma(static_cast<double>(n)));
        }
        case ChannelKind::sc: {
            const int n = node.antennas;
            return n * std::pow(node.marginal.cdf(r), n - 1) * node.marginal.pdf(r);
        }
    }
    return 0.0;
}

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;
constexpr double kClampBand = 1e-9;
constexpr std::uint64_t kOracleTag = 0x50F;

// Gain seen by `node` when its SNR equals x. γ̄ = 0 means the SNR is always 0.
double gain_at(const NodeParams& node, double x) {
    if (node.avg_snr == 0.0) return std::numeric_limits<double>::infinity();
    return x / node.avg_snr;
}

// Evaluate f(i) for i in [0, n). Exceptions are rethrown after the loop.
template <class F>
void for_each_index(int n, Exec exec, F&& f) {
    if (exec == Exec::serial) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr first;
    int first_index = n;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            f(i);
        } catch (...) {
#pragma omp critical(fas_metrics_error)
            {
                if (i < first_index) {
                    first_index = i;
                    first = std::current_exception();
                }
            }
        }
    }
    if (first) std::rethrow_exception(first);
}

// Factorizations larger than this (doubles) are dropped between rounds.
constexpr int kKeepPlan = 4096;

// One CDF value of a metric. Sampled FAS values keep their integrator so the
// error budget can sharpen them later.
struct Call {
    MvnEstimate est;
    std::optional<MvnIntegrator> it;
    int dim = 0;

    bool refinable() const { return it && !it->converged() && it->can_refine(); }

    void refine() {
        it->refine(false);
        est = it->estimate();
        if (est.rank * dim > kKeepPlan) it->release();
    }
};

Call start_call(const NodeParams& node, double x, double rel_tol, std::uint64_t seed) {
    Call c;
    const double g = gain_at(node, x);
    if (g == std::numeric_limits<double>::infinity()) {
        c.est = {1.0, 0.0, 0, false, 0};
        return c;
    }
    if (node.channel != ChannelKind::fas || !(g > 0.0)) {
        c.est = effective_cdf(node, g, rel_tol, seed);
        return c;
    }
    const double f = node.marginal.cdf(g);
    const int k = node.corr.dim();
    if (k == 1 || f == 0.0 || f == 1.0) {
        c.est = effective_cdf(node, g, rel_tol, seed);
        return c;
    }
    const std::vector<double> point(k, std_normal_quantile(std::clamp(f, kCopulaClamp, 1.0 - kCopulaClamp)));
    MvnOptions opt;
    opt.rel_tol = rel_tol;
    opt.seed = seed;
    c.dim = k;
    c.it.emplace(node.corr, point, opt, false);
    c.est = c.it->estimate();
    if (c.est.rank * k > kKeepPlan) c.it->release();
    return c;
}

// Sharpen the calls that dominate the error until it fits the budget or every
// call has met its own tolerance. err(e) combines the per-call contributions
// e[i] = coef(i)·se_i; budget() is re-read after each round.
template <class Coef, class Err, class Budget>
void refine_to_budget(std::vector<Call>& calls, Coef&& coef, Err&& err, Budget&& budget, Exec exec) {
    const int n = static_cast<int>(calls.size());
    std::vector<double> e(n);
    while (true) {
        for (int i = 0; i < n; ++i) e[i] = std::abs(coef(i)) * calls[i].est.std_error;
        const double total = err(e);
        if (total <= budget()) return;

        std::vector<int> cand;
        for (int i = 0; i < n; ++i)
            if (e[i] > 0.0 && calls[i].refinable()) cand.push_back(i);
        if (cand.empty()) return;
        std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return e[a] > e[b]; });

        // Largest contributions first, until they account for half the error.
        std::vector<double> picked(n, 0.0);
        std::vector<int> sel;
        for (int i : cand) {
            sel.push_back(i);
            picked[i] = e[i];
            if (err(picked) >= 0.5 * total) break;
        }
        for_each_index(static_cast<int>(sel.size()), exec, [&](int t) { calls[sel[t]].refine(); });
    }
}

double rss(const std::vector<double>& e) {
    double v = 0.0;
    for (double x : e) v += x * x;
    return std::sqrt(v);
}

double linear_sum(const std::vector<double>& e) {
    double v = 0.0;
    for (double x : e) v += x;
    return v;
}

HalfLineNodes snr_nodes(const SecrecyScenario& s, double scale) {
    return half_line_nodes(gauss_laguerre_rule(s.quad_order), scale);
}

double metric_budget(const SecrecyScenario& s, double value) { return s.metric_tol * std::max(std::abs(value), 1e-3); }

MetricResult asc_impl(const SecrecyScenario& s, Exec exec, bool with_bob) {
    s.validate();
    const HalfLineNodes hl = snr_nodes(s, s.quad_scale);
    const int n = static_cast<int>(hl.x.size());
    // calls[0, n) Bob, calls[n, 2n) Eve
    std::vector<Call> calls(2 * n);
    for_each_index(2 * n, exec, [&](int t) {
        const int i = t % n;
        if (t < n) {
            if (with_bob)
                calls[t] = start_call(s.bob, hl.x[i], s.mvn_tol, rng::derive(s.seed, {rng::kBobStream, std::uint64_t(i)}));
            else
                calls[t].est = {0.0, 0.0, 0, false, 0};
        } else {
            calls[t] = start_call(s.eve, hl.x[i], s.mvn_tol, rng::derive(s.seed, {rng::kEveStream, std::uint64_t(i)}));
        }
    });

    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = kInvLn2 * hl.weight[i] / (1.0 + hl.x[i]);
    auto value = [&] {
        double v = 0.0;
        for (int i = 0; i < n; ++i) v += c[i] * (1.0 - calls[i].est.value) * calls[n + i].est.value;
        return v;
    };
    refine_to_budget(
        calls,
        [&](int t) {
            const int i = t % n;
            return t < n ? c[i] * calls[n + i].est.value : c[i] * (1.0 - calls[i].est.value);
        },
        rss, [&] { return metric_budget(s, value()); }, exec);

    MetricResult out;
    double sum = 0.0, var = 0.0;
    for (int i = 0; i < n; ++i) {
        const MvnEstimate& fb = calls[i].est;
        const MvnEstimate& fe = calls[n + i].est;
        const double v = c[i] * (1.0 - fb.value) * fe.value;
        if (!std::isfinite(v)) {
            throw NumericalError("asc: integrand not finite at node " + std::to_string(i + 1) +
                                 " (x = " + std::to_string(hl.x[i]) + ")");
        }
        sum += v;
        const double eb = fb.std_error * fe.value;
        const double ee = fe.std_error * (1.0 - fb.value);
        var += c[i] * c[i] * (eb * eb + ee * ee);
        out.mvn_capped = out.mvn_capped || fb.capped || fe.capped;
    }
    out.value = std::max(0.0, sum);
    out.raw_value = sum;
    out.estimator_error = std::sqrt(var);
    out.nodes = n;
    return out;
}

double ratio_params(const SecrecyScenario& s, double& r_t) {
    const double r_o = std::exp2(s.secrecy_rate);
    r_t = r_o - 1.0;
    return r_o;
}

}  // namespace

MetricResult asc(const SecrecyScenario& s, Exec exec) { return asc_impl(s, exec, true); }

MetricResult asc_asymptotic(const SecrecyScenario& s, Exec exec) { return asc_impl(s, exec, false); }

namespace {

// Bob alone decides the outage when Eve never sees any signal.
MetricResult bob_only_outage(const SecrecyScenario& s, double r_t, std::uint64_t seed) {
    Call c = start_call(s.bob, r_t, s.mvn_tol, seed);
    while (c.refinable()) c.refine();
    MetricResult out;
    out.value = out.raw_value = c.est.value;
    out.estimator_error = c.est.std_error;
    out.mvn_capped = c.est.capped;
    out.nodes = 1;
    return out;
}

}  // namespace

MetricResult sop(const SecrecyScenario& s, Exec exec) {
    s.validate();
    double r_t = 0.0;
    const double r_o = ratio_params(s, r_t);
    if (s.eve.avg_snr == 0.0) return bob_only_outage(s, r_t, rng::derive(s.seed, {rng::kBobStream, 0}));

    const double scale = s.eve.avg_snr / s.eve.marginal.eta;
    const HalfLineNodes hl = snr_nodes(s, scale);
    const int n = static_cast<int>(hl.x.size());
    const int jac = s.eve.channel == ChannelKind::fas ? s.eve.grid.ports() : 1;
    const double log_jac = -jac * std::log(s.eve.avg_snr);

    std::vector<Call> fb(n);
    std::vector<double> c(n);
    for_each_index(n, exec, [&](int i) {
        fb[i] = start_call(s.bob, r_o * hl.x[i] + r_t, s.mvn_tol,
                           rng::derive(s.seed, {rng::kBobStream, std::uint64_t(i)}));
        const double g = hl.x[i] / s.eve.avg_snr;
        const double log_pdf = s.eve.channel == ChannelKind::fas
                                   ? fas_gain_log_pdf_paper(g, s.eve.grid, s.eve.marginal, s.eve.corr)
                                   : std::log(effective_pdf_paper(s.eve, g));
        c[i] = hl.weight[i] * std::exp(log_pdf + log_jac);
    });
    auto value = [&] {
        double v = 0.0;
        for (int i = 0; i < n; ++i) v += c[i] * fb[i].est.value;
        return std::clamp(v, 0.0, 1.0);
    };
    refine_to_budget(fb, [&](int i) { return c[i]; }, rss, [&] { return metric_budget(s, value()); }, exec);

    MetricResult out;
    double sum = 0.0, var = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = c[i] * fb[i].est.value;
        if (!std::isfinite(v)) {
            throw NumericalError("sop: integrand not finite at node " + std::to_string(i + 1) +
                                 " (x = " + std::to_string(hl.x[i]) + ")");
        }
        sum += v;
        const double e = c[i] * fb[i].est.std_error;
        var += e * e;
        out.mvn_capped = out.mvn_capped || fb[i].est.capped;
    }
    out.raw_value = sum;
    out.clamped = sum < -kClampBand || sum > 1.0 + kClampBand;
    out.value = std::clamp(sum, 0.0, 1.0);
    out.estimator_error = std::sqrt(var);
    out.nodes = n;
    return out;
}

MetricResult sop_oracle(const SecrecyScenario& s, int grid_points, Exec exec) {
    s.validate();
    if (grid_points < 1000) throw DomainError("sop_oracle: grid_points must be >= 1000");
    double r_t = 0.0;
    const double r_o = ratio_params(s, r_t);
    const std::uint64_t seed_b = rng::derive(s.seed, {rng::kBobStream, kOracleTag});
    const std::uint64_t seed_e = rng::derive(s.seed, {rng::kEveStream, kOracleTag});
    if (s.eve.avg_snr == 0.0) return bob_only_outage(s, r_t, seed_b);

    const double unit = s.eve.avg_snr / s.eve.marginal.eta;
    const double span = s.eve.channel == ChannelKind::mrc ? 60.0 + 2.0 * s.eve.antennas
                                                           : 40.0 + std::log(static_cast<double>(s.eve.elements()));
    const double x_min = 1e-6 * unit;
    const double x_max = span * unit;
    const int m = grid_points;
    std::vector<double> x(m + 1);
    for (int j = 0; j <= m; ++j) x[j] = x_min * std::pow(x_max / x_min, static_cast<double>(j) / m);

    // Bob at the cell midpoints plus the two outer pieces.
    std::vector<double> xb(m + 2);
    xb[0] = 0.5 * x_min;
    for (int j = 0; j < m; ++j) xb[j + 1] = 0.5 * (x[j] + x[j + 1]);
    xb[m + 1] = x_max;

    // Eve to her own tolerance: with common random numbers her error moves the
    // whole staircase, so it is not traded against Bob's.
    std::vector<MvnEstimate> fe(m + 1);
    for_each_index(m + 1, exec, [&](int j) {
        Call c = start_call(s.eve, x[j], s.mvn_tol, seed_e);
        while (c.refinable()) c.refine();
        fe[j] = c.est;
    });

    // Mass of each Bob piece.
    std::vector<double> mass(m + 2);
    mass[0] = fe[0].value;
    for (int j = 0; j < m; ++j) mass[j + 1] = std::abs(fe[j + 1].value - fe[j].value);
    mass[m + 1] = 1.0 - fe[m].value;

    std::vector<Call> fb(m + 2);
    for_each_index(m + 2, exec, [&](int j) { fb[j] = start_call(s.bob, r_o * xb[j] + r_t, s.mvn_tol, seed_b); });

    auto value = [&] {
        double v = fb[0].est.value * fe[0].value;
        for (int j = 0; j < m; ++j) v += fb[j + 1].est.value * (fe[j + 1].value - fe[j].value);
        return v + fb[m + 1].est.value * (1.0 - fe[m].value);
    };
    refine_to_budget(fb, [&](int j) { return mass[j]; }, linear_sum, [&] { return metric_budget(s, value()); },
                     exec);

    MetricResult out;
    double se_e = 0.0, se_b = 0.0;
    // Eve's errors share their random numbers, so they add linearly; the
    // weight of F_E(x_k) in the sum is F_B on its left minus F_B on its right.
    for (int k = 0; k <= m; ++k) {
        se_e += fe[k].std_error * std::abs(fb[k].est.value - fb[k + 1].est.value);
        out.mvn_capped = out.mvn_capped || fe[k].capped;
    }
    for (int j = 0; j < m + 2; ++j) {
        se_b += fb[j].est.std_error * mass[j];
        out.mvn_capped = out.mvn_capped || fb[j].est.capped;
    }
    const double sum = value();
    out.raw_value = sum;
    out.clamped = sum < -kClampBand || sum > 1.0 + kClampBand;
    out.value = std::clamp(sum, 0.0, 1.0);
    out.estimator_error = std::hypot(se_e, se_b);
    out.nodes = (m + 1) + (m + 2);
    return out;
}

MetricResult see_from_asc(const SecrecyScenario& s, const MetricResult& a) {
    const double p_tot = s.power.total();
    if (!(p_tot > 0.0) || !std::isfinite(p_tot)) throw DomainError("see: total power must be positive");
    MetricResult out = a;
    out.value = a.value / p_tot;
    out.raw_value = a.raw_value / p_tot;
    out.estimator_error = a.estimator_error / p_tot;
    return out;
}

MetricResult see(const SecrecyScenario& s, Exec exec) { return see_from_asc(s, asc(s, exec)); }

}  // namespace fas
