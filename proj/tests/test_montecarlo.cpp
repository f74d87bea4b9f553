#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/expint.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "fas/config.hpp"
#include "fas/copula.hpp"
#include "fas/error.hpp"
#include "fas/metrics.hpp"
#include "fas/montecarlo.hpp"
#include "fas/sweep.hpp"

using namespace fas;

namespace {

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a), mb = mean(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

// Draws n pairs of gains from a two-port correlation with the given sampler.
template <class Draw>
void draw_pairs(double rho, int n, Draw draw, std::vector<double>& a, std::vector<double>& b) {
    const auto R = CorrelationMatrix::equicorrelated(2, rho);
    const auto L = unit_row_factor(R);
    const auto m = MarginalModel::rayleigh(1.0);
    std::mt19937_64 rng(77);
    double g[2];
    a.resize(n);
    b.resize(n);
    for (int i = 0; i < n; ++i) {
        draw(L, m, rng, std::span<double>(g, 2));
        a[i] = g[0];
        b[i] = g[1];
    }
}

SecrecyScenario scenario(const std::function<void(ScenarioInputs&)>& edit = {}) {
    ScenarioInputs in;
    in.seed = 5;
    if (edit) edit(in);
    return build_scenario(in);
}

}  // namespace

TEST(Sampler, SinglePortMeanIsInverseEta) {
    const auto node = NodeParams::fas(Role::bob, PortGrid{1, 1, 0, 0}, MarginalModel::rayleigh(2.0), 1.0);
    const auto g = sample_effective_gains(node, 400'000, 1);
    // exponential with rate 2: sd = mean = 0.5
    EXPECT_NEAR(mean(g), 0.5, 4.0 * 0.5 / std::sqrt(400'000.0));
    EXPECT_TRUE(std::all_of(g.begin(), g.end(), [](double x) { return x >= 0.0; }));
}

TEST(Sampler, CopulaMarginalsAreExponential) {
    std::vector<double> a, b;
    draw_pairs(0.7, 200'000, sample_gains_copula, a, b);
    const double se = 1.0 / std::sqrt(200'000.0);
    EXPECT_NEAR(mean(a), 1.0, 4 * se);
    EXPECT_NEAR(mean(b), 1.0, 4 * se);
    // P(g ≤ ln 2) = 1/2
    const auto below = std::count_if(a.begin(), a.end(), [](double x) { return x <= std::numbers::ln2; });
    EXPECT_NEAR(below / 200'000.0, 0.5, 4 * 0.5 * se);
}

TEST(Sampler, IndependentPortsUncorrelated) {
    std::vector<double> a, b;
    const int n = 200'000;
    draw_pairs(0.0, n, sample_gains_copula, a, b);
    EXPECT_NEAR(pearson(a, b), 0.0, 4.0 / std::sqrt(n));
    draw_pairs(0.0, n, sample_gains, a, b);
    EXPECT_NEAR(pearson(a, b), 0.0, 4.0 / std::sqrt(n));
}

TEST(Sampler, ComplexGainCorrelationIsRhoSquared) {
    // |h|² of jointly Gaussian complex entries with correlation ρ has Pearson ρ².
    std::vector<double> a, b;
    const int n = 400'000;
    for (double rho : {0.3, 0.6, -0.8}) {
        draw_pairs(rho, n, sample_gains, a, b);
        EXPECT_NEAR(pearson(a, b), rho * rho, 0.01) << rho;
        EXPECT_NEAR(mean(a), 1.0, 4.0 / std::sqrt(n));
    }
}

TEST(Sampler, CopulaDependenceStrongerThanComplex) {
    std::vector<double> a, b, c, d;
    draw_pairs(0.6, 200'000, sample_gains_copula, a, b);
    draw_pairs(0.6, 200'000, sample_gains, c, d);
    EXPECT_GT(pearson(a, b), pearson(c, d) + 0.05);
}

TEST(Sampler, UnitRowFactor) {
    ScenarioInputs in;
    in.bob.k1 = in.bob.k2 = 6;
    const auto s = build_scenario(in);
    const auto L = unit_row_factor(s.bob.corr);
    for (Eigen::Index i = 0; i < L.rows(); ++i) EXPECT_NEAR(L.row(i).norm(), 1.0, 1e-14);
    EXPECT_TRUE(L.isLowerTriangular());
}

TEST(Sampler, NegLogSurvival) {
    const boost::math::normal_distribution<long double> nd;
    for (double z : {-3.0, 0.0, 2.5, 10.0, 29.9, 30.0, 30.1, 35.0, 60.0}) {
        const long double ref = -std::log(boost::math::cdf(boost::math::complement(nd, static_cast<long double>(z))));
        EXPECT_NEAR(neg_log_normal_sf(z), static_cast<double>(ref), 1e-12 * std::max(1.0, double(ref))) << z;
    }
}

TEST(Sampler, EmpiricalCdfInsideDkwBand) {
    const auto s = scenario();
    const std::uint64_t n = 200'000;
    auto g = sample_effective_gains(s.bob, n, 9);
    std::sort(g.begin(), g.end());
    // P(sup |F_n - F| > ε) ≤ 2 exp(-2 n ε²), at 1e-4.
    const double eps = std::sqrt(std::log(2.0 / 1e-4) / (2.0 * n));
    for (int i = 1; i <= 20; ++i) {
        const double r = 0.15 * i;
        const auto f = fas_gain_cdf(r, s.bob.grid, s.bob.marginal, s.bob.corr, 1e-4, 3);
        const double fn = double(std::upper_bound(g.begin(), g.end(), r) - g.begin()) / n;
        EXPECT_LE(std::abs(fn - f.value), eps + 4 * f.std_error) << r;
    }
}

TEST(Simulate, RejectsFewTrials) {
    const auto s = scenario();
    McOptions o;
    o.trials = 9'999;
    EXPECT_THROW(simulate_metrics(s, o), DomainError);
    o.trials = 10'000;
    EXPECT_NO_THROW(simulate_metrics(s, o));
}

TEST(Simulate, Deterministic) {
    const auto s = scenario();
    McOptions o;
    o.trials = 100'000;
    o.seed = 42;
    std::vector<double> c1, c2, c3;
    const auto a = simulate_metrics(s, o, &c1);
    const auto b = simulate_metrics(s, o, &c2);
    const auto c = simulate_metrics_serial(s, o, &c3);
    EXPECT_EQ(a.asc.mean, b.asc.mean);
    EXPECT_EQ(a.asc.mean, c.asc.mean);
    EXPECT_EQ(a.asc.std_error, c.asc.std_error);
    EXPECT_EQ(a.sop.mean, c.sop.mean);
    EXPECT_EQ(c1, c2);
    EXPECT_EQ(c1, c3);
    EXPECT_NEAR(mean(c1), a.asc.mean, 1e-12);

    o.seed = 43;
    EXPECT_NE(simulate_metrics(s, o).asc.mean, a.asc.mean);
}

TEST(Simulate, ComplexChannelDeterministic) {
    const auto s = scenario();
    McOptions o;
    o.trials = 50'000;
    o.channel = McChannel::complex;
    EXPECT_EQ(simulate_metrics(s, o).asc.mean, simulate_metrics_serial(s, o).asc.mean);
}

TEST(Simulate, SymmetricOutageIsHalf) {
    // Same receiver and SNR at both ends: P(γ_B ≤ γ_E) = 1/2.
    const auto s = scenario([](ScenarioInputs& in) {
        in.bob.gamma_db = 5.0;
        in.eve.gamma_db = 5.0;
        in.secrecy_rate = 0.0;
    });
    McOptions o;
    o.trials = 400'000;
    o.seed = 8;
    const auto r = simulate_metrics(s, o);
    EXPECT_NEAR(r.sop.mean, 0.5, 4 * r.sop.std_error);
    EXPECT_NEAR(sop_oracle(s).value, 0.5, 2e-3);
}

TEST(Simulate, NoEavesdropperMatchesErgodicCapacity) {
    const auto s = scenario([](ScenarioInputs& in) {
        in.bob.k1 = in.bob.k2 = 1;
        in.bob.gamma_db = 10.0;
    });
    auto z = s;
    z.eve.avg_snr = 0.0;
    McOptions o;
    o.trials = 400'000;
    o.seed = 2;
    const auto r = simulate_metrics(z, o);
    // E log2(1 + 10 X), X ~ Exp(1)
    const double ref = std::exp(0.1) * boost::math::expint(1, 0.1) / std::numbers::ln2;
    EXPECT_NEAR(r.asc.mean, ref, 4 * r.asc.std_error);
    EXPECT_NEAR(asc(z).value, ref, 1e-6 * ref);
}

TEST(Simulate, SeedsAgreeStatistically) {
    const auto s = scenario([](ScenarioInputs& in) {
        in.bob.gamma_db = 3.0;
        in.eve.gamma_db = 3.0;
        in.secrecy_rate = 0.0;
    });
    McOptions o;
    o.trials = 200'000;
    o.seed = 10;
    const auto r = simulate_metrics(s, o);
    o.seed = 11;
    const auto q = simulate_metrics(s, o);
    EXPECT_NEAR(r.asc.mean, q.asc.mean, 5 * std::hypot(r.asc.std_error, q.asc.std_error));
}

TEST(Simulate, AnalyticalMetricsAgree) {
    const auto s = scenario([](ScenarioInputs& in) { in.eve.gamma_db = 0.0; });
    McOptions o;
    o.trials = 1'000'000;
    o.seed = 21;
    const auto r = simulate_metrics(s, o);
    const auto a = asc(s);
    const auto p = sop_oracle(s);
    EXPECT_LE(std::abs(mean_z(a.value, a.estimator_error, r.asc.mean, r.asc.std_error)), 4.0);
    EXPECT_LE(std::abs(proportion_z(p.value, p.estimator_error, r.sop.mean, o.trials)), 4.0);
}

TEST(Simulate, McChannelNames) {
    EXPECT_EQ(parse_mc_channel("copula"), McChannel::copula);
    EXPECT_EQ(parse_mc_channel("complex"), McChannel::complex);
    EXPECT_STREQ(to_string(McChannel::complex), "complex");
    EXPECT_THROW(parse_mc_channel("rician"), DomainError);
}

TEST(ZScores, Mean) {
    EXPECT_DOUBLE_EQ(mean_z(1.0, 0.3, 1.5, 0.4), 1.0);
    EXPECT_DOUBLE_EQ(mean_z(2.0, 0.0, 1.0, 0.5), -2.0);
}

TEST(ZScores, Proportion) {
    // p0 = 0.5, N = 100: sd = 0.05
    EXPECT_NEAR(proportion_z(0.5, 0.0, 0.6, 100), 2.0, 1e-12);
    // zero count and zero analytic still finite
    const double z = proportion_z(0.0, 0.0, 0.0, 10'000);
    EXPECT_TRUE(std::isfinite(z));
    EXPECT_EQ(z, 0.0);
    EXPECT_TRUE(std::isfinite(proportion_z(0.0, 0.0, 1e-4, 10'000)));
}
