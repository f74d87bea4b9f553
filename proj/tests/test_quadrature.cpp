#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <limits>

#include "fas/error.hpp"
#include "fas/quadrature.hpp"

using namespace fas;

TEST(LaguerreEval, LowOrders) {
    EXPECT_EQ(laguerre_eval(0, 3.7), 1.0);
    EXPECT_EQ(laguerre_eval(1, 1.0), 0.0);
    EXPECT_NEAR(laguerre_eval(2, 2.0 + std::sqrt(2.0)), 0.0, 1e-12);
    EXPECT_NEAR(laguerre_eval(2, 2.0 - std::sqrt(2.0)), 0.0, 1e-12);
}

TEST(LaguerreEval, MatchesClosedFormL3) {
    for (double x : {0.0, 0.3, 1.7, 5.0, 12.5}) {
        const double l3 = (-x * x * x + 9 * x * x - 18 * x + 6) / 6.0;
        EXPECT_NEAR(laguerre_eval(3, x), l3, 1e-12 * std::max(1.0, std::abs(l3)));
    }
}

TEST(GaussLaguerreRule, OrderOne) {
    const auto r = gauss_laguerre_rule(1);
    ASSERT_EQ(r.nodes.size(), 1u);
    EXPECT_NEAR(r.nodes[0], 1.0, 1e-14);
    EXPECT_NEAR(r.weights[0], 1.0, 1e-14);
}

TEST(GaussLaguerreRule, OrderTwo) {
    const auto r = gauss_laguerre_rule(2);
    EXPECT_NEAR(r.nodes[0], 2.0 - std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(r.nodes[1], 2.0 + std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(r.weights[0], (2.0 + std::sqrt(2.0)) / 4.0, 1e-12);
    EXPECT_NEAR(r.weights[1], (2.0 - std::sqrt(2.0)) / 4.0, 1e-12);
    EXPECT_NEAR(r.weights[0] + r.weights[1], 1.0, 1e-12);
    const double moments[] = {1, 1, 2, 6};
    for (int k = 0; k < 4; ++k)
        EXPECT_NEAR(integrate_exp_weighted(r, [k](double x) { return std::pow(x, k); }), moments[k], 1e-12);
}

TEST(GaussLaguerreRule, InvariantsUpToMaxOrder) {
    for (int n : {3, 8, 20, 32, 64, 100, 128}) {
        const auto r = gauss_laguerre_rule(n);
        ASSERT_EQ(r.order, n);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            EXPECT_GT(r.nodes[i], 0.0);
            EXPECT_GT(r.weights[i], 0.0);
            EXPECT_TRUE(std::isfinite(r.scaled_weights[i]));
            if (i > 0) {
                EXPECT_GT(r.nodes[i], r.nodes[i - 1]);
            }
            sum += r.weights[i];
        }
        EXPECT_NEAR(sum, 1.0, 1e-12) << "order " << n;
    }
}

TEST(GaussLaguerreRule, PolynomialExactness) {
    for (int n = 1; n <= 20; ++n) {
        const auto r = gauss_laguerre_rule(n);
        double fact = 1.0;
        for (int k = 0; k <= 2 * n - 1; ++k) {
            if (k > 0) fact *= k;
            const double got = integrate_exp_weighted(r, [k](double x) { return std::pow(x, k); });
            EXPECT_NEAR(got / fact, 1.0, 1e-10) << "n=" << n << " k=" << k;
        }
    }
}

TEST(GaussLaguerreRule, Deterministic) {
    const auto a = gauss_laguerre_rule(64);
    const auto b = gauss_laguerre_rule(64);
    EXPECT_EQ(a.nodes, b.nodes);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.scaled_weights, b.scaled_weights);
}

TEST(GaussLaguerreRule, OrderOutOfRange) {
    EXPECT_THROW(gauss_laguerre_rule(0), DomainError);
    EXPECT_THROW(gauss_laguerre_rule(kMaxLaguerreOrder + 1), DomainError);
}

TEST(IntegrateExpWeighted, ConstantAndSquare) {
    const auto r = gauss_laguerre_rule(2);
    EXPECT_NEAR(integrate_exp_weighted(r, [](double) { return 1.0; }), 1.0, 1e-14);
    EXPECT_NEAR(integrate_exp_weighted(r, [](double x) { return x * x; }), 2.0, 1e-12);
}

TEST(IntegrateExpWeighted, ReciprocalAgainstAdaptive) {
    boost::math::quadrature::exp_sinh<double> es;
    const double ref = es.integrate([](double x) { return std::exp(-x) / (1.0 + x); }, 0.0,
                                    std::numeric_limits<double>::infinity());
    const double got = integrate_exp_weighted(gauss_laguerre_rule(32), [](double x) { return 1.0 / (1.0 + x); });
    EXPECT_NEAR(got, ref, 1e-6);
}

TEST(IntegrateExpWeighted, NonFiniteIntegrandNamesNode) {
    const auto r = gauss_laguerre_rule(4);
    try {
        integrate_exp_weighted(r, [&](double x) { return x == r.nodes[2] ? std::nan("") : 1.0; });
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find('3'), std::string::npos) << e.what();
    }
}

TEST(IntegrateExpWeighted, MonotoneRefinement) {
    const auto f8 = gauss_laguerre_rule(8), f32 = gauss_laguerre_rule(32), f64 = gauss_laguerre_rule(64);
    const std::function<double(double)> fs[] = {
        [](double x) { return 1.0 / (1.0 + x); },
        [](double x) { return std::sqrt(1.0 + x); },
        [](double x) { return std::log1p(x) / (1.0 + x); },
        [](double x) { return 1.0 / (1.0 + x * x); },
    };
    for (const auto& f : fs) {
        const double a = integrate_exp_weighted(f8, f), b = integrate_exp_weighted(f32, f),
                     c = integrate_exp_weighted(f64, f);
        EXPECT_LE(std::abs(b - c), std::abs(a - c));
    }
}

TEST(IntegrateHalfLine, ScaledRuleOnSlowDecay) {
    boost::math::quadrature::exp_sinh<double> es;
    const auto r = gauss_laguerre_rule(128);
    for (double a : {1.0, 0.1, 0.05}) {
        auto g = [a](double x) { return std::exp(-a * x) / (1.0 + x); };
        const double ref = es.integrate(g, 0.0, std::numeric_limits<double>::infinity());
        EXPECT_NEAR(integrate_half_line(r, g, 2.0), ref, 1e-10 * ref) << a;
    }
}

TEST(IntegrateHalfLine, ExactForScaledPolynomials) {
    // ∫ x^k e^{-x/s} dx = k! s^{k+1}
    const auto r = gauss_laguerre_rule(10);
    const double s = 3.5;
    double fact = 1.0;
    for (int k = 0; k < 20; ++k) {
        if (k > 0) fact *= k;
        const double got = integrate_half_line(r, [&](double x) { return std::pow(x, k) * std::exp(-x / s); }, s);
        EXPECT_NEAR(got / (fact * std::pow(s, k + 1)), 1.0, 1e-10) << k;
    }
}

TEST(IntegrateHalfLine, NodesMatchDirectSum) {
    const auto r = gauss_laguerre_rule(64);
    auto g = [](double x) { return 1.0 / (1.0 + x * x); };
    const auto hl = half_line_nodes(r, 2.0);
    double s = 0.0;
    for (std::size_t i = 0; i < hl.x.size(); ++i) s += hl.weight[i] * g(hl.x[i]);
    EXPECT_NEAR(s, integrate_half_line(r, g, 2.0), 1e-14);
}
