#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "fas/copula.hpp"
#include "fas/error.hpp"
#include "fas/montecarlo.hpp"
#include "fas/normal.hpp"
#include "fas/scenario.hpp"

using namespace fas;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CorrelationMatrix jakes(int side, double area) { return copula_correlation(jakes_covariance(PortGrid::square(side, area))); }

}  // namespace

TEST(RayleighMarginal, CdfExamples) {
    EXPECT_EQ(rayleigh_gain_cdf(0.0, 1.0), 0.0);
    EXPECT_NEAR(rayleigh_gain_cdf(std::numbers::ln2, 1.0), 0.5, 1e-15);
    EXPECT_NEAR(rayleigh_gain_cdf(1.0, 1.0), 1.0 - std::exp(-1.0), 1e-15);
}

TEST(RayleighMarginal, PdfExamples) {
    EXPECT_EQ(rayleigh_gain_pdf(0.0, 1.0), 1.0);
    EXPECT_NEAR(rayleigh_gain_pdf(1.0, 2.0), 2.0 * std::exp(-2.0), 1e-15);
    for (double r : {0.1, 0.7, 3.0}) {
        const double h = 1e-6;
        const double fd = (rayleigh_gain_cdf(r + h, 1.5) - rayleigh_gain_cdf(r - h, 1.5)) / (2 * h);
        EXPECT_NEAR(fd, rayleigh_gain_pdf(r, 1.5), 1e-6);
    }
}

TEST(RayleighMarginal, ModelInvariants) {
    const auto m = MarginalModel::rayleigh(0.7);
    EXPECT_EQ(m.cdf(0.0), 0.0);
    EXPECT_EQ(m.cdf(kInf), 1.0);
    double prev = 0.0;
    for (double r = 0.0; r < 30.0; r += 0.25) {
        EXPECT_GE(m.cdf(r), prev);
        prev = m.cdf(r);
    }
    boost::math::quadrature::exp_sinh<double> es;
    EXPECT_NEAR(es.integrate([&](double r) { return m.pdf(r); }, 0.0, kInf), 1.0, 1e-8);
    for (double x : {1e-6, 0.01, 0.5, 1.0, 4.0, 20.0}) EXPECT_NEAR(m.quantile(m.cdf(x)), x, 1e-10 * std::max(1.0, x));
    EXPECT_NEAR(m.mean(), 1.0 / 0.7, 1e-15);
    EXPECT_THROW(MarginalModel::rayleigh(0.0), DomainError);
}

TEST(GaussianCopulaCdf, BoundaryAxioms) {
    const auto R = CorrelationMatrix::equicorrelated(3, 0.6);
    const double zero[] = {0.3, 0.0, 0.9};
    EXPECT_EQ(gaussian_copula_cdf(zero, R, 1e-3, 0).value, 0.0);
    const double ones[] = {0.3, 1.0, 1.0};
    EXPECT_EQ(gaussian_copula_cdf(ones, R, 1e-3, 0).value, 0.3);
    const auto R2 = CorrelationMatrix::equicorrelated(2, -0.4);
    const double zero2[] = {0.3, 0.0};
    EXPECT_EQ(gaussian_copula_cdf(zero2, R2, 1e-3, 0).value, 0.0);
}

TEST(GaussianCopulaCdf, ProductCopula) {
    const auto R = CorrelationMatrix::identity(4);
    const double u[] = {0.5, 0.5, 0.5, 0.5};
    const auto e = gaussian_copula_cdf(u, R, 1e-4, 3);
    EXPECT_LE(std::abs(e.value - 0.0625), 3.0 * e.std_error + 1e-14);
}

TEST(GaussianCopulaCdf, MarginalizingOnesUsesSubmatrix) {
    const auto R = jakes(2, 0.5);
    const double u[] = {0.4, 1.0, 0.7, 1.0};
    const auto e = gaussian_copula_cdf(u, R, 1e-4, 1);
    Eigen::MatrixXd sub(2, 2);
    sub << 1.0, R.entries()(0, 2), R.entries()(2, 0), 1.0;
    const double pt[] = {std_normal_quantile(0.4), std_normal_quantile(0.7)};
    const auto ref = mvn_cdf(copula_correlation(sub), pt, 1e-6, 99);
    EXPECT_LE(std::abs(e.value - ref.value), 3.0 * std::hypot(e.std_error, ref.std_error) + 1e-12);
}

TEST(GaussianCopulaCdf, Errors) {
    const auto R = CorrelationMatrix::identity(2);
    const double bad[] = {0.5, 1.2};
    EXPECT_THROW(gaussian_copula_cdf(bad, R, 1e-3, 0), DomainError);
    const double three[] = {0.5, 0.5, 0.5};
    EXPECT_THROW(gaussian_copula_cdf(three, R, 1e-3, 0), DomainError);
}

TEST(GaussianCopulaCdf, FrechetUpperBoundAndTwoIncreasing) {
    std::mt19937_64 g(17);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const int d = 2 + t % 6;
        const auto R = copula_correlation(jakes_covariance(PortGrid{d, 1, 0.3 + U(g), 0.0}));
        std::vector<double> u(d);
        for (auto& x : u) x = U(g);
        const auto e = gaussian_copula_cdf(u, R, 1e-3, t);
        EXPECT_LE(e.value, *std::min_element(u.begin(), u.end()) + 4.0 * e.std_error + 1e-15);
    }
    for (int t = 0; t < 50; ++t) {
        const auto R = CorrelationMatrix::equicorrelated(2, 2.0 * U(g) - 1.0);
        double a1 = U(g), b1 = U(g), a2 = U(g), b2 = U(g);
        if (a1 > b1) std::swap(a1, b1);
        if (a2 > b2) std::swap(a2, b2);
        auto C = [&](double x, double y) {
            const double u[] = {x, y};
            return gaussian_copula_cdf(u, R, 1e-4, 1000 + t);
        };
        const auto c11 = C(b1, b2), c01 = C(a1, b2), c10 = C(b1, a2), c00 = C(a1, a2);
        const double vol = c11.value - c01.value - c10.value + c00.value;
        const double se = std::sqrt(c11.std_error * c11.std_error + c01.std_error * c01.std_error +
                                    c10.std_error * c10.std_error + c00.std_error * c00.std_error);
        EXPECT_GE(vol, -4.0 * se - 1e-14);
    }
}

TEST(GaussianCopulaDensity, IdentityIsOne) {
    const auto R = CorrelationMatrix::identity(3);
    const double u[] = {0.1, 0.5, 0.97};
    EXPECT_NEAR(gaussian_copula_density(u, R), 1.0, 1e-15);
}

TEST(GaussianCopulaDensity, CentreOfBivariate) {
    const auto R = CorrelationMatrix::equicorrelated(2, 0.9);
    const double u[] = {0.5, 0.5};
    EXPECT_NEAR(gaussian_copula_density(u, R), 1.0 / std::sqrt(1.0 - 0.81), 1e-12);
}

TEST(GaussianCopulaDensity, MatchesBivariateFormula) {
    const double rho = -0.35;
    const auto R = CorrelationMatrix::equicorrelated(2, rho);
    const double u[] = {0.2, 0.85};
    const double x = std_normal_quantile(u[0]), y = std_normal_quantile(u[1]);
    const double ref = std::exp(-(rho * rho * (x * x + y * y) - 2 * rho * x * y) / (2 * (1 - rho * rho))) /
                       std::sqrt(1 - rho * rho);
    EXPECT_NEAR(gaussian_copula_density(u, R), ref, 1e-12 * ref);
}

TEST(GaussianCopulaDensity, IntegratesToOne) {
    const auto R = CorrelationMatrix::equicorrelated(2, 0.5);
    boost::math::quadrature::tanh_sinh<double> ts;
    auto inner = [&](double a) {
        return ts.integrate(
            [&](double b) {
                const double u[] = {a, b};
                return gaussian_copula_density(u, R);
            },
            0.0, 1.0);
    };
    EXPECT_NEAR(ts.integrate(inner, 0.0, 1.0), 1.0, 1e-4);
}

TEST(GaussianCopulaDensity, BoundaryIsDomainError) {
    const auto R = CorrelationMatrix::identity(2);
    const double u[] = {0.0, 0.5};
    EXPECT_THROW(gaussian_copula_density(u, R), DomainError);
}

TEST(FasGainCdf, Basics) {
    const auto m = MarginalModel::rayleigh(1.0);
    const auto g = PortGrid::square(2, 1.0);
    const auto R = jakes(2, 1.0);
    EXPECT_EQ(fas_gain_cdf(0.0, g, m, R, 1e-3, 0).value, 0.0);
    const PortGrid one{1, 1, 0.0, 0.0};
    EXPECT_EQ(fas_gain_cdf(0.8, one, m, CorrelationMatrix::identity(1), 1e-3, 0).value, m.cdf(0.8));
    EXPECT_THROW(fas_gain_cdf(0.8, g, m, CorrelationMatrix::identity(3), 1e-3, 0), DomainError);
}

TEST(FasGainCdf, MonotoneInGain) {
    const auto m = MarginalModel::rayleigh(1.0);
    const auto g = PortGrid::square(3, 2.25);
    const auto R = jakes(3, 2.25);
    double prev = 0.0;
    for (double r = 0.05; r < 8.0; r *= 1.4) {
        const auto e = fas_gain_cdf(r, g, m, R, 1e-4, 5);
        EXPECT_GE(e.value, prev - 4.0 * e.std_error);
        prev = e.value;
    }
}

TEST(FasGainCdf, TwoByTwoAgainstSampledBestPort) {
    const auto m = MarginalModel::rayleigh(1.0);
    const auto node = NodeParams::fas(Role::bob, PortGrid::square(2, 1.0), m, 1.0);
    const auto e = fas_gain_cdf(1.0, node.grid, m, node.corr, 1e-4, 3);
    const std::uint64_t n = 1'000'000;
    const auto gains = sample_effective_gains(node, n, 77);
    const double p = std::count_if(gains.begin(), gains.end(), [](double x) { return x <= 1.0; }) / double(n);
    const double se = std::sqrt(e.value * (1.0 - e.value) / n);
    EXPECT_LE(std::abs(p - e.value), 3.0 * std::hypot(se, e.std_error));
}

TEST(FasGainPdfPaper, SpecialCases) {
    const auto m = MarginalModel::rayleigh(1.3);
    const PortGrid one{1, 1, 0.0, 0.0};
    EXPECT_NEAR(fas_gain_pdf_paper(0.9, one, m, CorrelationMatrix::identity(1)), m.pdf(0.9), 1e-15);
    const PortGrid two{2, 1, 0.5, 0.0};
    EXPECT_NEAR(fas_gain_pdf_paper(0.9, two, m, CorrelationMatrix::identity(2)), m.pdf(0.9) * m.pdf(0.9), 1e-14);
    const auto g = PortGrid::square(3, 1.0);
    const auto R = jakes(3, 1.0);
    for (double r = 0.01; r < 20.0; r *= 1.5) {
        const double v = fas_gain_pdf_paper(r, g, m, R);
        EXPECT_GE(v, 0.0);
        EXPECT_TRUE(std::isfinite(v));
    }
    EXPECT_THROW(fas_gain_pdf_paper(0.0, g, m, R), DomainError);
}

TEST(FasGainCdfDerivative, SinglePort) {
    const auto m = MarginalModel::rayleigh(1.0);
    const PortGrid one{1, 1, 0.0, 0.0};
    const auto d = fas_gain_cdf_derivative(1.0, one, m, CorrelationMatrix::identity(1), 1e-3, 0, 1e-3);
    EXPECT_NEAR(d.value, std::exp(-1.0), 1e-4);
    EXPECT_FALSE(d.negative);
}

TEST(FasGainCdfDerivative, IndependentPair) {
    const auto m = MarginalModel::rayleigh(1.0);
    const PortGrid two{2, 1, 0.5, 0.0};
    const auto R = CorrelationMatrix::identity(2);
    for (double r : {0.3, 1.0, 2.5}) {
        const auto d = fas_gain_cdf_derivative(r, two, m, R, 1e-5, 4, 1e-2);
        const double ref = 2.0 * m.cdf(r) * m.pdf(r);
        EXPECT_LE(std::abs(d.value - ref), 4.0 * d.std_error + 1e-4) << r;
    }
}

TEST(FasGainCdfDerivative, IntegratesToOne) {
    const auto m = MarginalModel::rayleigh(1.0);
    const auto g = PortGrid::square(2, 1.0);
    const auto R = jakes(2, 1.0);
    // Trapezoid on [0, 20] in steps of 0.05.
    const double h = 0.05;
    double s = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double r = i * h;
        const double v = r == 0.0 ? 0.0 : fas_gain_cdf_derivative(r, g, m, R, 1e-4, 8, 1e-3).value;
        s += (i == 0 || i == 400 ? 0.5 : 1.0) * v;
    }
    EXPECT_NEAR(s * h, 1.0, 2e-3);
    EXPECT_THROW(fas_gain_cdf_derivative(0.0, g, m, R, 1e-4, 8, 1e-3), DomainError);
    EXPECT_THROW(fas_gain_cdf_derivative(1.0, g, m, R, 1e-4, 8, 0.0), DomainError);
}

TEST(FasGainCdfDerivative, DenseGridIntegratesToOne) {
    // 16 ports in 1 λ²: the greedy order shifts with the limit, so both ends
    // must share it or the difference quotient picks up isolated spikes.
    const auto m = MarginalModel::rayleigh(1.0);
    const auto g = PortGrid::square(4, 1.0);
    const auto R = jakes(4, 1.0);
    const double h = 0.1;
    double s = 0.0, var = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const auto d = fas_gain_cdf_derivative(i * h, g, m, R, 3e-3, 8 + i, 1e-3, 2e-4);
        EXPECT_FALSE(d.negative) << i;
        const double w = i == 200 ? 0.5 : 1.0;
        s += w * d.value;
        var += w * w * d.std_error * d.std_error;
    }
    EXPECT_LE(h * std::sqrt(var), 5e-4);
    EXPECT_NEAR(s * h, 1.0, 2e-3);
}
