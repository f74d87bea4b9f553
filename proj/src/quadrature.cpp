#include "fas/quadrature.hpp"

#include <cmath>
#include <string>

#include "fas/error.hpp"

namespace fas {

namespace {

constexpr int kMaxNewtonIterations = 200;
constexpr double kRootTolerance = 1e-14;

// L_n(x) and L_{n-1}(x) in one pass. Extended precision keeps the weight sum within a few ulps of one up to order 128.
std::pair<long double, long double> laguerre_pair(int n, long double x) {
    long double p1 = 1.0L;  // L_j
    long double p2 = 0.0L;  // L_{j-1}
    for (int j = 1; j <= n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = ((2.0L * j - 1.0L - x) * p2 - (j - 1.0L) * p3) / j;
    }
    return {p1, p2};
}

}  // namespace

double laguerre_eval(int n, double x) {
    if (n < 0) throw DomainError("laguerre_eval: negative degree " + std::to_string(n));
    return static_cast<double>(laguerre_pair(n, x).first);
}

GaussLaguerreRule gauss_laguerre_rule(int order) {
    if (order < 1 || order > kMaxLaguerreOrder) {
        throw DomainError("gauss_laguerre_rule: order " + std::to_string(order) + " outside [1, " +
                          std::to_string(kMaxLaguerreOrder) + "]");
    }
    const int n = order;
    GaussLaguerreRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    rule.scaled_weights.resize(n);

    long double z = 0.0L;
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            z = 3.0 / (1.0 + 2.4 * n);
        } else if (i == 1) {
            z += 15.0 / (1.0 + 2.5 * n);
        } else {
            const double ai = i - 1;
            z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - rule.nodes[i - 2]);
        }

        bool converged = false;
        for (int it = 0; it < kMaxNewtonIterations; ++it) {
            const auto [ln, lnm1] = laguerre_pair(n, z);
            const long double derivative = n * (ln - lnm1) / z;
            const long double z_prev = z;
            z = z_prev - ln / derivative;
            if (std::abs(z - z_prev) <= kRootTolerance * std::max(1.0L, z)) {
                converged = true;
                break;
            }
        }
        if (!converged || !std::isfinite(z) || z <= 0.0) {
            throw NumericalError("gauss_laguerre_rule: root " + std::to_string(i + 1) + " of L_" +
                                 std::to_string(n) + " did not converge");
        }
        rule.nodes[i] = static_cast<double>(z);

        const long double next = laguerre_pair(n + 1, z).first;
        const long double log_w = std::log(z) - 2.0L * std::log((n + 1.0L) * std::abs(next));
        rule.weights[i] = static_cast<double>(std::exp(log_w));
        rule.scaled_weights[i] = static_cast<double>(std::exp(log_w + z));
    }

    for (int i = 1; i < n; ++i) {
        if (!(rule.nodes[i] > rule.nodes[i - 1])) {
            throw NumericalError("gauss_laguerre_rule: root " + std::to_string(i + 1) + " of L_" +
                                 std::to_string(n) + " collapsed onto its predecessor");
        }
    }
    return rule;
}

double integrate_exp_weighted(const GaussLaguerreRule& rule, const std::function<double(double)>& f) {
    double sum = 0.0;
    for (int i = 0; i < rule.order; ++i) {
        const double v = f(rule.nodes[i]);
        if (!std::isfinite(v)) {
            throw NumericalError("integrate_exp_weighted: integrand not finite at node " + std::to_string(i + 1) +
                                 " (x = " + std::to_string(rule.nodes[i]) + ")");
        }
        sum += rule.weights[i] * v;
    }
    return sum;
}

HalfLineNodes half_line_nodes(const GaussLaguerreRule& rule, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DomainError("half_line_nodes: scale must be positive and finite");
    }
    HalfLineNodes out;
    out.x.resize(rule.order);
    out.weight.resize(rule.order);
    for (int i = 0; i < rule.order; ++i) {
        out.x[i] = scale * rule.nodes[i];
        out.weight[i] = scale * rule.scaled_weights[i];
    }
    return out;
}

double integrate_half_line(const GaussLaguerreRule& rule, const std::function<double(double)>& g, double scale) {
    const auto hl = half_line_nodes(rule, scale);
    double sum = 0.0;
    for (int i = 0; i < rule.order; ++i) {
        const double v = g(hl.x[i]);
        if (!std::isfinite(v)) {
            throw NumericalError("integrate_half_line: integrand not finite at node " + std::to_string(i + 1) +
                                 " (x = " + std::to_string(hl.x[i]) + ")");
        }
        sum += hl.weight[i] * v;
    }
    return sum;
}

}  // namespace fas
