#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fas {

/// n-point Gauss-Laguerre rule for integrals of the form ∫_0^∞ e^{-x} f(x) dx.
///
/// `nodes` are the roots of L_n in increasing order. `weights` follow the
/// classical formula w_i = x_i / ((n+1)^2 L_{n+1}(x_i)^2), which sums to one.
/// `scaled_weights` hold w_i e^{x_i}, computed in log space so they stay finite
/// for the largest nodes of high-order rules; they turn the rule into one for
/// plain ∫_0^∞ g(x) dx.
struct GaussLaguerreRule {
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> scaled_weights;
};

inline constexpr int kMaxLaguerreOrder = 128;

/// L_n(x) by the three-term recurrence.
double laguerre_eval(int n, double x);

/// Newton iteration on L_n from the usual asymptotic starting guesses.
/// Throws NumericalError naming the root index if a root fails to converge
/// within 200 iterations, DomainError if order is outside [1, 128].
GaussLaguerreRule gauss_laguerre_rule(int order);

/// Σ w_i f(x_i). Throws NumericalError identifying the node if f is not finite there.
double integrate_exp_weighted(const GaussLaguerreRule& rule, const std::function<double(double)>& f);

/// ∫_0^∞ g(x) dx ≈ scale · Σ w_i e^{x_i} g(scale · x_i).
///
/// scale = 1 is the rule exactly as written for exponential-weight integrals;
/// a larger scale stretches the node span to cover slowly decaying integrands.
double integrate_half_line(const GaussLaguerreRule& rule, const std::function<double(double)>& g,
                           double scale = 1.0);

/// Abscissae scale·x_i and effective weights scale·w_i·e^{x_i} for callers that
/// evaluate the integrand themselves (e.g. in parallel).
struct HalfLineNodes {
    std::vector<double> x;
    std::vector<double> weight;
};
HalfLineNodes half_line_nodes(const GaussLaguerreRule& rule, double scale);

}  // namespace fas
