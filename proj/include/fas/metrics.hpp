#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fas/mvn.hpp"
#include "fas/scenario.hpp"

namespace fas {

enum class Exec { parallel, serial };

/// CDF of the combined gain of one node (before the SNR scaling).
/// FAS: Gaussian copula at the repeated marginal. MRC: Erlang. SC: F^N.
MvnEstimate effective_cdf(const NodeParams& node, double r, double rel_tol, std::uint64_t seed);

/// Density as written for the paper form of the outage integral: the diagonal
/// joint density for FAS, the exact density for MRC and SC.
double effective_pdf_paper(const NodeParams& node, double r);

/// Regularized lower incomplete gamma P(n, x) for integer n ≥ 1.
double erlang_cdf(int n, double x);

struct MetricResult {
    double value = 0.0;
    double estimator_error = 0.0;  // root-sum-square of propagated MVN errors
    double raw_value = 0.0;        // before clamping (SOP paper form only)
    int nodes = 0;                 // integrand evaluations
    bool clamped = false;          // raw value outside [-1e-9, 1 + 1e-9]
    bool mvn_capped = false;       // at least one MVN estimate hit its sample cap
};

/// (1/ln 2) ∫_0^∞ (1 - F_B(x/γ̄_B)) F_E(x/γ̄_E) / (1 + x) dx on the scaled
/// Gauss-Laguerre rule of the scenario. Each node draws its own MVN seed.
MetricResult asc(const SecrecyScenario& s, Exec exec = Exec::parallel);

/// Same integral with Bob's factor dropped.
MetricResult asc_asymptotic(const SecrecyScenario& s, Exec exec = Exec::parallel);

/// Density form: ∫ F_B((R_o x + R_t)/γ̄_B) · γ̄_E^{-J} f_E(x/γ̄_E) dx with
/// R_o = 2^{R_s}, R_t = R_o - 1, J = K_E for FAS and 1 otherwise, rule scaled
/// by γ̄_E/η_E. The value is clamped to [0, 1]; raw_value keeps the integral.
MetricResult sop(const SecrecyScenario& s, Exec exec = Exec::parallel);

/// Stieltjes sum of F_B((R_o x + R_t)/γ̄_B) against dF_E(x/γ̄_E) on a
/// geometric grid with `grid_points` cells, plus the mass outside the grid.
/// CDF values only; common random numbers along the grid.
MetricResult sop_oracle(const SecrecyScenario& s, int grid_points = 1000, Exec exec = Exec::parallel);

/// asc / P_tot. Throws DomainError if P_tot is not positive.
MetricResult see(const SecrecyScenario& s, Exec exec = Exec::parallel);
MetricResult see_from_asc(const SecrecyScenario& s, const MetricResult& asc_result);

}  // namespace fas
