#pragma once

#include <cstdint>
#include <span>

#include "fas/geometry.hpp"
#include "fas/mvn.hpp"

namespace fas {

enum class MarginalKind { rayleigh_exponential };

/// One-dimensional fading-gain law. Only the exponential gain of a Rayleigh
/// amplitude ships; metric code goes through cdf/pdf/quantile only.
struct MarginalModel {
    MarginalKind kind = MarginalKind::rayleigh_exponential;
    double eta = 1.0;

    double cdf(double r) const;
    double pdf(double r) const;
    double quantile(double p) const;  // p in [0, 1)
    double mean() const;

    static MarginalModel rayleigh(double eta);
};

/// 1 - e^{-eta r}. r < 0 gives 0.
double rayleigh_gain_cdf(double r, double eta);
double rayleigh_gain_pdf(double r, double eta);

/// Marginal values are clamped to [kCopulaClamp, 1 - kCopulaClamp] before the
/// normal quantile is taken.
inline constexpr double kCopulaClamp = 1e-15;

/// Gaussian copula C(u; R). Any u_q = 0 gives 0; coordinates equal to 1 are
/// marginalized out (the remaining block of R is re-factored). A single
/// remaining coordinate returns u exactly. Throws DomainError if u leaves [0, 1]
/// or its length differs from R.dim().
MvnEstimate gaussian_copula_cdf(std::span<const double> u, const CorrelationMatrix& R, double rel_tol,
                                std::uint64_t seed);

/// log c(u; R) = -1/2 φᵀ(R⁻¹ - I)φ - 1/2 log det R via the stored Cholesky factor.
/// u must lie strictly inside (0, 1).
double gaussian_copula_log_density(std::span<const double> u, const CorrelationMatrix& R);
double gaussian_copula_density(std::span<const double> u, const CorrelationMatrix& R);

/// P(max_k g_k ≤ r) = C(F(r), ..., F(r); R) for the best port of `grid`.
MvnEstimate fas_gain_cdf(double r, const PortGrid& grid, const MarginalModel& marginal, const CorrelationMatrix& R,
                         double rel_tol, std::uint64_t seed);

/// f(r)^K · c(F(r), ..., F(r); R): the joint density on the diagonal. This is
/// not the density of the maximum for K ≥ 2 with dependence.
double fas_gain_pdf_paper(double r, const PortGrid& grid, const MarginalModel& marginal, const CorrelationMatrix& R);
double fas_gain_log_pdf_paper(double r, const PortGrid& grid, const MarginalModel& marginal,
                              const CorrelationMatrix& R);

struct DerivativeEstimate {
    double value = 0.0;       // clamped at 0
    double raw = 0.0;         // unclamped difference quotient
    double std_error = 0.0;
    bool negative = false;    // raw < -4 std_error
};

/// Central difference of fas_gain_cdf with common random numbers at both
/// ends (one-sided from 0 when r < step). Reference density of the best-port gain.
/// Both ends share variable order and lattice; refinement stops once the
/// paired standard error is ≤ max(abs_tol, rel_tol·max(value, 1e-3)).
DerivativeEstimate fas_gain_cdf_derivative(double r, const PortGrid& grid, const MarginalModel& marginal,
                                           const CorrelationMatrix& R, double rel_tol, std::uint64_t seed,
                                           double step, double abs_tol = 0.0);

}  // namespace fas
