#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fas/copula.hpp"
#include "fas/scenario.hpp"

namespace fas {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample std / sqrt(trials)
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

struct McResult {
    McEstimate asc;
    McEstimate sop;
    McEstimate see;
};

/// How FAS port gains are drawn.
///  copula:  z = L n, g_k = F^{-1}(Φ(z_k)). Gains follow the Gaussian copula
///           with the Jakes matrix as its parameter, which is the model the
///           analytical metrics describe.
///  complex: h = L (x + i y)/√2, g_k = |h_k|²/η. Physical Rayleigh ports with
///           Jakes correlation on the complex entries; the gain dependence is
///           weaker than the copula's.
enum class McChannel { copula, complex };

const char* to_string(McChannel c);
McChannel parse_mc_channel(const std::string& s);

struct McOptions {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 0;
    McChannel channel = McChannel::copula;
    std::uint64_t block = 16384;  // fixed partition; results do not depend on threads
};

/// Cholesky factor with rows rescaled to unit norm, so L Lᵀ has unit diagonal
/// even when the correlation needed jitter.
Eigen::MatrixXd unit_row_factor(const CorrelationMatrix& R);

/// Complex-level draw: per-port gains |h_k|²/η with unit-variance entries.
/// `factor` should come from unit_row_factor.
void sample_gains(const Eigen::MatrixXd& factor, const MarginalModel& marginal, std::mt19937_64& rng,
                  std::span<double> gains);

/// Gaussian-copula draw of the per-port gains.
void sample_gains_copula(const Eigen::MatrixXd& factor, const MarginalModel& marginal, std::mt19937_64& rng,
                         std::span<double> gains);

/// -log(1 - Φ(z)) without cancellation for large z.
double neg_log_normal_sf(double z);

/// Draws trials/block blocks; each block seeds its own Bob and Eve engines from
/// (seed, stream, block). C_s = max(log2((1+γ_B)/(1+γ_E)), 0), outage when C_s ≤ R_s.
/// If `cs_samples` is non-null it receives every C_s in trial order.
/// Throws DomainError if trials < 10^4.
McResult simulate_metrics(const SecrecyScenario& s, const McOptions& opt, std::vector<double>* cs_samples = nullptr);

/// Same blocks evaluated on one thread. Bitwise identical to simulate_metrics.
McResult simulate_metrics_serial(const SecrecyScenario& s, const McOptions& opt,
                                 std::vector<double>* cs_samples = nullptr);

/// Draw `trials` effective gains of one node (max for FAS/SC, sum for MRC).
/// Used for CDF checks.
std::vector<double> sample_effective_gains(const NodeParams& node, std::uint64_t trials, std::uint64_t seed,
                                           McChannel channel = McChannel::copula);

}  // namespace fas
