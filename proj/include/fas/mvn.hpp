#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fas/geometry.hpp"

namespace fas {

/// Φ_R(point) estimate. `samples_used` counts integrand evaluations and is 0
/// when the value came from a closed form (dim 1, an infinite limit, or
/// coincident Fréchet bounds). `capped` means the per-shift sample cap was hit
/// before the tolerance was met.
struct MvnEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples_used = 0;
    bool capped = false;
    int rank = 0;  // variables integrated after rank truncation
};

struct MvnOptions {
    double rel_tol = 1e-3;
    double abs_tol = 0.0;                 // also stop once std_error ≤ abs_tol
    std::uint64_t seed = 0;
    int shifts = 8;
    std::size_t initial_points = 64;      // per shift, doubled each round
    std::size_t max_points = 1u << 20;    // per shift
    double rank_tol = 1e-10;              // conditional variance treated as zero
    // Limits used only to choose the variable order (same length as the point).
    // Empty: the point itself. Two integrals with equal order and seed share
    // their random numbers exactly.
    std::vector<double> order_point;
};

/// Randomized separation-of-variables estimate of P(X ≤ point) for X ~ N(0, R)
/// (Genz 1992 with Genz-Bretz variable reordering).
///
/// Uses R.regularized(). Variables are ordered greedily by smallest conditional
/// probability; once every remaining conditional variance is below rank_tol the
/// rest are treated as deterministic functions of the earlier ones, which is
/// what keeps 400+ port Jakes grids tractable. Points come from a Richtmyer
/// lattice with random shifts, the baker transform and antithetic pairs.
/// Stops when std_error ≤ max(abs_tol, rel_tol·max(value, 1e-3)).
///
/// +∞ limits are dropped, any -∞ limit gives exactly 0. Throws DomainError on a
/// length mismatch, NaN limits, or rel_tol outside [1e-6, 1e-2].
/// Shifts run in parallel with OpenMP; the result does not depend on the thread count.
MvnEstimate mvn_cdf(const CorrelationMatrix& R, std::span<const double> point, const MvnOptions& opt);
MvnEstimate mvn_cdf(const CorrelationMatrix& R, std::span<const double> point, double rel_tol, std::uint64_t seed);

/// Single-threaded reference. Bitwise identical to mvn_cdf.
MvnEstimate mvn_cdf_serial(const CorrelationMatrix& R, std::span<const double> point, const MvnOptions& opt);

/// The estimator as a resumable object, for callers that spread an error
/// budget over many integrals. Construction runs the first lattice round.
/// `R` must outlive the integrator.
class MvnIntegrator {
public:
    MvnIntegrator(const CorrelationMatrix& R, std::span<const double> point, const MvnOptions& opt,
                  bool parallel = true);
    ~MvnIntegrator();
    MvnIntegrator(MvnIntegrator&&) noexcept;
    MvnIntegrator& operator=(MvnIntegrator&&) noexcept;

    const MvnEstimate& estimate() const noexcept { return est_; }

    /// Per-shift sums over the lattice points used so far (empty for closed forms).
    const std::vector<double>& shift_sums() const noexcept { return sums_; }
    std::size_t points_per_shift() const noexcept { return done_; }

    /// False for closed-form results and once the per-shift cap is reached.
    bool can_refine() const noexcept;

    /// Double the lattice. Sets `capped` when the cap is reached.
    void refine(bool parallel = true);

    /// True once std_error ≤ max(abs_tol, rel_tol·max(value, 1e-3)).
    bool converged() const noexcept;

    /// Free the factorization; refine() rebuilds it.
    void release() noexcept;

    struct Plan;  // opaque factorization

private:
    void run_round(std::size_t target, bool parallel);
    void ensure_plan();

    const CorrelationMatrix* R_ = nullptr;
    std::vector<int> active_;
    std::vector<double> limits_;
    std::vector<double> order_;
    MvnOptions opt_;
    bool exact_ = false;
    std::unique_ptr<Plan> plan_;
    std::vector<double> sums_;
    std::size_t done_ = 0;
    MvnEstimate est_;
};

}  // namespace fas
