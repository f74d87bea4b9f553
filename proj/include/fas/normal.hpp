#pragma once

namespace fas {

/// Φ(x), accurate in both tails (erfc based).
double std_normal_cdf(double x);

/// φ(x).
double std_normal_pdf(double x);

/// Φ^{-1}(u) for u in (0, 1): Wichura's AS241 rational approximation followed by
/// one Newton step against std_normal_cdf. Throws DomainError outside (0, 1).
double std_normal_quantile(double u);

/// AS241 only, no polish and no argument checking. Returns ±inf at 0 and 1.
/// Intended for inner loops that already guard their arguments.
double std_normal_quantile_fast(double u) noexcept;

/// E[Z | Z < x] for standard normal Z.
double truncated_normal_mean_below(double x);

}  // namespace fas
