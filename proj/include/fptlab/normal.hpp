#pragma once

#include <cmath>
#include <numbers>

namespace fptlab {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;  // 1/sqrt(2 pi)

/// Standard normal density.
inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF. Uses erfc on both sides so the lower tail keeps full
/// relative accuracy.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Upper tail 1 - Phi(x), evaluated directly (no cancellation for large x).
inline double norm_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace fptlab
