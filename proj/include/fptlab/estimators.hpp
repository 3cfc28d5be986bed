#pragma once

#include <cstdint>
#include <vector>

#include "fptlab/boundary.hpp"
#include "fptlab/diffusion.hpp"
#include "fptlab/fpt.hpp"
#include "fptlab/paths.hpp"

namespace fptlab {

/// Monte-Carlo value with its standard error (sample std / sqrt(n)).
struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n = 0;
  std::uint64_t seed = 0;
  double grid_step = 0.0;
  long excluded = 0;  // samples dropped for non-finite weights
};

struct CrossingOptions {
  // Multiply each surviving path by the Brownian-bridge probability of not
  // crossing between consecutive grid points (linear boundary interpolation).
  bool bridge_correction = false;
  // Fail when more than this fraction of samples has to be excluded.
  double max_excluded_fraction = 1e-3;
  // First stream id; lets callers carve disjoint substreams from one seed.
  std::uint64_t stream_offset = 0;
};

/// P_x(sup_{s<=t} (X_s - g(s)) < 0 | X_t = z) for dX = mu(X) ds + dW.
///
/// Brownian bridges from x to z are reweighted by exp(N(t)),
/// N(t) = -1/2 int_0^t (mu' + mu^2)(B_s) ds (trapezoid on the grid), and the
/// estimate is the ratio sum(w 1_A) / sum(w). The Girsanov prefactor
/// q e^{G(z) - G(x)} / p cancels in the ratio. The grid must end at t.
MCEstimate estimate_cond_noncross_prob(const TransformedModel& tm, const Boundary& boundary, double t,
                                       double x, double z, const PathGrid& grid, long n,
                                       std::uint64_t seed, const CrossingOptions& opts = {});

/// Regression estimate of f(t, x): slope of the conditional non-crossing
/// probability against the distance g(t) - z.
struct FEstimate {
  struct Point {
    double offset;
    MCEstimate estimate;
  };
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;  // 0 when through_origin
  double window = 0.0;
  bool through_origin = true;
  std::vector<Point> points;
};

struct RegressionOptions {
  bool through_origin = true;
  CrossingOptions crossing;
};

/// Default offsets: ten evenly spaced points window/10, ..., window.
std::vector<double> default_offsets(double window, int count = 10);

/// Runs estimate_cond_noncross_prob at z = g(t) - offset for every offset and
/// fits the slope by weighted least squares (weights 1/stderr^2, with the
/// stderr floored at 1/n so exact 0/1 frequencies stay finite). Offsets use
/// disjoint random substreams of `seed`.
FEstimate estimate_f_regression(const TransformedModel& tm, const Boundary& boundary, double t,
                                double x, double window, std::vector<double> offsets, long n_per_offset,
                                const PathGrid& grid, std::uint64_t seed,
                                const RegressionOptions& opts = {});

struct FptSimOptions {
  bool bridge_correction = false;
  double explosion_guard = 1e6;  // |X| beyond this flags the path
  std::uint64_t stream_offset = 0;
};

/// Euler-Maruyama paths of dX = mu(X) ds + dW from x; records the first grid
/// time with X > g. Paths that never cross are counted as censored.
FptDistribution sample_fpt(const TransformedModel& tm, const Boundary& boundary, double x,
                           const PathGrid& grid, long n, std::uint64_t seed,
                           const FptSimOptions& opts = {});

}  // namespace fptlab
