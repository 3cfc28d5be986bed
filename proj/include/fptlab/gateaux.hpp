#pragma once

#include <cstdint>

#include "fptlab/boundary.hpp"
#include "fptlab/diffusion.hpp"
#include "fptlab/fpt.hpp"
#include "fptlab/paths.hpp"

namespace fptlab {

/// Directional derivative of P(g) = P_x(X_s < g(s), s <= 1) along h.
struct GateauxResult {
  double value = 0.0;
  double mc_stderr = 0.0;
  double quadrature_error = 0.0;   // closed-form FPT input only
  double t_min_truncation = 0.0;   // time-to-go below which FPT mass is dropped
  double truncation_bound = 0.0;   // bound on the dropped part of the integral
  long n_meander = 0;
  std::uint64_t seed = 0;
  long excluded = 0;               // meander samples with non-finite exponent
  long fpt_nodes = 0;              // quadrature nodes or distinct sample times used

  /// Total error budget used for comparisons against a reference value.
  double tolerance(double sigmas = 3.0) const {
    return sigmas * mc_stderr + quadrature_error + truncation_bound;
  }
};

struct GateauxOptions {
  // Kronrod panels in u = sqrt(1 - tau) for closed-form FPT input.
  int panels = 4;
  double max_excluded_fraction = 1e-3;
};

/// Evaluates
///   sqrt(2/pi) int_0^1 h(1-t)/sqrt(t) P_x(1 - tau in dt)
///     E exp{G(-sqrt(t) W1 + g(1)) - G(g(1-t)) + sqrt(t) W1 g'(1) + Nbar_t(t)}
/// with W the Brownian meander. One set of `n_meander` meander paths on
/// `meander_grid` (uniform on [0, 1]) serves every t through
/// W^{(t)}_s = sqrt(t) W_{s/t}. Path integrals in Nbar use the trapezoid rule.
///
/// `fpt` is either a closed-form density on [0, 1] (integrated with Kronrod
/// panels after t = u^2) or crossing-time samples (one term per sample).
/// Time-to-go values below t_min are dropped and bounded in truncation_bound.
GateauxResult gateaux_derivative(const TransformedModel& tm, const Boundary& g, const Boundary& h,
                                 const FptDistribution& fpt, long n_meander, const PathGrid& meander_grid,
                                 double t_min, std::uint64_t seed, const GateauxOptions& opts = {});

/// Closed form of the derivative for Brownian motion, g = a1 + b1 t and
/// h = a2 + b2 t:
///   a2 sqrt(2/pi) e^{-(a1+b1)^2/2} + 2 (a2 b1 + a1 b2) e^{-2 a1 b1} Phi(b1 - a1).
double bm_linear_gateaux_closed_lhs(double a1, double a2, double b1, double b2);

/// The same derivative as a one-dimensional integral over the first passage
/// time, using the meander Laplace transform; adaptive quadrature to `tol`.
double bm_linear_gateaux_quadrature_rhs(double a1, double a2, double b1, double b2, double tol = 1e-4);

/// Crossing-time law of Brownian motion from 0 against a1 + b1 t on [0, T].
/// n = 0 returns the closed form; otherwise n inverse-CDF draws (censored when
/// the draw exceeds the crossing probability by T).
FptDistribution fpt_distribution_bm_linear(double a1, double b1, long n = 0, std::uint64_t seed = 0,
                                           double T = 1.0);

}  // namespace fptlab
