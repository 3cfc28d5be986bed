#pragma once

#include <functional>

namespace fptlab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // Kronrod-Gauss difference summed over the final partition
  int evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 2000;
  // Throw NumericalError when the tolerance is not met within the budget.
  bool throw_on_failure = true;
};

/// Adaptive Gauss-Kronrod (7/15) integration on [a, b] with global bisection of
/// the interval that carries the largest error estimate.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Integral over [a, inf) via the substitution x = a + u / (1 - u).
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       const QuadratureOptions& opts = {});

/// Integral over (-inf, inf), split at `center`.
QuadratureResult integrate_real_line(const std::function<double(double)>& f, double center,
                                     const QuadratureOptions& opts = {});

/// One fixed 15-point Kronrod panel and its embedded 7-point Gauss estimate.
/// Exposed for callers that evaluate the nodes themselves (batched Monte Carlo).
struct KronrodPanel {
  static constexpr int kNodes = 15;
  double nodes[kNodes];
  double kronrod_weights[kNodes];
  double gauss_weights[kNodes];  // zero on the Kronrod-only nodes
};

KronrodPanel kronrod_panel(double a, double b);

}  // namespace fptlab
