#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace fptlab {

using RealFn = std::function<double(double)>;

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double y) const { return y > lo && y < hi; }
  bool empty() const { return !(lo < hi); }
};

/// Time-homogeneous diffusion dU = nu(U) ds + sigma(U) dW on an open interval.
struct DiffusionModel {
  RealFn nu;
  RealFn sigma;
  RealFn sigma_prime;
  Interval interval;
};

/// Unit-diffusion form dX = mu(X) ds + dW obtained by X = F(U).
///
/// G is the antiderivative of mu with G(0) = 0, and F(y0) = 0. For the presets
/// below F is the identity and y0 = 0.
struct TransformedModel {
  RealFn mu;
  RealFn mu_prime;
  RealFn G;
  RealFn F;
  RealFn F_inv;
  double y0 = 0.0;
  // Set when mu' + mu^2 is constant (Brownian motion, constant drift); path
  // functionals then skip the per-step evaluation.
  std::optional<double> constant_potential;

  /// mu'(y) + mu(y)^2, the integrand of the Girsanov path functional.
  double potential(double y) const {
    if (constant_potential) return *constant_potential;
    const double m = mu(y);
    return mu_prime(y) + m * m;
  }

  static TransformedModel brownian();
  static TransformedModel constant_drift(double c);
  /// mu(y) = -theta * y.
  static TransformedModel ornstein_uhlenbeck(double theta);
  /// mu(y) = -coef * y^3.
  static TransformedModel cubic(double coef);
  /// Closed-form drift; G and mu' supplied by the caller, F = identity.
  static TransformedModel from_drift(RealFn mu, RealFn mu_prime, RealFn G);
};

/// Lamperti transform of `model` with reference point y0.
///
/// F is the adaptive-quadrature integral of 1/sigma from y0, F_inv a bracketed
/// Newton/bisection inverse, mu(F(y)) = nu(y)/sigma(y) - sigma'(y)/2, and G is
/// integrated in the original coordinates (dx = dy/sigma) to avoid nested
/// inversions. Throws ValidationError for y0 outside the interval or a
/// non-positive sigma seen at any quadrature node.
TransformedModel lamperti_transform(const DiffusionModel& model, double y0);

/// Sampled envelope of mu' + mu^2 on a grid.
struct GrowthDiagnostic {
  std::vector<double> grid;
  std::vector<double> values;
  // max over the negative tail of -(mu' + mu^2)(y) / y^2, floored at 0
  double limsup_ratio = 0.0;
  double fpt_threshold = 0.0;      // 4 / t^2
  double gateaux_threshold = 1.0;  // derivative of the non-crossing probability
  double min_value = 0.0;

  bool passes_fpt() const { return limsup_ratio < fpt_threshold; }
  bool passes_gateaux() const { return limsup_ratio < gateaux_threshold; }
};

/// Heuristic check of the lower-growth condition on mu' + mu^2. The negative
/// tail is the part of the grid with y <= lo / 2 (empty when lo >= 0). A pass
/// is evidence only; no grid scan proves a limsup bound.
GrowthDiagnostic check_growth_condition(const TransformedModel& tm, double t, Interval y_range,
                                        int n);

}  // namespace fptlab
