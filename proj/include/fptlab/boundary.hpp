#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fptlab/diffusion.hpp"

namespace fptlab {

/// Upper boundary g on [0, T] with its first two derivatives and one-sided
/// Lipschitz constants: -K_minus * h <= g(t + h) - g(t) <= K_plus * h.
struct Boundary {
  RealFn g;
  RealFn g_prime;
  RealFn g_second;
  double T = 1.0;
  double K_plus = 0.0;
  double K_minus = 0.0;

  double operator()(double t) const { return g(t); }

  static Boundary constant(double level, double T = 1.0);
  /// a + b t
  static Boundary linear(double a, double b, double T = 1.0);
  /// Wraps user functions. Missing derivatives fall back to 5-point central
  /// differences with step 1e-5 * max(1, |t|); K+- are sampled from g'.
  static Boundary from_functions(RealFn g, double T, std::optional<RealFn> g_prime = std::nullopt,
                                 std::optional<RealFn> g_second = std::nullopt);
  /// Piecewise polynomial: on [knots[i], knots[i+1]) the value is
  /// sum_k coeffs[i][k] * (t - knots[i])^k. Last piece extends to +inf,
  /// first piece to -inf.
  static Boundary piecewise_polynomial(std::vector<double> knots,
                                       std::vector<std::vector<double>> coeffs);

  Boundary operator+(const Boundary& other) const;
  Boundary scaled(double alpha) const;
  /// max(h, 0) and max(-h, 0) as boundaries (derivatives taken piecewise).
  Boundary positive_part() const;
  Boundary negative_part() const;
};

/// Samples g' on a grid of [0, T] and returns (K_plus, K_minus).
std::pair<double, double> lipschitz_constants(const RealFn& g_prime, double T, int n = 2001);

/// Daniels boundary
///   g(s) = delta - s/(2 delta) * log(k1/2 + sqrt(k1^2/4 + k2 exp(-4 delta^2 / s))),
/// with closed-form derivatives; s < 1e-8 uses the s -> 0 limit branch.
Boundary daniels_boundary(double delta, double k1, double k2, double T = 1.0);

/// g_D(s) alone, without building a Boundary.
double daniels_value(double delta, double k1, double k2, double s);

}  // namespace fptlab
