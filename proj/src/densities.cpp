#include "fptlab/densities.hpp"

#include <cmath>
#include <numbers>

#include "fptlab/boundary.hpp"
#include "fptlab/errors.hpp"
#include "fptlab/normal.hpp"

namespace fptlab {
namespace {

double gaussian(double z, double mean, double var) {
  const double d = z - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

// exp(x^2/2) Phi(x) without overflow for very negative x.
double scaled_lower_tail(double x) {
  if (x > -30.0) return std::exp(0.5 * x * x) * norm_cdf(x);
  const double r = 1.0 / (x * x);
  return kInvSqrt2Pi / -x * (1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r)));
}

// 1 - exp(-x) for x >= 0
double one_minus_exp(double x) { return -std::expm1(-x); }

}  // namespace

double bm_transition_density(double t, double x, double z) {
  require(t > 0.0, "bm_transition_density: t must be positive");
  return gaussian(z, x, t);
}

double linear_noncross_prob(double x, double g0, double gt, double t, double z) {
  require(t > 0.0, "linear_noncross_prob: t must be positive");
  require(g0 > x, "linear_noncross_prob: start must lie below the boundary");
  require(z <= gt, "linear_noncross_prob: endpoint above the boundary");
  return one_minus_exp(2.0 / t * (g0 - x) * (gt - z));
}

double linear_boundary_survival(double a, double b, double horizon) {
  require(a > 0.0, "linear_boundary_survival: a must be positive");
  require(horizon > 0.0, "linear_boundary_survival: horizon must be positive");
  const double sh = std::sqrt(horizon);
  return norm_cdf((a + b * horizon) / sh) - std::exp(-2.0 * a * b) * norm_cdf((b * horizon - a) / sh);
}

LinearBoundaryForms linear_boundary_closed_forms(double a, double b, double t, double horizon) {
  require(a > 0.0, "linear_boundary_closed_forms: a must be positive");
  require(t > 0.0, "linear_boundary_closed_forms: t must be positive");
  const double level = a + b * t;
  const double density = a / (std::sqrt(2.0 * std::numbers::pi) * std::pow(t, 1.5)) *
                         std::exp(-level * level / (2.0 * t));
  return {linear_boundary_survival(a, b, horizon), density};
}

double kendall_fpt_density(double y, double x, double t, const TransitionDensity& density) {
  require(x < y, "kendall_fpt_density: start must lie below the level");
  require(t > 0.0, "kendall_fpt_density: t must be positive");
  return (y - x) / t * density(t, x, y);
}

double daniels_fpt_density(double delta, double k1, double k2, double t) {
  require(t > 0.0, "daniels_fpt_density: t must be positive");
  const double g = daniels_value(delta, k1, k2, t);
  const double e1 = std::exp(-(g - 2.0 * delta) * (g - 2.0 * delta) / (2.0 * t));
  const double e2 = std::exp(-(g - 4.0 * delta) * (g - 4.0 * delta) / (2.0 * t));
  return kInvSqrt2Pi / std::pow(t, 1.5) * (delta * k1 * e1 + 2.0 * delta * k2 * e2);
}

double daniels_f(double delta, double k1, double k2, double t, double x) {
  require(t > 0.0, "daniels_f: t must be positive");
  const double g = daniels_value(delta, k1, k2, t);
  const double e1 = std::exp(-(2.0 * delta - x) * (2.0 * delta + x - 2.0 * g) / (2.0 * t));
  const double e2 = std::exp(-(4.0 * delta - x) * (4.0 * delta + x - 2.0 * g) / (2.0 * t));
  return 2.0 / t * (delta * k1 * e1 + 2.0 * delta * k2 * e2);
}

double meander_endpoint_density(double y) { return y > 0.0 ? y * std::exp(-0.5 * y * y) : 0.0; }

double meander_laplace(double lambda) {
  return 1.0 + std::sqrt(2.0 * std::numbers::pi) * lambda * scaled_lower_tail(lambda);
}

double meander_transition_density(double a, double s, double y, double t, double z) {
  require(a > 0.0, "meander_transition_density: a must be positive");
  require(z > 0.0, "meander_transition_density: z must be positive");
  require(t < 1.0, "meander_transition_density: t must be below 1");
  const double pin = one_minus_exp(2.0 * z * a / (1.0 - t));
  if (s == 0.0 && y == 0.0) {
    require(t > 0.0, "meander_transition_density: t must be positive");
    // Bridge 0 -> a on [0, 1] at time t: N(a t, t (1 - t)).
    return z / (t * a) * pin * gaussian(z, a * t, t * (1.0 - t));
  }
  require(s > 0.0 && s < t && y > 0.0, "meander_transition_density: need 0 < s < t < 1 and y > 0");
  const double mean = y + (a - y) * (t - s) / (1.0 - s);
  const double var = (t - s) * (1.0 - t) / (1.0 - s);
  const double num = one_minus_exp(2.0 * z * y / (t - s)) * pin;
  const double den = one_minus_exp(2.0 * a * y / (1.0 - s));
  return num / den * gaussian(z, mean, var);
}

}  // namespace fptlab
