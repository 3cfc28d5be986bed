#pragma once

#include <functional>

namespace fptlab {

/// Transition density p(t, x, z) of a one-dimensional process.
using TransitionDensity = std::function<double(double t, double x, double z)>;

/// Gaussian kernel q(t, x, z) = (2 pi t)^{-1/2} exp(-(z - x)^2 / 2t).
double bm_transition_density(double t, double x, double z);

/// Probability that a Brownian bridge from x (time 0) to z (time t) stays below
/// the line through (0, g0) and (t, gt): 1 - exp(-2 (g0 - x)(gt - z) / t).
double linear_noncross_prob(double x, double g0, double gt, double t, double z);

struct LinearBoundaryForms {
  double survival;      // P(W_s < a + b s for all s <= horizon)
  double fpt_density;   // density of the first passage time at t
};

/// Brownian motion from 0 against a + b s. `survival` is evaluated on
/// [0, horizon]:  Phi((a + b h)/sqrt h) - exp(-2ab) Phi((b h - a)/sqrt h).
LinearBoundaryForms linear_boundary_closed_forms(double a, double b, double t, double horizon = 1.0);

/// Survival on [0, horizon] alone.
double linear_boundary_survival(double a, double b, double horizon);

/// Kendall's identity ((y - x)/t) p(t, x, y) for a constant level y > x.
double kendall_fpt_density(double y, double x, double t,
                           const TransitionDensity& density = bm_transition_density);

double daniels_fpt_density(double delta, double k1, double k2, double t);

/// Asymptotic coefficient f(t, x) for the Daniels boundary, i.e. the slope of
/// the bridge non-crossing probability as z -> g(t). Both exponents carry the
/// 1/(2t) factor so that f/2 * q(t, x, g(t)) reproduces the density for all t.
double daniels_f(double delta, double k1, double k2, double t, double x);

/// Rayleigh density y exp(-y^2 / 2) of the meander endpoint (0 for y <= 0).
double meander_endpoint_density(double y);

/// E exp(lambda W_1^+) = 1 + sqrt(2 pi) lambda exp(lambda^2/2) Phi(lambda).
double meander_laplace(double lambda);

/// Transition density of the Brownian meander on [0, 1] pinned at a > 0 at
/// time 1, from (s, y) to (t, z). s = y = 0 selects the entrance law.
double meander_transition_density(double a, double s, double y, double t, double z);

}  // namespace fptlab
