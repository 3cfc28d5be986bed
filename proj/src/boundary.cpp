#include "fptlab/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "fptlab/errors.hpp"

namespace fptlab {
namespace {

double fd_step(double t) { return 1e-5 * std::max(1.0, std::abs(t)); }

RealFn central_first(RealFn g) {
  return [g = std::move(g)](double t) {
    const double h = fd_step(t);
    return (-g(t + 2 * h) + 8 * g(t + h) - 8 * g(t - h) + g(t - 2 * h)) / (12 * h);
  };
}

RealFn central_second(RealFn g) {
  return [g = std::move(g)](double t) {
    // Wider step for the second difference: rounding error scales as eps/h^2.
    const double h = 100.0 * fd_step(t);
    return (-g(t + 2 * h) + 16 * g(t + h) - 30 * g(t) + 16 * g(t - h) - g(t - 2 * h)) / (12 * h * h);
  };
}

}  // namespace

std::pair<double, double> lipschitz_constants(const RealFn& g_prime, double T, int n) {
  double kp = 0.0, km = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = g_prime(T * i / (n - 1));
    kp = std::max(kp, d);
    km = std::max(km, -d);
  }
  return {kp, km};
}

Boundary Boundary::constant(double level, double T) { return linear(level, 0.0, T); }

Boundary Boundary::linear(double a, double b, double T) {
  require(T > 0.0, "Boundary: horizon must be positive");
  Boundary bd;
  bd.g = [a, b](double t) { return a + b * t; };
  bd.g_prime = [b](double) { return b; };
  bd.g_second = [](double) { return 0.0; };
  bd.T = T;
  bd.K_plus = std::max(b, 0.0);
  bd.K_minus = std::max(-b, 0.0);
  return bd;
}

Boundary Boundary::from_functions(RealFn g, double T, std::optional<RealFn> g_prime,
                                  std::optional<RealFn> g_second) {
  require(T > 0.0, "Boundary: horizon must be positive");
  require(static_cast<bool>(g), "Boundary: g unset");
  Boundary bd;
  bd.g = g;
  bd.g_prime = g_prime ? *g_prime : central_first(g);
  bd.g_second = g_second ? *g_second : (g_prime ? central_first(*g_prime) : central_second(g));
  bd.T = T;
  std::tie(bd.K_plus, bd.K_minus) = lipschitz_constants(bd.g_prime, T);
  return bd;
}

Boundary Boundary::piecewise_polynomial(std::vector<double> knots,
                                        std::vector<std::vector<double>> coeffs) {
  require(!knots.empty() && knots.size() == coeffs.size(),
          "piecewise_polynomial: one coefficient row per knot required");
  require(std::is_sorted(knots.begin(), knots.end()), "piecewise_polynomial: knots must be sorted");
  for (const auto& row : coeffs) require(!row.empty(), "piecewise_polynomial: empty coefficient row");
  auto data = std::make_shared<const std::pair<std::vector<double>, std::vector<std::vector<double>>>>(
      std::move(knots), std::move(coeffs));

  auto eval = [data](double t, int order) {
    const auto& [ks, cs] = *data;
    auto it = std::upper_bound(ks.begin(), ks.end(), t);
    const size_t i = it == ks.begin() ? 0 : static_cast<size_t>(it - ks.begin() - 1);
    const double u = t - ks[i];
    const auto& c = cs[i];
    // Horner on the order-th derivative of the polynomial.
    double acc = 0.0;
    for (size_t k = c.size(); k-- > static_cast<size_t>(order);) {
      double factor = 1.0;
      for (int j = 0; j < order; ++j) factor *= static_cast<double>(k - j);
      acc = acc * u + factor * c[k];
    }
    return acc;
  };
  Boundary bd;
  bd.g = [eval](double t) { return eval(t, 0); };
  bd.g_prime = [eval](double t) { return eval(t, 1); };
  bd.g_second = [eval](double t) { return eval(t, 2); };
  bd.T = std::max(1.0, data->first.back());
  std::tie(bd.K_plus, bd.K_minus) = lipschitz_constants(bd.g_prime, bd.T);
  return bd;
}

Boundary Boundary::operator+(const Boundary& o) const {
  Boundary bd;
  bd.g = [a = g, b = o.g](double t) { return a(t) + b(t); };
  bd.g_prime = [a = g_prime, b = o.g_prime](double t) { return a(t) + b(t); };
  bd.g_second = [a = g_second, b = o.g_second](double t) { return a(t) + b(t); };
  bd.T = std::min(T, o.T);
  bd.K_plus = K_plus + o.K_plus;
  bd.K_minus = K_minus + o.K_minus;
  return bd;
}

Boundary Boundary::scaled(double alpha) const {
  Boundary bd;
  bd.g = [f = g, alpha](double t) { return alpha * f(t); };
  bd.g_prime = [f = g_prime, alpha](double t) { return alpha * f(t); };
  bd.g_second = [f = g_second, alpha](double t) { return alpha * f(t); };
  bd.T = T;
  bd.K_plus = alpha >= 0 ? alpha * K_plus : -alpha * K_minus;
  bd.K_minus = alpha >= 0 ? alpha * K_minus : -alpha * K_plus;
  return bd;
}

Boundary Boundary::positive_part() const {
  Boundary bd;
  bd.g = [f = g](double t) { return std::max(f(t), 0.0); };
  bd.g_prime = [f = g, d = g_prime](double t) { return f(t) > 0.0 ? d(t) : 0.0; };
  bd.g_second = [f = g, d = g_second](double t) { return f(t) > 0.0 ? d(t) : 0.0; };
  bd.T = T;
  bd.K_plus = K_plus;
  bd.K_minus = K_minus;
  return bd;
}

Boundary Boundary::negative_part() const { return scaled(-1.0).positive_part(); }

namespace {

void check_daniels(double delta, double k1, double k2) {
  require(delta != 0.0, "daniels_boundary: delta must be nonzero");
  require(k1 > 0.0, "daniels_boundary: k1 must be positive");
  require(k1 * k1 + 4.0 * k2 > 0.0, "daniels_boundary: k1^2 + 4 k2 must be positive");
}

}  // namespace

double daniels_value(double delta, double k1, double k2, double s) {
  check_daniels(delta, k1, k2);
  if (s < 1e-8) return delta - s / (2.0 * delta) * std::log(k1);
  const double R = std::sqrt(0.25 * k1 * k1 + k2 * std::exp(-4.0 * delta * delta / s));
  return delta - s / (2.0 * delta) * std::log(0.5 * k1 + R);
}

Boundary daniels_boundary(double delta, double k1, double k2, double T) {
  check_daniels(delta, k1, k2);
  require(T > 0.0, "daniels_boundary: horizon must be positive");
  constexpr double kLimit = 1e-8;
  const double d2 = delta * delta;

  struct Parts {
    double L, L1, L2;  // log argument and its first two derivatives
  };
  auto parts = [=](double s) {
    const double E = k2 * std::exp(-4.0 * d2 / s);
    const double E1 = E * 4.0 * d2 / (s * s);
    const double E2 = E * (16.0 * d2 * d2 / (s * s * s * s) - 8.0 * d2 / (s * s * s));
    const double R = std::sqrt(0.25 * k1 * k1 + E);
    const double R1 = E1 / (2.0 * R);
    const double R2 = E2 / (2.0 * R) - E1 * R1 / (2.0 * R * R);
    return Parts{0.5 * k1 + R, R1, R2};
  };

  Boundary bd;
  bd.g = [=](double s) {
    if (s < kLimit) return delta - s / (2.0 * delta) * std::log(k1);
    return delta - s / (2.0 * delta) * std::log(parts(s).L);
  };
  bd.g_prime = [=](double s) {
    if (s < kLimit) return -std::log(k1) / (2.0 * delta);
    const Parts p = parts(s);
    return -std::log(p.L) / (2.0 * delta) - s / (2.0 * delta) * p.L1 / p.L;
  };
  bd.g_second = [=](double s) {
    if (s < kLimit) return 0.0;
    const Parts p = parts(s);
    return -p.L1 / (delta * p.L) - s / (2.0 * delta) * (p.L2 * p.L - p.L1 * p.L1) / (p.L * p.L);
  };
  bd.T = T;
  std::tie(bd.K_plus, bd.K_minus) = lipschitz_constants(bd.g_prime, T);
  return bd;
}

}  // namespace fptlab
