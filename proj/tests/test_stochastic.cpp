#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include <doctest.h>

#include "fptlab/boundary.hpp"
#include "fptlab/densities.hpp"
#include "fptlab/errors.hpp"
#include "fptlab/estimators.hpp"
#include "fptlab/paths.hpp"
#include "fptlab/quadrature.hpp"
#include "fptlab/rng.hpp"

using namespace fptlab;
using doctest::Approx;

namespace {

struct ThreadsGuard {
  explicit ThreadsGuard(const char* v) { setenv("FPTLAB_THREADS", v, 1); }
  ~ThreadsGuard() { unsetenv("FPTLAB_THREADS"); }
};

double rayleigh_cdf(double y) { return y > 0 ? -std::expm1(-0.5 * y * y) : 0.0; }

}  // namespace

TEST_CASE("random streams are keyed by seed and id") {
  Stream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
  CHECK(va != d());

  Stream u(1, 0);
  double mean = 0, m2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = u.normal();
    mean += z;
    m2 += z * z;
  }
  mean /= n;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
  CHECK(m2 / n == Approx(1.0).epsilon(0.02));
}

TEST_CASE("path grids") {
  const auto g = PathGrid::with_step(1.0, 1e-3);
  CHECK(g.n_steps() == 1000);
  CHECK(g.is_uniform());
  const auto two = PathGrid::two_regime(1.0, 1e-4, 1e-5, 0.99);
  CHECK(two.n_steps() == 9900 + 1000);
  CHECK(two.t_end() == 1.0);
  CHECK(two.max_step() == Approx(1e-4));
  CHECK(two.dt(two.n_steps() - 1) == Approx(1e-5));
  CHECK_THROWS_AS(PathGrid::with_step(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(PathGrid::two_regime(1.0, 1e-3, 1e-4, 1.5), ValidationError);
}

TEST_CASE("Brownian bridge moments") {
  const auto grid = PathGrid::uniform(2.0, 20);
  const double x = 0.5, z = -1.0;
  const int n = 20000;
  const int k = 8;  // t = 0.8
  const double t = grid.time(k), T = 2.0;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = sample_brownian_bridge(x, z, grid, 11, i);
    CHECK(p.values[0] == x);
    CHECK(p.values[grid.n_steps()] == z);
    s1 += p.values[k];
    s2 += p.values[k] * p.values[k];
  }
  const double mean = s1 / n, var = s2 / n - mean * mean;
  const double m_exact = x + (z - x) * t / T, v_exact = t * (T - t) / T;
  CHECK(std::abs(mean - m_exact) < 4.0 * std::sqrt(v_exact / n));
  CHECK(var == Approx(v_exact).epsilon(0.04));
}

TEST_CASE("meander paths: positivity, Rayleigh endpoint, interior marginal") {
  const auto grid = PathGrid::uniform(1.0, 50);
  const int n = 20000;
  std::vector<double> ends(n);
  double mid = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto p = sample_meander(grid, 5, i);
    CHECK(p.values[0] == 0.0);
    for (int j = 1; j <= grid.n_steps(); ++j) REQUIRE(p.values[j] > 0.0);
    ends[i] = p.values[grid.n_steps()];
    mid += p.values[25];
  }
  std::sort(ends.begin(), ends.end());
  double D = 0.0;
  for (int i = 0; i < n; ++i) {
    const double F = rayleigh_cdf(ends[i]);
    D = std::max({D, F - double(i) / n, double(i + 1) / n - F});
  }
  const double sn = std::sqrt(double(n));
  CHECK(D * (sn + 0.12 + 0.11 / sn) < 1.628);  // alpha = 0.01

  // E W_{1/2}: mix the pinned entrance law over the Rayleigh endpoint
  auto inner = [](double a) {
    return integrate_to_infinity([a](double z) { return z > 0 ? z * meander_transition_density(a, 0, 0, 0.5, z) : 0.0; },
                                 0.0, {1e-10, 0.0, 4000, true})
        .value;
  };
  const double exact = integrate_to_infinity([&](double a) { return a > 0 ? meander_endpoint_density(a) * inner(a) : 0.0; },
                                             0.0, {1e-8, 0.0, 4000, true})
                           .value;
  CHECK(mid / n == Approx(exact).epsilon(0.01));
}

TEST_CASE("bridge non-crossing estimate for BM and a linear boundary") {
  const auto b = Boundary::linear(1.0, 0.5, 1.0);
  const auto grid = PathGrid::with_step(1.0, 1e-3);
  const double exact = linear_noncross_prob(0.0, 1.0, 1.5, 1.0, 0.5);
  const auto e = estimate_cond_noncross_prob(TransformedModel::brownian(), b, 1.0, 0.0, 0.5, grid, 20000, 3);
  CHECK(e.n == 20000);
  CHECK(e.excluded == 0);
  CHECK(e.std_error > 0.0);
  // discrete monitoring only misses crossings
  CHECK(e.value > exact - 3 * e.std_error);
  CHECK(e.value < exact + 3 * e.std_error + 0.02);

  // with the per-step bridge correction the discretization bias disappears
  CrossingOptions co;
  co.bridge_correction = true;
  const auto c = estimate_cond_noncross_prob(TransformedModel::brownian(), b, 1.0, 0.0, 0.5, grid, 20000, 3, co);
  CHECK(std::abs(c.value - exact) < 3 * c.std_error + 1e-3);

  // pinned on the boundary
  const auto on = estimate_cond_noncross_prob(TransformedModel::brownian(), b, 1.0, 0.0, 1.5, grid, 100, 3);
  CHECK(on.value == 0.0);
}

TEST_CASE("discretization bias shrinks with the step") {
  const auto b = Boundary::constant(1.0, 1.0);
  const double exact = linear_noncross_prob(0.0, 1.0, 1.0, 1.0, 0.7);
  double prev = 1.0;
  for (double step : {1e-1, 1e-2, 1e-3}) {
    const auto e = estimate_cond_noncross_prob(TransformedModel::brownian(), b, 1.0, 0.0, 0.7,
                                               PathGrid::with_step(1.0, step), 20000, 9);
    const double bias = e.value - exact;
    CHECK(bias < prev);
    prev = bias;
  }
}

TEST_CASE("constant drift cancels in the weighted ratio") {
  const auto b = Boundary::linear(0.8, 0.3, 1.0);
  const auto grid = PathGrid::with_step(1.0, 1e-2);
  const auto e0 = estimate_cond_noncross_prob(TransformedModel::brownian(), b, 1.0, 0.0, 0.2, grid, 5000, 21);
  const auto e1 = estimate_cond_noncross_prob(TransformedModel::constant_drift(1.7), b, 1.0, 0.0, 0.2, grid, 5000, 21);
  CHECK(e0.value == e1.value);
  CHECK(e0.std_error == e1.std_error);

  // the same holds when the constant potential goes through the trapezoid path integral
  auto slow = TransformedModel::from_drift([](double) { return 1.7; }, [](double) { return 0.0; },
                                           [](double y) { return 1.7 * y; });
  const auto e2 = estimate_cond_noncross_prob(slow, b, 1.0, 0.0, 0.2, grid, 5000, 21);
  CHECK(e2.value == e0.value);
}

TEST_CASE("estimates do not depend on the worker count") {
  const auto b = Boundary::linear(1.0, 0.2, 1.0);
  const auto grid = PathGrid::with_step(1.0, 1e-2);
  const auto ou = TransformedModel::ornstein_uhlenbeck(0.8);
  MCEstimate one, four;
  {
    ThreadsGuard g("1");
    one = estimate_cond_noncross_prob(ou, b, 1.0, 0.0, 0.5, grid, 3000, 77);
  }
  {
    ThreadsGuard g("4");
    four = estimate_cond_noncross_prob(ou, b, 1.0, 0.0, 0.5, grid, 3000, 77);
  }
  CHECK(one.value == four.value);
  CHECK(one.std_error == four.std_error);
}

TEST_CASE("estimator input validation") {
  const auto b = Boundary::constant(1.0, 1.0);
  const auto grid = PathGrid::with_step(1.0, 1e-2);
  const auto bm = TransformedModel::brownian();
  CHECK_THROWS_AS(estimate_cond_noncross_prob(bm, b, 1.0, 0.0, 1.5, grid, 10, 1), ValidationError);
  CHECK_THROWS_AS(estimate_cond_noncross_prob(bm, b, 1.0, 2.0, 0.0, grid, 10, 1), ValidationError);
  CHECK_THROWS_AS(estimate_cond_noncross_prob(bm, b, 0.5, 0.0, 0.0, grid, 10, 1), ValidationError);
  CHECK_THROWS_AS(estimate_cond_noncross_prob(bm, b, 1.0, 0.0, 0.0, grid, 0, 1), ValidationError);

  // a potential that blows up on every path exceeds the exclusion budget
  auto wild = TransformedModel::from_drift([](double) { return 0.0; },
                                           [](double) { return -std::numeric_limits<double>::infinity(); },
                                           [](double) { return 0.0; });
  CHECK_THROWS_AS(estimate_cond_noncross_prob(wild, b, 1.0, 0.0, 0.0, grid, 100, 1), NumericalError);
}

TEST_CASE("regression estimate of f for a linear boundary") {
  const auto b = Boundary::constant(1.0, 1.0);
  const auto grid = PathGrid::with_step(1.0, 1e-3);
  CrossingOptions co;
  co.bridge_correction = true;
  // a narrow window keeps the curvature of 1 - exp(-2 d) out of the slope
  const auto fe = estimate_f_regression(TransformedModel::brownian(), b, 1.0, 0.0, 0.02, {}, 20000, grid, 13, {true, co});
  CHECK(fe.points.size() == 10);
  CHECK(fe.slope == Approx(2.0).epsilon(0.05));

  // over a wide window the through-origin fit sits below 2 by the curvature term
  const auto wide = estimate_f_regression(TransformedModel::brownian(), b, 1.0, 0.0, 0.1, {}, 5000, grid, 13, {true, co});
  CHECK(wide.slope < 2.0);
  CHECK(fe.slope_stderr > 0.0);

  // single offset: the fit through the origin is estimate / offset
  const auto one = estimate_f_regression(TransformedModel::brownian(), b, 1.0, 0.0, 0.1, {0.05}, 2000, grid, 13);
  REQUIRE(one.points.size() == 1);
  CHECK(one.slope == Approx(one.points[0].estimate.value / 0.05).epsilon(1e-12));

  // a free intercept needs two offsets
  RegressionOptions free;
  free.through_origin = false;
  CHECK_THROWS_AS(estimate_f_regression(TransformedModel::brownian(), b, 1.0, 0.0, 0.1, {0.05}, 200, grid, 13, free),
                  NumericalError);
  CHECK_THROWS_AS(estimate_f_regression(TransformedModel::brownian(), b, 1.0, 0.0, 0.1, {0.2}, 200, grid, 13),
                  ValidationError);
  const auto two = estimate_f_regression(TransformedModel::brownian(), b, 1.0, 0.0, 0.1, {}, 2000, grid, 13, free);
  CHECK(std::isfinite(two.slope));
  CHECK(std::isfinite(two.intercept));
}
