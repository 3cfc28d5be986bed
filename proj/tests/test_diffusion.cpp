#include <cmath>

#include <doctest.h>

#include "fptlab/diffusion.hpp"
#include "fptlab/errors.hpp"

using namespace fptlab;
using doctest::Approx;

TEST_CASE("Lamperti transform of Brownian motion is the identity") {
  DiffusionModel m{[](double) { return 0.0; }, [](double) { return 1.0; }, [](double) { return 0.0; }, {}};
  const auto tm = lamperti_transform(m, 0.0);
  for (double y : {-2.0, 0.0, 1.5}) {
    CHECK(tm.F(y) == Approx(y).epsilon(1e-12));
    CHECK(tm.F_inv(y) == Approx(y).epsilon(1e-10));
    CHECK(std::abs(tm.mu(y)) < 1e-12);
    CHECK(std::abs(tm.G(y)) < 1e-10);
  }
}

TEST_CASE("Lamperti transform with unit volatility keeps the drift") {
  DiffusionModel m{[](double y) { return -y; }, [](double) { return 1.0; }, [](double) { return 0.0; }, {}};
  const auto tm = lamperti_transform(m, 0.0);
  for (double x : {-1.5, -0.2, 0.7, 2.0}) {
    CHECK(tm.mu(x) == Approx(-x).epsilon(1e-9));
    CHECK(tm.G(x) == Approx(-0.5 * x * x).epsilon(1e-8));
    CHECK(tm.mu_prime(x) == Approx(-1.0).epsilon(1e-6));
  }
}

TEST_CASE("Lamperti transform of geometric Brownian motion") {
  // sigma(y) = y on (0, inf) from y0 = 1: F = log, mu = -1/2
  DiffusionModel m{[](double) { return 0.0; }, [](double y) { return y; }, [](double) { return 1.0; },
                   {0.0, std::numeric_limits<double>::infinity()}};
  const auto tm = lamperti_transform(m, 1.0);
  CHECK(tm.F(1.0) == 0.0);
  for (double y : {0.3, 1.0, 2.5, 7.0}) CHECK(tm.F(y) == Approx(std::log(y)).epsilon(1e-10));
  for (double x : {-1.0, 0.0, 0.8, 1.9}) {
    CHECK(tm.F_inv(x) == Approx(std::exp(x)).epsilon(1e-10));
    CHECK(tm.mu(x) == Approx(-0.5).epsilon(1e-9));
    CHECK(std::abs(tm.mu_prime(x)) < 1e-5);
    CHECK(tm.G(x) == Approx(-0.5 * x).epsilon(1e-8));
  }
  // G' = mu
  const double h = 1e-4;
  CHECK((tm.G(0.5 + h) - tm.G(0.5 - h)) / (2 * h) == Approx(tm.mu(0.5)).epsilon(1e-6));
}

TEST_CASE("Lamperti transform rejects bad models") {
  DiffusionModel neg{[](double) { return 0.0; }, [](double y) { return y; }, [](double) { return 1.0; }, {}};
  CHECK_THROWS_AS(lamperti_transform(neg, 1.0).F(-1.0), ValidationError);
  DiffusionModel empty{[](double) { return 0.0; }, [](double) { return 1.0; }, [](double) { return 0.0; }, {1.0, 1.0}};
  CHECK_THROWS_AS(lamperti_transform(empty, 1.0), ValidationError);
}

TEST_CASE("preset models") {
  const auto ou = TransformedModel::ornstein_uhlenbeck(1.0);
  CHECK(ou.potential(2.0) == Approx(3.0));
  const auto cu = TransformedModel::cubic(1.0);
  CHECK(cu.potential(1.0) == Approx(-2.0));
  const auto cd = TransformedModel::constant_drift(0.7);
  REQUIRE(cd.constant_potential.has_value());
  CHECK(*cd.constant_potential == Approx(0.49));
  CHECK(cd.G(2.0) == Approx(1.4));
}

TEST_CASE("growth condition diagnostics") {
  const auto bm = check_growth_condition(TransformedModel::brownian(), 1.0, {-10, 10}, 401);
  CHECK(bm.limsup_ratio == 0.0);
  CHECK(bm.passes_fpt());
  CHECK(bm.passes_gateaux());
  CHECK(bm.values.size() == bm.grid.size());

  const auto ou = check_growth_condition(TransformedModel::ornstein_uhlenbeck(1.0), 1.0, {-10, 10}, 2001);
  CHECK(ou.min_value == Approx(-1.0).epsilon(1e-12));
  CHECK(ou.passes_fpt());
  CHECK(ou.passes_gateaux());

  const auto cu = check_growth_condition(TransformedModel::cubic(1.0), 1.0, {-10, 10}, 2001);
  CHECK(cu.min_value == Approx(-2.0).epsilon(1e-4));
  CHECK(cu.passes_fpt());

  // potential -5 y^2 violates both thresholds at t = 1
  auto bad = TransformedModel::from_drift([](double) { return 0.0; }, [](double y) { return -5.0 * y * y; },
                                          [](double) { return 0.0; });
  const auto d = check_growth_condition(bad, 1.0, {-10, 10}, 2001);
  CHECK(d.limsup_ratio == Approx(5.0));
  CHECK_FALSE(d.passes_fpt());
  CHECK_FALSE(d.passes_gateaux());
}
