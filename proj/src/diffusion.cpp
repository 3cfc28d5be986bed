#include "fptlab/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "fptlab/errors.hpp"
#include "fptlab/quadrature.hpp"

namespace fptlab {

TransformedModel TransformedModel::brownian() { return constant_drift(0.0); }

TransformedModel TransformedModel::constant_drift(double c) {
  auto tm = from_drift([c](double) { return c; }, [](double) { return 0.0; },
                       [c](double y) { return c * y; });
  tm.constant_potential = c * c;
  return tm;
}

TransformedModel TransformedModel::ornstein_uhlenbeck(double theta) {
  return from_drift([theta](double y) { return -theta * y; }, [theta](double) { return -theta; },
                    [theta](double y) { return -0.5 * theta * y * y; });
}

TransformedModel TransformedModel::cubic(double coef) {
  return from_drift([coef](double y) { return -coef * y * y * y; },
                    [coef](double y) { return -3.0 * coef * y * y; },
                    [coef](double y) { return -0.25 * coef * y * y * y * y; });
}

TransformedModel TransformedModel::from_drift(RealFn mu, RealFn mu_prime, RealFn G) {
  TransformedModel tm;
  tm.mu = std::move(mu);
  tm.mu_prime = std::move(mu_prime);
  tm.G = std::move(G);
  tm.F = [](double y) { return y; };
  tm.F_inv = [](double x) { return x; };
  tm.y0 = 0.0;
  return tm;
}

namespace {

struct LampertiState {
  DiffusionModel model;
  double y0;

  double inv_sigma(double y) const {
    const double s = model.sigma(y);
    if (!(s > 0.0) || !std::isfinite(s)) {
      std::ostringstream msg;
      msg << "lamperti_transform: sigma(" << y << ") = " << s << " is not positive";
      throw ValidationError(msg.str());
    }
    return 1.0 / s;
  }

  double F(double y) const {
    if (!model.interval.contains(y)) throw ValidationError("lamperti_transform: F evaluated outside interval");
    QuadratureOptions opts;
    opts.abs_tol = 1e-10;
    opts.rel_tol = 1e-13;
    return integrate([this](double u) { return inv_sigma(u); }, y0, y, opts).value;
  }

  // Move `from` toward `to` but stay strictly inside the interval.
  double clamp_inside(double from, double to) const {
    const Interval& I = model.interval;
    if (to >= I.hi) return from + 0.5 * (I.hi - from);
    if (to <= I.lo) return from - 0.5 * (from - I.lo);
    return to;
  }

  double F_inv(double x) const {
    if (x == 0.0) return y0;
    // Bracket: walk outward from y0 with doubling steps until F passes x.
    const double dir = x > 0.0 ? 1.0 : -1.0;
    double lo = y0, flo = 0.0;
    double step = 0.5 * std::max(1.0, std::abs(y0));
    double hi = clamp_inside(y0, y0 + dir * step);
    double fhi = F(hi);
    int expand = 0;
    while ((fhi - x) * dir < 0.0) {
      if (++expand > 200) throw NumericalError("lamperti_transform: F_inv could not bracket root");
      lo = hi;
      flo = fhi;
      step *= 2.0;
      hi = clamp_inside(hi, hi + dir * step);
      fhi = F(hi);
    }
    if (lo > hi) {
      std::swap(lo, hi);
      std::swap(flo, fhi);
    }
    // Safeguarded Newton: F' = 1/sigma > 0, fall back to bisection when the
    // Newton step leaves the bracket.
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double fy = F(y) - x;
      if (std::abs(fy) < 1e-13 * std::max(1.0, std::abs(x))) return y;
      if (fy < 0.0)
        lo = y;
      else
        hi = y;
      double next = y - fy * model.sigma(y);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - y) <= 1e-15 * std::max(1.0, std::abs(y))) return next;
      y = next;
    }
    return y;
  }

  double m(double y) const { return model.nu(y) / model.sigma(y) - 0.5 * model.sigma_prime(y); }

  double m_prime(double y) const {
    const Interval& I = model.interval;
    double h = 1e-4 * std::max(1.0, std::abs(y));
    while (!(I.contains(y - 2.0 * h) && I.contains(y + 2.0 * h))) h *= 0.25;
    return (-m(y + 2 * h) + 8 * m(y + h) - 8 * m(y - h) + m(y - 2 * h)) / (12.0 * h);
  }
};

}  // namespace

TransformedModel lamperti_transform(const DiffusionModel& model, double y0) {
  require(model.nu && model.sigma && model.sigma_prime, "lamperti_transform: model functions unset");
  require(!model.interval.empty(), "lamperti_transform: empty diffusion interval");
  require(model.interval.contains(y0), "lamperti_transform: y0 outside diffusion interval");
  auto st = std::make_shared<const LampertiState>(LampertiState{model, y0});
  st->inv_sigma(y0);

  TransformedModel tm;
  tm.y0 = y0;
  tm.F = [st](double y) { return st->F(y); };
  tm.F_inv = [st](double x) { return st->F_inv(x); };
  tm.mu = [st](double x) { return st->m(st->F_inv(x)); };
  tm.mu_prime = [st](double x) {
    const double y = st->F_inv(x);
    return st->m_prime(y) * st->model.sigma(y);
  };
  tm.G = [st](double x) {
    const double y = st->F_inv(x);
    QuadratureOptions opts;
    opts.abs_tol = 1e-10;
    opts.rel_tol = 1e-13;
    return integrate([&](double v) { return st->m(v) * st->inv_sigma(v); }, st->y0, y, opts).value;
  };
  return tm;
}

GrowthDiagnostic check_growth_condition(const TransformedModel& tm, double t, Interval y_range,
                                        int n) {
  require(n >= 2, "check_growth_condition: n must be >= 2");
  require(t > 0.0, "check_growth_condition: t must be positive");
  require(y_range.lo < y_range.hi && std::isfinite(y_range.lo) && std::isfinite(y_range.hi),
          "check_growth_condition: finite nonempty range required");

  GrowthDiagnostic d;
  d.fpt_threshold = 4.0 / (t * t);
  d.gateaux_threshold = 1.0;
  d.grid.resize(n);
  d.values.resize(n);
  const double tail_edge = 0.5 * y_range.lo;
  d.min_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double y = y_range.lo + (y_range.hi - y_range.lo) * i / (n - 1);
    const double v = tm.potential(y);
    d.grid[i] = y;
    d.values[i] = v;
    d.min_value = std::min(d.min_value, v);
    if (y_range.lo < 0.0 && y <= tail_edge && y < 0.0)
      d.limsup_ratio = std::max(d.limsup_ratio, -v / (y * y));
  }
  return d;
}

}  // namespace fptlab
