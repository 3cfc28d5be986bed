#include "fptlab/quadrature.hpp"

#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "fptlab/errors.hpp"

namespace fptlab {
namespace {

// QUADPACK qk15 abscissae/weights; index 7 is the centre.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment qk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  return {a, b, resk * h, std::abs((resk - resg) * h)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
  if (a == b) return {};
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw ValidationError("integrate: finite limits required");
  if (b < a) {
    auto r = integrate(f, b, a, opts);
    r.value = -r.value;
    return r;
  }

  std::priority_queue<Segment> heap;
  Segment first = qk15(f, a, b);
  double total = first.value;
  double err = first.error;
  heap.push(first);
  int evals = 15;

  auto done = [&] { return err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (!done() && static_cast<int>(heap.size()) < opts.max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push(worst);
      break;  // interval no longer splittable in double precision
    }
    Segment left = qk15(f, worst.a, mid);
    Segment right = qk15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the partition to shed accumulated rounding from the updates.
  double value = 0.0, error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  QuadratureResult out{value, error, evals};
  if (opts.throw_on_failure && error > std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
    std::ostringstream msg;
    msg << "integrate: tolerance " << opts.abs_tol << " not reached on [" << a << ", " << b
        << "], error estimate " << error;
    throw NumericalError(msg.str());
  }
  return out;
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       const QuadratureOptions& opts) {
  auto g = [&](double u) {
    if (u >= 1.0) return 0.0;
    const double w = 1.0 - u;
    const double v = f(a + u / w) / (w * w);
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(g, 0.0, 1.0, opts);
}

QuadratureResult integrate_real_line(const std::function<double(double)>& f, double center,
                                     const QuadratureOptions& opts) {
  QuadratureOptions half = opts;
  half.abs_tol = 0.5 * opts.abs_tol;
  auto right = integrate_to_infinity(f, center, half);
  auto left = integrate_to_infinity([&](double x) { return f(2.0 * center - x); }, center, half);
  return {left.value + right.value, left.error + right.error, left.evaluations + right.evaluations};
}

KronrodPanel kronrod_panel(double a, double b) {
  KronrodPanel p{};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  int k = 0;
  for (int j = 0; j < 7; ++j) {
    for (double sign : {-1.0, 1.0}) {
      p.nodes[k] = c + sign * h * kXgk[j];
      p.kronrod_weights[k] = h * kWgk[j];
      p.gauss_weights[k] = (j % 2 == 1) ? h * kWg[j / 2] : 0.0;
      ++k;
    }
  }
  p.nodes[k] = c;
  p.kronrod_weights[k] = h * kWgk[7];
  p.gauss_weights[k] = h * kWg[3];
  return p;
}

}  // namespace fptlab
