#include "fptlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "fptlab/errors.hpp"
#include "fptlab/parallel.hpp"

namespace fptlab {
namespace {

Eigen::VectorXd boundary_on_grid(const Boundary& b, const PathGrid& grid) {
  Eigen::VectorXd g(grid.n_steps() + 1);
  for (int i = 0; i <= grid.n_steps(); ++i) g[i] = b.g(grid.time(i));
  return g;
}

void check_exclusions(long excluded, long n, double max_fraction, const char* who) {
  if (excluded > max_fraction * static_cast<double>(n)) {
    std::ostringstream msg;
    msg << who << ": " << excluded << " of " << n
        << " samples had non-finite weights (limit " << max_fraction * 100.0 << "%)";
    throw NumericalError(msg.str());
  }
}

}  // namespace

MCEstimate estimate_cond_noncross_prob(const TransformedModel& tm, const Boundary& boundary, double t,
                                       double x, double z, const PathGrid& grid, long n,
                                       std::uint64_t seed, const CrossingOptions& opts) {
  require(n >= 1, "estimate_cond_noncross_prob: n must be >= 1");
  require(t > 0.0, "estimate_cond_noncross_prob: t must be positive");
  require(std::abs(grid.t_end() - t) <= 1e-12 * std::max(1.0, t),
          "estimate_cond_noncross_prob: grid must end at t");
  require(x < boundary.g(0.0), "estimate_cond_noncross_prob: start must lie below g(0)");
  require(z <= boundary.g(t), "estimate_cond_noncross_prob: endpoint above g(t)");

  const int steps = grid.n_steps();
  const Eigen::VectorXd g = boundary_on_grid(boundary, grid);
  std::vector<double> log_weight(n), survive(n);

  parallel_for(static_cast<size_t>(n), [&](size_t i) {
    thread_local std::vector<double> path;
    path.resize(steps + 1);
    Stream rng(seed, opts.stream_offset + i);
    detail::fill_brownian_bridge(x, z, grid, rng, path);

    double ind = 1.0;
    for (int j = 0; j <= steps; ++j) {
      if (!(path[j] < g[j])) {
        ind = 0.0;
        break;
      }
    }
    if (ind > 0.0 && opts.bridge_correction) {
      for (int j = 0; j < steps; ++j)
        ind *= -std::expm1(-2.0 * (g[j] - path[j]) * (g[j + 1] - path[j + 1]) / grid.dt(j));
    }

    double integral = 0.0;
    if (tm.constant_potential) {
      integral = *tm.constant_potential * grid.t_end();
    } else {
      double prev = tm.potential(path[0]);
      for (int j = 0; j < steps; ++j) {
        const double next = tm.potential(path[j + 1]);
        integral += 0.5 * (prev + next) * grid.dt(j);
        prev = next;
      }
    }
    log_weight[i] = -0.5 * integral;
    survive[i] = ind;
  });

  // Normalize by the largest exponent: constant weights become exactly 1.
  long excluded = 0;
  double max_log = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < n; ++i) {
    if (std::isfinite(log_weight[i]))
      max_log = std::max(max_log, log_weight[i]);
    else
      ++excluded;
  }
  check_exclusions(excluded, n, opts.max_excluded_fraction, "estimate_cond_noncross_prob");
  const long used = n - excluded;
  if (used == 0) throw NumericalError("estimate_cond_noncross_prob: no usable samples");

  std::vector<double> num, den;
  num.reserve(used);
  den.reserve(used);
  for (long i = 0; i < n; ++i) {
    if (!std::isfinite(log_weight[i])) continue;
    const double w = std::exp(log_weight[i] - max_log);
    num.push_back(w * survive[i]);
    den.push_back(w);
  }
  const double sum_num = pairwise_sum(num);
  const double sum_den = pairwise_sum(den);
  const double ratio = sum_num / sum_den;

  // Delta-method variance of the ratio estimator.
  std::vector<double> resid2(used);
  for (long i = 0; i < used; ++i) {
    const double e = num[i] - ratio * den[i];
    resid2[i] = e * e;
  }
  const double mean_den = sum_den / used;
  const double var = used > 1 ? pairwise_sum(resid2) / (used - 1) : 0.0;

  MCEstimate est;
  est.value = ratio;
  est.std_error = std::sqrt(var / used) / mean_den;
  est.n = used;
  est.seed = seed;
  est.grid_step = grid.max_step();
  est.excluded = excluded;
  return est;
}

std::vector<double> default_offsets(double window, int count) {
  require(window > 0.0 && count >= 1, "default_offsets: positive window and count required");
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) out[k] = window * (k + 1) / count;
  return out;
}

FEstimate estimate_f_regression(const TransformedModel& tm, const Boundary& boundary, double t,
                                double x, double window, std::vector<double> offsets, long n_per_offset,
                                const PathGrid& grid, std::uint64_t seed, const RegressionOptions& opts) {
  require(window > 0.0, "estimate_f_regression: window must be positive");
  if (offsets.empty()) offsets = default_offsets(window);
  for (double d : offsets)
    require(d > 0.0 && d <= window * (1.0 + 1e-12), "estimate_f_regression: offsets must lie in (0, window]");

  FEstimate out;
  out.window = window;
  out.through_origin = opts.through_origin;
  const double gt = boundary.g(t);
  for (size_t k = 0; k < offsets.size(); ++k) {
    CrossingOptions co = opts.crossing;
    co.stream_offset = opts.crossing.stream_offset + static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(n_per_offset);
    MCEstimate e = estimate_cond_noncross_prob(tm, boundary, t, x, gt - offsets[k], grid, n_per_offset, seed, co);
    out.points.push_back({offsets[k], e});
  }

  std::vector<const FEstimate::Point*> usable;
  for (const auto& p : out.points)
    if (std::isfinite(p.estimate.value)) usable.push_back(&p);
  const size_t need = opts.through_origin ? 1 : 2;
  if (usable.size() < need) throw NumericalError("estimate_f_regression: degenerate fit, too few usable offsets");

  const Eigen::Index m = static_cast<Eigen::Index>(usable.size());
  const int cols = opts.through_origin ? 1 : 2;
  Eigen::MatrixXd X(m, cols);
  Eigen::VectorXd y(m), w(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& p = *usable[i];
    const double se = std::max(p.estimate.std_error, 1.0 / static_cast<double>(p.estimate.n));
    X(i, 0) = p.offset;
    if (cols == 2) X(i, 1) = 1.0;
    y[i] = p.estimate.value;
    w[i] = 1.0 / (se * se);
  }
  const Eigen::MatrixXd XtW = X.transpose() * w.asDiagonal();
  const Eigen::MatrixXd normal = XtW * X;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw NumericalError("estimate_f_regression: singular normal equations");
  const Eigen::VectorXd beta = ldlt.solve(XtW * y);
  const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(cols, cols));

  out.slope = beta[0];
  out.slope_stderr = std::sqrt(std::max(0.0, cov(0, 0)));
  out.intercept = cols == 2 ? beta[1] : 0.0;
  if (!std::isfinite(out.slope)) throw NumericalError("estimate_f_regression: non-finite slope");
  return out;
}

FptDistribution sample_fpt(const TransformedModel& tm, const Boundary& boundary, double x,
                           const PathGrid& grid, long n, std::uint64_t seed, const FptSimOptions& opts) {
  require(n >= 1, "sample_fpt: n must be >= 1");
  require(x < boundary.g(0.0), "sample_fpt: start must lie below g(0)");
  const int steps = grid.n_steps();
  const Eigen::VectorXd g = boundary_on_grid(boundary, grid);

  // Per path: crossing time, +inf when censored, NaN when flagged.
  std::vector<double> tau(n);
  parallel_for(static_cast<size_t>(n), [&](size_t i) {
    Stream rng(seed, opts.stream_offset + i);
    double X = x;
    double result = std::numeric_limits<double>::infinity();
    for (int j = 0; j < steps; ++j) {
      const double h = grid.dt(j);
      const double next = X + tm.mu(X) * h + std::sqrt(h) * rng.normal();
      if (!std::isfinite(next) || std::abs(next) > opts.explosion_guard) {
        result = std::numeric_limits<double>::quiet_NaN();
        break;
      }
      if (next > g[j + 1]) {
        result = grid.time(j + 1);
        break;
      }
      if (opts.bridge_correction) {
        const double p = std::exp(-2.0 * (g[j] - X) * (g[j + 1] - next) / h);
        if (rng.uniform() < p) {
          result = grid.time(j + 1);
          break;
        }
      }
      X = next;
    }
    tau[i] = result;
  });

  FptDistribution dist;
  dist.T = grid.t_end();
  dist.source = FptDistribution::Source::empirical;
  for (double s : tau) {
    if (std::isnan(s))
      ++dist.excluded;
    else if (std::isinf(s))
      ++dist.censored;
    else
      dist.samples.push_back(s);
  }
  return dist;
}

}  // namespace fptlab
