#include "fptlab/paths.hpp"

#include <algorithm>
#include <cmath>

#include "fptlab/errors.hpp"

namespace fptlab {

PathGrid PathGrid::uniform(double t_end, int n_steps) {
  require(t_end > 0.0 && std::isfinite(t_end), "PathGrid: t_end must be positive");
  require(n_steps >= 1, "PathGrid: n_steps must be >= 1");
  Eigen::VectorXd times(n_steps + 1);
  for (int i = 0; i <= n_steps; ++i) times[i] = t_end * i / n_steps;
  times[n_steps] = t_end;
  return PathGrid(std::move(times), true);
}

PathGrid PathGrid::with_step(double t_end, double step) {
  require(step > 0.0, "PathGrid: step must be positive");
  require(t_end > 0.0, "PathGrid: t_end must be positive");
  const double n = std::max(1.0, std::round(t_end / step));
  require(n < 1e9, "PathGrid: too many steps");
  return uniform(t_end, static_cast<int>(n));
}

PathGrid PathGrid::two_regime(double t_end, double step, double fine_step, double split) {
  require(step > 0.0 && fine_step > 0.0, "PathGrid: steps must be positive");
  require(split > 0.0 && split < t_end, "PathGrid: split must lie inside (0, t_end)");
  const int n1 = std::max(1, static_cast<int>(std::lround(split / step)));
  const int n2 = std::max(1, static_cast<int>(std::lround((t_end - split) / fine_step)));
  Eigen::VectorXd times(n1 + n2 + 1);
  for (int i = 0; i <= n1; ++i) times[i] = split * i / n1;
  for (int j = 1; j <= n2; ++j) times[n1 + j] = split + (t_end - split) * j / n2;
  times[n1 + n2] = t_end;
  return PathGrid(std::move(times), false);
}

double PathGrid::max_step() const {
  double m = 0.0;
  for (int i = 0; i < n_steps(); ++i) m = std::max(m, dt(i));
  return m;
}

PathGrid PathGrid::rescaled(double t_end) const {
  require(t_end > 0.0, "PathGrid: t_end must be positive");
  Eigen::VectorXd times = times_ * (t_end / this->t_end());
  times[times.size() - 1] = t_end;
  return PathGrid(std::move(times), uniform_);
}

namespace detail {

void fill_brownian_bridge(double x, double z, const PathGrid& grid, Stream& rng,
                          std::span<double> out) {
  const int n = grid.n_steps();
  const double t = grid.t_end();
  // Brownian path W into out, then pin it.
  out[0] = 0.0;
  for (int i = 0; i < n; ++i) out[i + 1] = out[i] + std::sqrt(grid.dt(i)) * rng.normal();
  const double shift = (z - x) - out[n];
  for (int i = 0; i <= n; ++i) out[i] = x + grid.time(i) / t * shift + out[i];
  out[0] = x;
  out[n] = z;
}

void fill_meander(const PathGrid& grid, Stream& rng, std::span<double> out) {
  const int n = grid.n_steps();
  const double t = grid.t_end();
  const double r = std::sqrt(t) * std::sqrt(-2.0 * std::log(rng.uniform()));
  const double target[3] = {r, 0.0, 0.0};
  double b[3] = {0.0, 0.0, 0.0};
  out[0] = 0.0;
  // Sequential Brownian bridge sampling, exact at the grid points.
  for (int i = 0; i < n - 1; ++i) {
    const double remaining = t - grid.time(i);
    const double h = grid.dt(i);
    const double sd = std::sqrt(h * (remaining - h) / remaining);
    double norm2 = 0.0;
    for (int k = 0; k < 3; ++k) {
      b[k] += (target[k] - b[k]) * h / remaining + sd * rng.normal();
      norm2 += b[k] * b[k];
    }
    out[i + 1] = std::sqrt(norm2);
  }
  out[n] = r;
}

}  // namespace detail

PathSample sample_brownian_bridge(double x, double z, const PathGrid& grid, std::uint64_t seed,
                                  std::uint64_t stream) {
  Stream rng(seed, stream);
  PathSample p{grid, Eigen::VectorXd(grid.n_steps() + 1)};
  detail::fill_brownian_bridge(x, z, grid, rng, {p.values.data(), static_cast<size_t>(p.values.size())});
  return p;
}

PathSample sample_meander(const PathGrid& grid, std::uint64_t seed, std::uint64_t stream) {
  Stream rng(seed, stream);
  PathSample p{grid, Eigen::VectorXd(grid.n_steps() + 1)};
  detail::fill_meander(grid, rng, {p.values.data(), static_cast<size_t>(p.values.size())});
  return p;
}

}  // namespace fptlab
