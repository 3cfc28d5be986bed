#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "fptlab/rng.hpp"

namespace fptlab {

/// Simulation time grid 0 = t_0 < t_1 < ... < t_n = t_end.
///
/// Usually uniform; `two_regime` switches to a finer step past `split`.
class PathGrid {
 public:
  static PathGrid uniform(double t_end, int n_steps);
  /// Step `step` on [0, split], step `fine_step` on [split, t_end].
  static PathGrid two_regime(double t_end, double step, double fine_step, double split);
  /// Uniform grid with step as close to `step` as divides t_end.
  static PathGrid with_step(double t_end, double step);

  double t_end() const { return times_[times_.size() - 1]; }
  int n_steps() const { return static_cast<int>(times_.size()) - 1; }
  const Eigen::VectorXd& times() const { return times_; }
  double time(int i) const { return times_[i]; }
  double dt(int i) const { return times_[i + 1] - times_[i]; }
  /// Largest step (the nominal step for reporting).
  double max_step() const;
  bool is_uniform() const { return uniform_; }

  /// Same grid shape stretched to end at t_end.
  PathGrid rescaled(double t_end) const;

 private:
  explicit PathGrid(Eigen::VectorXd times, bool uniform) : times_(std::move(times)), uniform_(uniform) {}
  Eigen::VectorXd times_;
  bool uniform_ = true;
};

struct PathSample {
  PathGrid grid;
  Eigen::VectorXd values;  // length n_steps + 1
};

/// Brownian bridge from x at time 0 to z at grid.t_end() via
///   B_s = x + (s/t)((z - x) - W_t) + W_s
/// built from a single Brownian path W. The endpoint is set to z exactly.
PathSample sample_brownian_bridge(double x, double z, const PathGrid& grid, std::uint64_t seed,
                                  std::uint64_t stream = 0);

/// Brownian meander on [0, t_end]: endpoint r ~ sqrt(t_end) * Rayleigh, then the
/// Euclidean norm of a 3-d Brownian bridge from the origin to (r, 0, 0).
PathSample sample_meander(const PathGrid& grid, std::uint64_t seed, std::uint64_t stream = 0);

namespace detail {

// Allocation-free kernels used by the estimators; `out` has grid.n_steps()+1
// entries.
void fill_brownian_bridge(double x, double z, const PathGrid& grid, Stream& rng,
                          std::span<double> out);
void fill_meander(const PathGrid& grid, Stream& rng, std::span<double> out);

}  // namespace detail

}  // namespace fptlab
