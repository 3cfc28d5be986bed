#include "fptlab/gateaux.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "fptlab/densities.hpp"
#include "fptlab/errors.hpp"
#include "fptlab/normal.hpp"
#include "fptlab/parallel.hpp"
#include "fptlab/quadrature.hpp"
#include "fptlab/rng.hpp"

namespace fptlab {
namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);
constexpr std::size_t kBlock = 256;

// One time-to-go value t at which the meander expectation is needed.
struct Node {
  double t = 0.0;
  double coef_pos = 0.0;    // weight on E(t) from h > 0
  double coef_neg = 0.0;    // weight on E(t) from h < 0 (stored positive)
  double gauss_coef = 0.0;  // signed embedded-Gauss weight (closed form only)
  double per_path = 0.0;    // sqrt(2/pi) h(1-t)/sqrt(t), empirical only
  long count = 0;           // empirical multiplicity

  // Deterministic pieces of the exponent.
  double sqrt_t = 0.0;
  double G_ref = 0.0;          // G(g(1 - t))
  double drift_energy = 0.0;   // -1/2 int_0^t g'_{0,t}(s)^2 ds
  bool curved = false;
  std::vector<double> level;     // g(1 - t + t r_k)
  std::vector<double> curvature; // g''(1 - t + t r_k)
};

double trapezoid(std::span<const double> f, const PathGrid& grid) {
  double s = 0.0;
  for (int k = 0; k < grid.n_steps(); ++k) s += 0.5 * (f[k] + f[k + 1]) * grid.dt(k);
  return s;
}

void prepare_node(Node& node, const TransformedModel& tm, const Boundary& g, const PathGrid& grid) {
  const int n = grid.n_steps();
  const double t = node.t;
  node.sqrt_t = std::sqrt(t);
  node.G_ref = tm.G(g.g(1.0 - t));
  node.level.resize(n + 1);
  node.curvature.resize(n + 1);
  std::vector<double> slope2(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double s = 1.0 - t + t * grid.time(k);
    node.level[k] = g.g(s);
    node.curvature[k] = g.g_second(s);
    const double d = g.g_prime(s);
    slope2[k] = d * d;
    if (node.curvature[k] != 0.0) node.curved = true;
  }
  node.drift_energy = -0.5 * t * trapezoid(slope2, grid);
}

}  // namespace

GateauxResult gateaux_derivative(const TransformedModel& tm, const Boundary& g, const Boundary& h,
                                 const FptDistribution& fpt, long n_meander, const PathGrid& meander_grid,
                                 double t_min, std::uint64_t seed, const GateauxOptions& opts) {
  require(n_meander >= 1, "gateaux_derivative: n_meander must be >= 1");
  require(t_min >= 0.0 && t_min < 1.0, "gateaux_derivative: t_min must lie in [0, 1)");
  require(std::abs(fpt.T - 1.0) < 1e-12, "gateaux_derivative: first passage law must be on [0, 1]");
  require(opts.panels >= 1, "gateaux_derivative: panels must be >= 1");
  require(g.g && g.g_prime && g.g_second && h.g, "gateaux_derivative: boundary functions unset");
  const PathGrid grid = std::abs(meander_grid.t_end() - 1.0) < 1e-15 ? meander_grid : meander_grid.rescaled(1.0);
  const int steps = grid.n_steps();
  const bool closed = fpt.source == FptDistribution::Source::closed_form;

  // Nodes and their weights.
  std::vector<Node> nodes;
  double N_paths = 0.0;
  if (closed) {
    const double u0 = std::sqrt(t_min);
    for (int p = 0; p < opts.panels; ++p) {
      const double ua = u0 + (1.0 - u0) * p / opts.panels;
      const double ub = u0 + (1.0 - u0) * (p + 1) / opts.panels;
      const KronrodPanel panel = kronrod_panel(ua, ub);
      for (int i = 0; i < KronrodPanel::kNodes; ++i) {
        const double u = panel.nodes[i];
        Node node;
        node.t = u * u;
        // dt = 2u du cancels the 1/sqrt(t) singularity.
        const double base = 2.0 * kSqrt2OverPi * fpt.density(1.0 - node.t);
        const double hv = h.g(1.0 - node.t);
        node.coef_pos = panel.kronrod_weights[i] * base * std::max(hv, 0.0);
        node.coef_neg = panel.kronrod_weights[i] * base * std::max(-hv, 0.0);
        node.gauss_coef = panel.gauss_weights[i] * base * hv;
        nodes.push_back(std::move(node));
      }
    }
  } else {
    N_paths = static_cast<double>(fpt.total());
    require(N_paths > 0, "gateaux_derivative: empty first passage sample");
    std::map<double, long> counts;
    for (double tau : fpt.samples) {
      const double t = 1.0 - tau;
      if (tau > 0.0 && tau <= 1.0 && t >= t_min && t > 0.0) ++counts[t];
    }
    if (counts.empty()) throw ValidationError("gateaux_derivative: no first passage samples left after truncation");
    for (const auto& [t, c] : counts) {
      Node node;
      node.t = t;
      node.count = c;
      node.per_path = kSqrt2OverPi * h.g(1.0 - t) / std::sqrt(t);
      const double w = static_cast<double>(c) / N_paths;
      node.coef_pos = w * std::max(node.per_path, 0.0);
      node.coef_neg = w * std::max(-node.per_path, 0.0);
      nodes.push_back(std::move(node));
    }
  }
  for (auto& node : nodes) prepare_node(node, tm, g, grid);

  const double g1 = g.g(1.0);
  const double gp1 = g.g_prime(1.0);
  const size_t J = nodes.size();
  const size_t n = static_cast<size_t>(n_meander);
  const size_t n_blocks = (n + kBlock - 1) / kBlock;

  std::vector<double> z_pos(n), z_neg(n), z_gauss(n);
  std::vector<char> bad(n, 0);
  std::vector<double> block_sums(n_blocks * J, 0.0);

  parallel_for(n_blocks, [&](size_t b) {
    std::vector<double> path(steps + 1), ys(J), work(steps + 1);
    double* partial = block_sums.data() + b * J;
    const size_t end = std::min(n, (b + 1) * kBlock);
    for (size_t i = b * kBlock; i < end; ++i) {
      Stream rng(seed, i);
      detail::fill_meander(grid, rng, path);
      const double w1 = path[steps];
      bool finite = true;
      double zp = 0.0, zn = 0.0, zg = 0.0;
      for (size_t j = 0; j < J; ++j) {
        const Node& node = nodes[j];
        const double st = node.sqrt_t;
        double expo = tm.G(-st * w1 + g1) - node.G_ref + st * w1 * gp1 + node.drift_energy;
        if (tm.constant_potential) {
          expo -= 0.5 * node.t * *tm.constant_potential;
        } else {
          for (int k = 0; k <= steps; ++k) work[k] = tm.potential(-st * path[k] + node.level[k]);
          expo -= 0.5 * node.t * trapezoid(work, grid);
        }
        if (node.curved) {
          for (int k = 0; k <= steps; ++k) work[k] = node.curvature[k] * path[k];
          expo -= st * node.t * trapezoid(work, grid);
        }
        const double y = std::exp(expo);
        if (!std::isfinite(y)) {
          finite = false;
          break;
        }
        ys[j] = y;
        zp += node.coef_pos * y;
        zn += node.coef_neg * y;
        zg += node.gauss_coef * y;
      }
      if (!finite) {
        bad[i] = 1;
        continue;
      }
      z_pos[i] = zp;
      z_neg[i] = zn;
      z_gauss[i] = zg;
      for (size_t j = 0; j < J; ++j) partial[j] += ys[j];
    }
  });

  long excluded = 0;
  for (char c : bad) excluded += c;
  if (excluded > opts.max_excluded_fraction * static_cast<double>(n))
    throw NumericalError("gateaux_derivative: too many meander samples with non-finite exponent");
  const long used = static_cast<long>(n) - excluded;
  if (used == 0) throw NumericalError("gateaux_derivative: no usable meander samples");

  std::vector<double> zp, zn, zg, diff;
  zp.reserve(used);
  zn.reserve(used);
  zg.reserve(used);
  for (size_t i = 0; i < n; ++i) {
    if (bad[i]) continue;
    zp.push_back(z_pos[i]);
    zn.push_back(z_neg[i]);
    zg.push_back(z_gauss[i]);
  }
  const double m = static_cast<double>(used);
  const double mean_pos = pairwise_sum(zp) / m;
  const double mean_neg = pairwise_sum(zn) / m;

  GateauxResult res;
  res.value = mean_pos - mean_neg;
  diff.resize(used);
  for (long i = 0; i < used; ++i) {
    const double d = zp[i] - zn[i] - res.value;
    diff[i] = d * d;
  }
  double var_meander = used > 1 ? pairwise_sum(diff) / (m - 1.0) / m : 0.0;

  // Per-node meander means, reduced block by block in index order.
  std::vector<double> node_mean(J, 0.0);
  {
    std::vector<double> col(n_blocks);
    for (size_t j = 0; j < J; ++j) {
      for (size_t b = 0; b < n_blocks; ++b) col[b] = block_sums[b * J + j];
      node_mean[j] = pairwise_sum(col) / m;
    }
  }

  if (closed) {
    res.quadrature_error = std::abs(res.value - pairwise_sum(zg) / m);
  } else {
    // Variance from sampling the first passage times themselves.
    double second = 0.0;
    for (size_t j = 0; j < J; ++j) {
      const double v = nodes[j].per_path * node_mean[j];
      second += static_cast<double>(nodes[j].count) * v * v;
    }
    const double var_fpt = std::max(0.0, second / N_paths - res.value * res.value) / N_paths;
    var_meander += var_fpt;
  }
  res.mc_stderr = std::sqrt(var_meander);

  // Truncation: dropped integral <= sqrt(2/pi) sup|h| c E* int_0^{t_min} t^{-1/2} dt.
  res.t_min_truncation = t_min;
  if (t_min > 0.0) {
    double c = 0.0;
    if (closed) {
      for (int i = 0; i <= 100; ++i) c = std::max(c, fpt.density(1.0 - t_min * i / 100.0));
    } else {
      std::vector<long> bins(50, 0);
      for (double tau : fpt.samples)
        if (tau > 0.0 && tau <= 1.0) ++bins[std::min<size_t>(49, static_cast<size_t>((1.0 - tau) * 50.0))];
      for (long b : bins) c = std::max(c, b / (N_paths * 0.02));
    }
    c *= 1.2;
    double h_sup = 0.0;
    for (int i = 0; i <= 20; ++i) h_sup = std::max(h_sup, std::abs(h.g(1.0 - t_min * i / 20.0)));
    size_t j_min = 0;
    for (size_t j = 1; j < J; ++j)
      if (nodes[j].t < nodes[j_min].t) j_min = j;
    const double e_star = std::max(1.0, node_mean[j_min]);
    res.truncation_bound = kSqrt2OverPi * h_sup * c * 2.0 * std::sqrt(t_min) * e_star;
  }
  res.n_meander = used;
  res.seed = seed;
  res.excluded = excluded;
  res.fpt_nodes = static_cast<long>(J);
  return res;
}

double bm_linear_gateaux_closed_lhs(double a1, double a2, double b1, double b2) {
  require(a1 > 0.0, "bm_linear_gateaux_closed_lhs: a1 must be positive");
  return a2 * kSqrt2OverPi * std::exp(-0.5 * (a1 + b1) * (a1 + b1)) +
         2.0 * (a2 * b1 + a1 * b2) * std::exp(-2.0 * a1 * b1) * norm_cdf(b1 - a1);
}

double bm_linear_gateaux_quadrature_rhs(double a1, double a2, double b1, double b2, double tol) {
  require(a1 > 0.0, "bm_linear_gateaux_quadrature_rhs: a1 must be positive");
  require(tol > 0.0, "bm_linear_gateaux_quadrature_rhs: tol must be positive");
  const double sqrt2pi = std::sqrt(2.0 * std::numbers::pi);
  // t = u^2 removes the t^{-1/2} endpoint singularity; at u = 1 the factor
  // exp(-a1^2 / 2(1 - t)) beats (1 - t)^{-3/2} and the integrand is 0.
  auto integrand = [=](double u) {
    const double t = u * u;
    const double r = 1.0 - t;
    if (r <= 0.0) return 0.0;
    const double level = a1 + b1 * r;
    const double expo = -level * level / (2.0 * r) - 0.5 * b1 * b1 * t;
    const double laplace = 1.0 + sqrt2pi * u * b1 * std::exp(0.5 * t * b1 * b1) * norm_sf(-u * b1);
    return 2.0 * a1 / std::numbers::pi * (a2 + b2 * r) / std::pow(r, 1.5) * std::exp(expo) * laplace;
  };
  QuadratureOptions opts;
  opts.abs_tol = tol;
  return integrate(integrand, 0.0, 1.0, opts).value;
}

FptDistribution fpt_distribution_bm_linear(double a1, double b1, long n, std::uint64_t seed, double T) {
  require(a1 > 0.0, "fpt_distribution_bm_linear: a1 must be positive");
  require(T > 0.0, "fpt_distribution_bm_linear: T must be positive");
  require(n >= 0, "fpt_distribution_bm_linear: n must be >= 0");
  auto density = [a1, b1](double t) { return linear_boundary_closed_forms(a1, b1, t).fpt_density; };
  if (n == 0) return FptDistribution::closed_form(density, T, "bm_linear");

  auto cdf = [a1, b1](double t) { return t <= 0.0 ? 0.0 : 1.0 - linear_boundary_survival(a1, b1, t); };
  const double mass = cdf(T);
  std::vector<double> draws(n);
  parallel_for(static_cast<size_t>(n), [&](size_t i) {
    Stream rng(seed, i);
    const double u = rng.uniform();
    if (u >= mass) {
      draws[i] = std::numeric_limits<double>::infinity();
      return;
    }
    double lo = 0.0, hi = T;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * T; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) < u ? lo : hi) = mid;
    }
    draws[i] = 0.5 * (lo + hi);
  });
  FptDistribution d;
  d.T = T;
  d.source = FptDistribution::Source::empirical;
  d.label = "bm_linear";
  for (double s : draws) {
    if (std::isinf(s))
      ++d.censored;
    else
      d.samples.push_back(s);
  }
  return d;
}

}  // namespace fptlab
