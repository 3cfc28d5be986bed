#include "fptlab/fpt.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fptlab/errors.hpp"
#include "fptlab/normal.hpp"
#include "fptlab/quadrature.hpp"

namespace fptlab {

double FptDistribution::crossing_fraction() const {
  if (source == Source::closed_form) {
    QuadratureOptions opts;
    opts.abs_tol = 1e-9;
    opts.throw_on_failure = false;
    return integrate(density, 0.0, T, opts).value;
  }
  const long n = total();
  return n == 0 ? 0.0 : static_cast<double>(samples.size()) / static_cast<double>(n);
}

FptDistribution FptDistribution::closed_form(std::function<double(double)> density, double T,
                                             std::string label) {
  require(T > 0.0, "FptDistribution: horizon must be positive");
  FptDistribution d;
  d.T = T;
  d.source = Source::closed_form;
  // Densities with a t^{-3/2} prefactor are evaluated as 0 at t = 0.
  d.density = [f = std::move(density)](double t) {
    if (t <= 0.0) return 0.0;
    const double v = f(t);
    return std::isfinite(v) ? v : 0.0;
  };
  d.label = std::move(label);
  return d;
}

void DensityCurve::validate() const {
  require(ts.size() == values.size(), "DensityCurve: ts and values differ in length");
  require(stderrs.empty() || stderrs.size() == values.size(),
          "DensityCurve: stderrs must be empty or match values");
  for (double v : values) require(std::isfinite(v) && v >= 0.0, "DensityCurve: values must be finite and >= 0");
}

std::string DensityCurve::to_csv() const {
  validate();
  std::ostringstream out;
  out << std::setprecision(17);
  out << "t,value,stderr\n";
  for (size_t i = 0; i < ts.size(); ++i)
    out << ts[i] << ',' << values[i] << ',' << (stderrs.empty() ? 0.0 : stderrs[i]) << '\n';
  return out.str();
}

nlohmann::json DensityCurve::to_json() const {
  validate();
  nlohmann::json j;
  j["t"] = ts;
  j["value"] = values;
  j["stderr"] = stderrs.empty() ? std::vector<double>(values.size(), 0.0) : stderrs;
  if (!edges.empty()) j["edges"] = edges;
  j["meta"] = meta;
  return j;
}

double fpt_density_from_f(double f_t_x, double p_txz) {
  require(f_t_x >= 0.0 && p_txz >= 0.0, "fpt_density_from_f: inputs must be non-negative");
  return 0.5 * f_t_x * p_txz;
}

double original_fpt_density(double f_t_u, double sigma_at_g, double pU) {
  require(f_t_u >= 0.0 && sigma_at_g >= 0.0 && pU >= 0.0,
          "original_fpt_density: inputs must be non-negative");
  return 0.5 * f_t_u * sigma_at_g * sigma_at_g * pU;
}

double bridge_fpt_density(double ptau_t, double p_Tmt_gt_y, double p_T_x_y) {
  require(p_T_x_y > 0.0, "bridge_fpt_density: p(T, x, y) must be positive");
  require(ptau_t >= 0.0 && p_Tmt_gt_y >= 0.0, "bridge_fpt_density: inputs must be non-negative");
  return p_Tmt_gt_y / p_T_x_y * ptau_t;
}

double bridge_fpt_density_kernel_form(double f_t_x, double p_t_x_gt, double p_Tmt_gt_y,
                                      double p_T_x_y) {
  require(p_T_x_y > 0.0, "bridge_fpt_density: p(T, x, y) must be positive");
  const double bridge_kernel = p_t_x_gt * p_Tmt_gt_y / p_T_x_y;
  return fpt_density_from_f(f_t_x, bridge_kernel);
}

namespace {

std::vector<double> freedman_diaconis_edges(std::vector<double> xs, double T, int min_bins) {
  int bins = min_bins;
  if (xs.size() >= 4) {
    std::sort(xs.begin(), xs.end());
    auto quantile = [&](double q) {
      const double pos = q * (xs.size() - 1);
      const size_t i = static_cast<size_t>(pos);
      const double frac = pos - i;
      return i + 1 < xs.size() ? xs[i] * (1 - frac) + xs[i + 1] * frac : xs[i];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(xs.size()));
    if (width > 0.0) bins = std::max(min_bins, static_cast<int>(std::ceil(T / width)));
  }
  bins = std::min(bins, 100000);
  std::vector<double> edges(bins + 1);
  for (int i = 0; i <= bins; ++i) edges[i] = T * i / bins;
  return edges;
}

}  // namespace

DensityCurve empirical_density(const FptDistribution& dist, const HistogramOptions& opts) {
  DensityCurve curve;
  using Method = HistogramOptions::Method;

  if (dist.source == FptDistribution::Source::closed_form) {
    std::vector<double> edges = opts.edges.empty() ? freedman_diaconis_edges({}, dist.T, opts.min_bins) : opts.edges;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
      const double t = 0.5 * (edges[i] + edges[i + 1]);
      curve.ts.push_back(t);
      curve.values.push_back(dist.density(t));
      curve.stderrs.push_back(0.0);
    }
    curve.edges = std::move(edges);
    curve.meta = "closed_form" + (dist.label.empty() ? "" : ":" + dist.label);
    return curve;
  }

  const long n_total = dist.total();
  require(n_total >= 100, "empirical_density: at least 100 samples required");
  const double N = static_cast<double>(n_total);

  if (opts.method == Method::kernel) {
    const size_t m = dist.samples.size();
    double h = opts.bandwidth;
    if (h <= 0.0) {
      double mean = 0.0, var = 0.0;
      for (double s : dist.samples) mean += s;
      mean = m ? mean / m : 0.0;
      for (double s : dist.samples) var += (s - mean) * (s - mean);
      const double sd = m > 1 ? std::sqrt(var / (m - 1)) : dist.T;
      h = 1.06 * std::max(sd, 1e-12) * std::pow(std::max<double>(m, 1.0), -0.2);
    }
    const int k = std::max(2, opts.kernel_points);
    for (int i = 0; i < k; ++i) {
      const double t = dist.T * (i + 0.5) / k;
      double s1 = 0.0, s2 = 0.0;
      for (double s : dist.samples) {
        const double v = norm_pdf((t - s) / h) / h;
        s1 += v;
        s2 += v * v;
      }
      const double mean = s1 / N;
      const double var = std::max(0.0, s2 / N - mean * mean);
      curve.ts.push_back(t);
      curve.values.push_back(mean);
      curve.stderrs.push_back(std::sqrt(var / N));
    }
    std::ostringstream meta;
    meta << "kernel:h=" << h;
    curve.meta = meta.str();
    return curve;
  }

  std::vector<double> edges = opts.edges.empty()
                                  ? freedman_diaconis_edges(dist.samples, dist.T, opts.min_bins)
                                  : opts.edges;
  require(edges.size() >= 2 && std::is_sorted(edges.begin(), edges.end()),
          "empirical_density: edges must be sorted with at least two entries");
  std::vector<long> counts(edges.size() - 1, 0);
  for (double s : dist.samples) {
    auto it = std::upper_bound(edges.begin(), edges.end(), s);
    if (it == edges.begin()) continue;
    size_t bin = static_cast<size_t>(it - edges.begin()) - 1;
    if (bin == counts.size()) {
      if (s != edges.back()) continue;
      bin = counts.size() - 1;  // closed right edge
    }
    ++counts[bin];
  }
  for (size_t i = 0; i < counts.size(); ++i) {
    const double w = edges[i + 1] - edges[i];
    const double p = counts[i] / N;
    curve.ts.push_back(0.5 * (edges[i] + edges[i + 1]));
    curve.values.push_back(p / w);
    curve.stderrs.push_back(std::sqrt(p * (1.0 - p) / N) / w);
  }
  curve.edges = std::move(edges);
  curve.meta = "histogram";
  return curve;
}

}  // namespace fptlab
