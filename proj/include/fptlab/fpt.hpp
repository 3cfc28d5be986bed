#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fptlab {

/// Law of the first crossing time on [0, T], either as samples or as a closed
/// form density.
struct FptDistribution {
  enum class Source { empirical, closed_form };

  std::vector<double> samples;  // crossing times in (0, T]
  long censored = 0;            // paths that never crossed by T
  long excluded = 0;            // paths dropped (explosion guard)
  double T = 1.0;
  Source source = Source::empirical;
  std::function<double(double)> density;  // closed_form only
  std::string label;

  long total() const { return static_cast<long>(samples.size()) + censored; }
  double crossing_fraction() const;

  static FptDistribution closed_form(std::function<double(double)> density, double T,
                                     std::string label = {});
};

/// Density values on a set of points with optional per-point standard errors.
struct DensityCurve {
  std::vector<double> ts;
  std::vector<double> values;
  std::vector<double> stderrs;  // empty or same length as values
  std::vector<double> edges;    // histogram bin edges when the curve is a histogram
  std::string meta;

  void validate() const;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// p_tau(t) = f(t, x) p(t, x, g(t)) / 2.
double fpt_density_from_f(double f_t_x, double p_txz);

/// Density of the first passage of the original (non-unit) diffusion:
/// f sigma(g)^2 p_U / 2, with f the coefficient measured in the original
/// coordinates (f of the unit-diffusion form divided by sigma(g)).
double original_fpt_density(double f_t_u, double sigma_at_g, double pU);

/// Bridge density from the unconstrained one:
///   p_tau^y(t) = p(T - t, g(t), y) / p(T, x, y) * p_tau(t).
double bridge_fpt_density(double ptau_t, double p_Tmt_gt_y, double p_T_x_y);

/// Same density in kernel form f/2 * p^y(0, x, t, g(t)), with the bridge kernel
/// factorized as p(t, x, g) p(T - t, g, y) / p(T, x, y).
double bridge_fpt_density_kernel_form(double f_t_x, double p_t_x_gt, double p_Tmt_gt_y,
                                      double p_T_x_y);

struct HistogramOptions {
  enum class Method { histogram, kernel };
  Method method = Method::histogram;
  // Explicit edges override the Freedman-Diaconis rule.
  std::vector<double> edges;
  int min_bins = 20;
  double bandwidth = 0.0;  // kernel; 0 selects Silverman's rule
  int kernel_points = 200;
};

/// Histogram (or Gaussian kernel) estimate of the crossing-time density,
/// normalized by the total path count so it integrates to the crossing
/// fraction. A closed-form source is tabulated on the same points.
DensityCurve empirical_density(const FptDistribution& dist, const HistogramOptions& opts = {});

}  // namespace fptlab
