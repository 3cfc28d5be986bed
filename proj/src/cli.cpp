#include "fptlab/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fptlab/boundary.hpp"
#include "fptlab/densities.hpp"
#include "fptlab/diffusion.hpp"
#include "fptlab/errors.hpp"
#include "fptlab/estimators.hpp"
#include "fptlab/fpt.hpp"
#include "fptlab/gateaux.hpp"

namespace fptlab::cli {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------- specs

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(what + ": cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

struct ModelSpec {
  std::string text = "bm";
  TransformedModel model = TransformedModel::brownian();
  bool brownian = true;
};

ModelSpec parse_model(const std::string& text) {
  ModelSpec s;
  s.text = text;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const double arg = colon == std::string::npos ? 0.0 : parse_list(text.substr(colon + 1), "--model").at(0);
  if (kind == "bm") {
    s.model = TransformedModel::brownian();
  } else if (kind == "drift") {
    s.model = TransformedModel::constant_drift(arg);
    s.brownian = arg == 0.0;
  } else if (kind == "ou") {
    s.model = TransformedModel::ornstein_uhlenbeck(arg);
    s.brownian = arg == 0.0;
  } else if (kind == "cubic") {
    s.model = TransformedModel::cubic(arg);
    s.brownian = arg == 0.0;
  } else {
    throw ValidationError("--model: unknown model '" + text + "' (bm, drift:c, ou:theta, cubic:c)");
  }
  return s;
}

struct BoundarySpec {
  std::string constant, linear, daniels, file;

  enum class Kind { none, constant, linear, daniels, table };
  Kind kind() const {
    int set = !constant.empty() + !linear.empty() + !daniels.empty() + !file.empty();
    if (set > 1) throw ValidationError("give exactly one of --constant, --linear, --daniels, --boundary-file");
    if (!constant.empty()) return Kind::constant;
    if (!linear.empty()) return Kind::linear;
    if (!daniels.empty()) return Kind::daniels;
    if (!file.empty()) return Kind::table;
    return Kind::none;
  }

  std::vector<double> params() const {
    switch (kind()) {
      case Kind::constant: return parse_list(constant, "--constant");
      case Kind::linear: return parse_list(linear, "--linear");
      case Kind::daniels: return parse_list(daniels, "--daniels");
      default: return {};
    }
  }

  Boundary build(double T) const {
    const auto p = params();
    switch (kind()) {
      case Kind::constant:
        require(p.size() == 1, "--constant takes one value");
        return Boundary::constant(p[0], T);
      case Kind::linear:
        require(p.size() == 2, "--linear takes a,b");
        return Boundary::linear(p[0], p[1], T);
      case Kind::daniels:
        require(p.size() == 3, "--daniels takes delta,k1,k2");
        return daniels_boundary(p[0], p[1], p[2], T);
      case Kind::table:
        return read_table(file);
      case Kind::none:
        break;
    }
    throw ValidationError("a boundary is required (--constant, --linear, --daniels or --boundary-file)");
  }

  json echo() const {
    switch (kind()) {
      case Kind::constant: return {{"constant", params()}};
      case Kind::linear: return {{"linear", params()}};
      case Kind::daniels: return {{"daniels", params()}};
      case Kind::table: return {{"table", file}};
      case Kind::none: break;
    }
    return nullptr;
  }

  // Rows: knot c0 c1 c2 ...; '#' starts a comment.
  static Boundary read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("--boundary-file: cannot open " + path);
    std::vector<double> knots;
    std::vector<std::vector<double>> coeffs;
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream row(line);
      double knot;
      if (!(row >> knot)) continue;
      std::vector<double> c;
      double v;
      while (row >> v) c.push_back(v);
      if (!row.eof()) throw ValidationError("--boundary-file: malformed row '" + line + "'");
      knots.push_back(knot);
      coeffs.push_back(std::move(c));
    }
    return Boundary::piecewise_polynomial(std::move(knots), std::move(coeffs));
  }
};

struct GridSpec {
  double step = 1e-3;
  double step2 = 0.0;
  double split = 0.0;

  PathGrid build(double t_end) const {
    require(step > 0.0, "--step must be positive");
    if (step2 > 0.0) {
      require(split > 0.0 && split < t_end, "--split must lie inside (0, t)");
      return PathGrid::two_regime(t_end, step, step2, split);
    }
    return PathGrid::with_step(t_end, step);
  }

  json echo() const {
    json j{{"step", step}};
    if (step2 > 0.0) {
      j["step2"] = step2;
      j["split"] = split;
    }
    return j;
  }
};

// ---------------------------------------------------------------- envelope

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Envelope {
  std::string command;
  json inputs = json::object();
  json results = json::object();
  std::optional<Table> table;

  void value(const std::string& name, double v, const std::string& method) {
    results[name] = {{"value", v}, {"method", method}};
  }
  void mc(const std::string& name, const MCEstimate& e) {
    results[name] = {{"value", e.value},       {"stderr", e.std_error}, {"n", e.n},
                     {"seed", e.seed},          {"grid_step", e.grid_step},
                     {"excluded", e.excluded}, {"method", "monte_carlo"}};
  }
};

std::string format_json(const Envelope& env, double wall) {
  json j;
  j["schema"] = kSchema;
  j["version"] = kVersion;
  j["command"] = env.command;
  j["inputs"] = env.inputs;
  j["results"] = env.results;
  if (env.table) {
    json t;
    t["columns"] = env.table->columns;
    t["rows"] = env.table->rows;
    j["table"] = t;
  }
  j["wall_time_s"] = wall;
  return j.dump(2) + "\n";
}

std::string format_csv(const Envelope& env) {
  std::ostringstream out;
  out << std::setprecision(17);
  if (env.table) {
    for (size_t i = 0; i < env.table->columns.size(); ++i) out << (i ? "," : "") << env.table->columns[i];
    out << "\n";
    for (const auto& row : env.table->rows) {
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    }
    return out.str();
  }
  out << "name,value,stderr,method\n";
  for (const auto& [name, r] : env.results.items()) {
    if (!r.is_object() || !r.contains("value") || !r["value"].is_number()) continue;
    out << name << ',' << r["value"].get<double>() << ','
        << (r.contains("stderr") ? r["stderr"].get<double>() : 0.0) << ',' << r["method"].get<std::string>()
        << "\n";
  }
  return out.str();
}

Table curve_table(const DensityCurve& c) {
  Table t{{"t", "value", "stderr"}, {}};
  for (size_t i = 0; i < c.ts.size(); ++i)
    t.rows.push_back({c.ts[i], c.values[i], c.stderrs.empty() ? 0.0 : c.stderrs[i]});
  return t;
}

// Closed-form crossing density for Brownian motion where one exists.
std::optional<std::function<double(double)>> bm_reference_density(const BoundarySpec& b, double x) {
  const auto p = b.params();
  switch (b.kind()) {
    case BoundarySpec::Kind::constant:
      return [y = p.at(0), x](double t) { return kendall_fpt_density(y, x, t); };
    case BoundarySpec::Kind::linear:
      return [a = p.at(0) - x, s = p.at(1)](double t) { return linear_boundary_closed_forms(a, s, t).fpt_density; };
    case BoundarySpec::Kind::daniels:
      if (x != 0.0) return std::nullopt;
      return [d = p.at(0), k1 = p.at(1), k2 = p.at(2)](double t) { return daniels_fpt_density(d, k1, k2, t); };
    default:
      return std::nullopt;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fptlab: first-passage-time densities, boundary-crossing Monte Carlo and boundary sensitivities"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // Shared options, registered on each subcommand.
  std::optional<std::uint64_t> seed;
  long n = 10000;
  GridSpec grid;
  std::string out_path;
  std::string format = "json";
  std::string model_text = "bm";
  BoundarySpec bspec;

  auto add_common = [&](CLI::App* sub, bool mc, bool boundary) {
    sub->add_option("--out", out_path, "Output path (default stdout)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    if (mc) {
      sub->add_option("--seed", seed, "64-bit seed (random when omitted; always echoed)");
      sub->add_option("--n", n, "Monte-Carlo sample count");
      sub->add_option("--step", grid.step, "Time step");
      sub->add_option("--step2", grid.step2, "Fine time step after --split");
      sub->add_option("--split", grid.split, "Time where --step2 takes over");
      sub->add_option("--model", model_text, "bm | drift:c | ou:theta | cubic:c");
    }
    if (boundary) {
      sub->add_option("--constant", bspec.constant, "Constant boundary level");
      sub->add_option("--linear", bspec.linear, "Linear boundary a,b (a + b t)");
      sub->add_option("--daniels", bspec.daniels, "Daniels boundary delta,k1,k2");
      sub->add_option("--boundary-file", bspec.file, "Piecewise-polynomial coefficient table");
    }
  };

  double t = 1.0, x = 0.0, z = 0.0, y = 1.0, T = 1.0;
  double window = 0.1;
  std::string offsets_text;
  bool free_intercept = false, bridge_correction = false;

  auto* cond = app.add_subcommand("cond-prob", "Conditional non-crossing probability given X_t = z");
  add_common(cond, true, true);
  cond->add_option("--t", t);
  cond->add_option("--x", x);
  cond->add_option("--z", z)->required();
  cond->add_flag("--bridge-correction", bridge_correction);

  auto* estf = app.add_subcommand("estimate-f", "Regression estimate of the asymptotic coefficient f(t, x)");
  add_common(estf, true, true);
  estf->add_option("--t", t);
  estf->add_option("--x", x);
  estf->add_option("--window", window);
  estf->add_option("--offsets", offsets_text, "Comma-separated distances g(t) - z");
  estf->add_flag("--free-intercept", free_intercept);
  estf->add_flag("--bridge-correction", bridge_correction);

  std::string bins_text, method = "histogram";
  double bandwidth = 0.0;
  auto* fptd = app.add_subcommand("fpt-density", "Empirical first-passage-time density");
  add_common(fptd, true, true);
  fptd->add_option("--x", x);
  fptd->add_option("--T", T, "Horizon");
  fptd->add_option("--edges", bins_text, "Comma-separated histogram edges");
  fptd->add_option("--method", method)->check(CLI::IsMember({"histogram", "kernel"}));
  fptd->add_option("--bandwidth", bandwidth);
  fptd->add_flag("--bridge-correction", bridge_correction);

  int points = 100;
  auto* bridge = app.add_subcommand("bridge-fpt", "Crossing density of the Brownian bridge pinned at y at time T");
  add_common(bridge, false, true);
  bridge->add_option("--x", x);
  bridge->add_option("--y", y, "Pinning value at T");
  bridge->add_option("--T", T);
  bridge->add_option("--points", points);

  double delta = 0.5, k1 = 0.5, k2 = 0.5;
  auto* dan = app.add_subcommand("daniels", "Daniels boundary, its crossing density and f(t, x)");
  add_common(dan, false, false);
  dan->add_option("--delta", delta);
  dan->add_option("--k1", k1);
  dan->add_option("--k2", k2);
  dan->add_option("--t", t);
  dan->add_option("--x", x);

  auto* ken = app.add_subcommand("kendall", "Kendall's identity for Brownian motion and a constant level");
  add_common(ken, false, false);
  ken->add_option("--y", y);
  ken->add_option("--x", x);
  ken->add_option("--t", t);

  std::optional<double> md_y, md_lambda, md_a, md_s, md_yv, md_t, md_z;
  auto* meander = app.add_subcommand("meander-density", "Meander endpoint density, Laplace transform, transition density");
  add_common(meander, false, false);
  meander->add_option("--y", md_y, "Endpoint density at y");
  meander->add_option("--lambda", md_lambda, "Laplace transform at lambda");
  meander->add_option("--a", md_a, "Pinning value at time 1 (transition density)");
  meander->add_option("--s", md_s);
  meander->add_option("--from", md_yv, "Value at time s");
  meander->add_option("--t", md_t);
  meander->add_option("--z", md_z);

  std::string h_text = "1,1", fpt_mode = "closed";
  long n_meander = 100000, n_fpt = 100000;
  int meander_steps = 1000;
  double t_min = 1e-8;
  auto* gat = app.add_subcommand("gateaux", "Derivative of the non-crossing probability along h (horizon 1)");
  add_common(gat, true, true);
  gat->add_option("--x", x);
  gat->add_option("--h", h_text, "Perturbation a2,b2 (a2 + b2 t)");
  gat->add_option("--fpt", fpt_mode, "closed (Brownian motion only) or mc")->check(CLI::IsMember({"closed", "mc"}));
  gat->add_option("--n-meander", n_meander);
  gat->add_option("--meander-steps", meander_steps);
  gat->add_option("--n-fpt", n_fpt);
  gat->add_option("--t-min", t_min);

  double a1 = 1, a2 = 1, b1 = 1, b2 = 1, tol = 1e-4;
  bool with_mc = false;
  auto* ex1 = app.add_subcommand("verify-example1", "Closed form vs quadrature for BM and linear g, h");
  add_common(ex1, true, false);
  ex1->add_option("--a1", a1);
  ex1->add_option("--a2", a2);
  ex1->add_option("--b1", b1);
  ex1->add_option("--b2", b2);
  ex1->add_option("--tol", tol);
  ex1->add_flag("--mc", with_mc, "Also run the meander Monte-Carlo pipeline");
  ex1->add_option("--n-meander", n_meander);
  ex1->add_option("--meander-steps", meander_steps);
  ex1->add_option("--t-min", t_min);

  auto* ex2 = app.add_subcommand("verify-example2", "Daniels regression estimate of f(1, 0) vs the exact value");
  add_common(ex2, true, false);
  ex2->add_option("--delta", delta);
  ex2->add_option("--k1", k1);
  ex2->add_option("--k2", k2);
  ex2->add_option("--window", window);
  ex2->add_option("--offsets", offsets_text);

  double lo = -10.0, hi = 10.0;
  int grid_n = 2001;
  auto* cc = app.add_subcommand("check-conditions", "Scan mu' + mu^2 for the growth conditions");
  add_common(cc, false, false);
  cc->add_option("--model", model_text, "bm | drift:c | ou:theta | cubic:c");
  cc->add_option("--t", t);
  cc->add_option("--lo", lo);
  cc->add_option("--hi", hi);
  cc->add_option("--grid", grid_n);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  Envelope env;
  try {
    if (!seed) {
      std::random_device rd;
      seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    require(n >= 1, "--n must be >= 1");
    auto mc_inputs = [&] {
      env.inputs["seed"] = *seed;
      env.inputs["n"] = n;
      env.inputs["grid"] = grid.echo();
      env.inputs["model"] = model_text;
    };

    if (*cond) {
      env.command = "cond-prob";
      mc_inputs();
      env.inputs.update({{"t", t}, {"x", x}, {"z", z}, {"boundary", bspec.echo()}, {"bridge_correction", bridge_correction}});
      const ModelSpec ms = parse_model(model_text);
      const Boundary b = bspec.build(t);
      CrossingOptions co;
      co.bridge_correction = bridge_correction;
      env.mc("noncross_prob", estimate_cond_noncross_prob(ms.model, b, t, x, z, grid.build(t), n, *seed, co));
      if (ms.brownian && (bspec.kind() == BoundarySpec::Kind::linear || bspec.kind() == BoundarySpec::Kind::constant))
        env.value("reference", linear_noncross_prob(x, b.g(0.0), b.g(t), t, z), "closed_form");
    } else if (*estf || *ex2) {
      const bool example = ex2->parsed();
      env.command = example ? "verify-example2" : "estimate-f";
      if (example) {
        t = 1.0;
        x = 0.0;
        bspec = {};
        std::ostringstream d;
        d << std::setprecision(17) << delta << ',' << k1 << ',' << k2;
        bspec.daniels = d.str();
      }
      // Unless a grid is given, use the coarse/fine grid that refines over the
      // last 1% before t, where the conditioned paths approach the boundary.
      CLI::App* sub = example ? ex2 : estf;
      if (sub->count("--step") == 0 && sub->count("--step2") == 0) {
        grid.step = 1e-4;
        grid.step2 = 1e-5;
        if (sub->count("--split") == 0) grid.split = 0.99 * t;
      }
      mc_inputs();
      env.inputs.update({{"t", t}, {"x", x}, {"window", window}, {"boundary", bspec.echo()},
                         {"through_origin", !free_intercept}, {"bridge_correction", bridge_correction}});
      const ModelSpec ms = parse_model(model_text);
      const Boundary b = bspec.build(t);
      std::vector<double> offsets = offsets_text.empty() ? default_offsets(window) : parse_list(offsets_text, "--offsets");
      env.inputs["offsets"] = offsets;
      RegressionOptions ro;
      ro.through_origin = !free_intercept;
      ro.crossing.bridge_correction = bridge_correction;
      const FEstimate fe = estimate_f_regression(ms.model, b, t, x, window, offsets, n, grid.build(t), *seed, ro);
      env.results["slope"] = {{"value", fe.slope}, {"stderr", fe.slope_stderr}, {"n", n},
                              {"seed", *seed}, {"grid_step", grid.step}, {"method", "monte_carlo"}};
      if (!fe.through_origin) env.results["intercept"] = {{"value", fe.intercept}, {"method", "monte_carlo"}};
      if (ms.brownian) {
        if (bspec.kind() == BoundarySpec::Kind::daniels) {
          const auto p = bspec.params();
          env.value("exact_f", daniels_f(p[0], p[1], p[2], t, x), "closed_form");
        } else if (bspec.kind() == BoundarySpec::Kind::linear || bspec.kind() == BoundarySpec::Kind::constant) {
          env.value("exact_f", 2.0 * (b.g(0.0) - x) / t, "closed_form");
        }
      }
      Table tab{{"offset", "value", "stderr"}, {}};
      for (const auto& p : fe.points) tab.rows.push_back({p.offset, p.estimate.value, p.estimate.std_error});
      env.table = tab;
    } else if (*fptd) {
      env.command = "fpt-density";
      mc_inputs();
      env.inputs.update({{"x", x}, {"T", T}, {"boundary", bspec.echo()}, {"method", method}, {"bridge_correction", bridge_correction}});
      const ModelSpec ms = parse_model(model_text);
      const Boundary b = bspec.build(T);
      FptSimOptions fo;
      fo.bridge_correction = bridge_correction;
      const FptDistribution dist = sample_fpt(ms.model, b, x, grid.build(T), n, *seed, fo);
      HistogramOptions ho;
      if (!bins_text.empty()) ho.edges = parse_list(bins_text, "--edges");
      ho.method = method == "kernel" ? HistogramOptions::Method::kernel : HistogramOptions::Method::histogram;
      ho.bandwidth = bandwidth;
      const DensityCurve curve = empirical_density(dist, ho);
      env.results["crossing_fraction"] = {{"value", dist.crossing_fraction()}, {"n", dist.total()}, {"seed", *seed},
                                          {"grid_step", grid.step}, {"method", "monte_carlo"},
                                          {"stderr", std::sqrt(dist.crossing_fraction() * (1 - dist.crossing_fraction()) / std::max<long>(1, dist.total()))}};
      env.results["censored"] = {{"value", dist.censored}, {"method", "monte_carlo"}};
      env.results["excluded"] = {{"value", dist.excluded}, {"method", "monte_carlo"}};
      env.results["curve"] = curve.to_json();
      env.results["curve"]["method"] = "monte_carlo";
      if (ms.brownian) {
        if (auto ref = bm_reference_density(bspec, x)) {
          std::vector<double> r;
          for (double ti : curve.ts) r.push_back((*ref)(ti));
          env.results["reference"] = {{"t", curve.ts}, {"value", r}, {"method", "closed_form"}};
        }
      }
      env.table = curve_table(curve);
    } else if (*bridge) {
      env.command = "bridge-fpt";
      env.inputs.update({{"x", x}, {"y", y}, {"T", T}, {"points", points}, {"boundary", bspec.echo()}});
      require(points >= 1, "--points must be >= 1");
      const Boundary b = bspec.build(T);
      auto free_density = bm_reference_density(bspec, x);
      if (!free_density) throw ValidationError("bridge-fpt: needs a constant, linear or Daniels (x = 0) boundary");
      const double pT = bm_transition_density(T, x, y);
      DensityCurve curve;
      curve.meta = "closed_form:bridge";
      for (int i = 1; i <= points; ++i) {
        const double ti = T * i / (points + 1);
        curve.ts.push_back(ti);
        curve.values.push_back(bridge_fpt_density((*free_density)(ti), bm_transition_density(T - ti, b.g(ti), y), pT));
        curve.stderrs.push_back(0.0);
      }
      env.results["curve"] = curve.to_json();
      env.results["curve"]["method"] = "closed_form";
      env.table = curve_table(curve);
    } else if (*dan) {
      env.command = "daniels";
      env.inputs.update({{"delta", delta}, {"k1", k1}, {"k2", k2}, {"t", t}, {"x", x}});
      const double g = daniels_value(delta, k1, k2, t);
      const double f = daniels_f(delta, k1, k2, t, x);
      env.value("g", g, "closed_form");
      env.value("f", f, "closed_form");
      env.value("fpt_density", daniels_fpt_density(delta, k1, k2, t), "closed_form");
      env.value("half_f_times_kernel", fpt_density_from_f(f, bm_transition_density(t, x, g)), "closed_form");
    } else if (*ken) {
      env.command = "kendall";
      env.inputs.update({{"y", y}, {"x", x}, {"t", t}});
      env.value("fpt_density", kendall_fpt_density(y, x, t), "closed_form");
    } else if (*meander) {
      env.command = "meander-density";
      if (md_y) {
        env.inputs["y"] = *md_y;
        env.value("endpoint_density", meander_endpoint_density(*md_y), "closed_form");
      }
      if (md_lambda) {
        env.inputs["lambda"] = *md_lambda;
        env.value("laplace", meander_laplace(*md_lambda), "closed_form");
      }
      if (md_a) {
        require(md_t && md_z, "meander-density: transition density needs --a, --t, --z");
        const double s = md_s.value_or(0.0), from = md_yv.value_or(0.0);
        env.inputs.update({{"a", *md_a}, {"s", s}, {"from", from}, {"t", *md_t}, {"z", *md_z}});
        env.value("transition_density", meander_transition_density(*md_a, s, from, *md_t, *md_z), "closed_form");
      }
      require(!env.results.empty(), "meander-density: give --y, --lambda or --a/--t/--z");
    } else if (*gat) {
      env.command = "gateaux";
      mc_inputs();
      const auto hp = parse_list(h_text, "--h");
      require(hp.size() == 2, "--h takes a2,b2");
      env.inputs.update({{"x", x}, {"boundary", bspec.echo()}, {"h", hp}, {"fpt", fpt_mode},
                         {"n_meander", n_meander}, {"meander_steps", meander_steps}, {"t_min", t_min}});
      const ModelSpec ms = parse_model(model_text);
      const Boundary g = bspec.build(1.0);
      const Boundary h = Boundary::linear(hp[0], hp[1], 1.0);
      FptDistribution fpt;
      if (fpt_mode == "closed") {
        auto ref = ms.brownian ? bm_reference_density(bspec, x) : std::nullopt;
        if (!ref) throw ValidationError("gateaux: --fpt closed needs Brownian motion with a constant, linear or Daniels boundary");
        fpt = FptDistribution::closed_form(*ref, 1.0, "bm");
      } else {
        env.inputs["n_fpt"] = n_fpt;
        fpt = sample_fpt(ms.model, g, x, grid.build(1.0), n_fpt, *seed ^ 0x5bd1e995ULL);
      }
      require(meander_steps >= 1, "--meander-steps must be >= 1");
      const GateauxResult r = gateaux_derivative(ms.model, g, h, fpt, n_meander, PathGrid::uniform(1.0, meander_steps), t_min, *seed);
      env.results["derivative"] = {{"value", r.value}, {"stderr", r.mc_stderr}, {"quadrature_error", r.quadrature_error},
                                   {"t_min", r.t_min_truncation}, {"truncation_bound", r.truncation_bound},
                                   {"n_meander", r.n_meander}, {"n", r.n_meander}, {"seed", r.seed}, {"excluded", r.excluded},
                                   {"grid_step", 1.0 / meander_steps}, {"method", "monte_carlo"}};
      if (ms.brownian && x == 0.0 && bspec.kind() == BoundarySpec::Kind::linear) {
        const auto p = bspec.params();
        env.value("closed_form", bm_linear_gateaux_closed_lhs(p[0], hp[0], p[1], hp[1]), "closed_form");
      }
    } else if (*ex1) {
      env.command = "verify-example1";
      env.inputs.update({{"a1", a1}, {"a2", a2}, {"b1", b1}, {"b2", b2}, {"tol", tol}});
      const double lhs = bm_linear_gateaux_closed_lhs(a1, a2, b1, b2);
      const double rhs = bm_linear_gateaux_quadrature_rhs(a1, a2, b1, b2, tol);
      env.value("lhs", lhs, "closed_form");
      env.results["rhs"] = {{"value", rhs}, {"tol", tol}, {"method", "quadrature"}};
      env.value("abs_diff", std::abs(lhs - rhs), "closed_form");
      if (with_mc) {
        env.inputs.update({{"seed", *seed}, {"n_meander", n_meander}, {"meander_steps", meander_steps}, {"t_min", t_min}});
        const GateauxResult r = gateaux_derivative(TransformedModel::brownian(), Boundary::linear(a1, b1), Boundary::linear(a2, b2),
                                                   fpt_distribution_bm_linear(a1, b1), n_meander,
                                                   PathGrid::uniform(1.0, meander_steps), t_min, *seed);
        env.results["monte_carlo"] = {{"value", r.value}, {"stderr", r.mc_stderr}, {"quadrature_error", r.quadrature_error},
                                      {"truncation_bound", r.truncation_bound}, {"n", r.n_meander}, {"seed", r.seed},
                                      {"grid_step", 1.0 / meander_steps}, {"method", "monte_carlo"}};
      }
    } else if (*cc) {
      env.command = "check-conditions";
      env.inputs.update({{"model", model_text}, {"t", t}, {"lo", lo}, {"hi", hi}, {"grid", grid_n}});
      const ModelSpec ms = parse_model(model_text);
      const GrowthDiagnostic d = check_growth_condition(ms.model, t, {lo, hi}, grid_n);
      env.value("limsup_ratio", d.limsup_ratio, "grid_scan");
      env.value("min_potential", d.min_value, "grid_scan");
      env.value("fpt_threshold", d.fpt_threshold, "closed_form");
      env.value("gateaux_threshold", d.gateaux_threshold, "closed_form");
      env.results["passes_fpt"] = {{"value", d.passes_fpt()}, {"method", "grid_scan"}};
      env.results["passes_gateaux"] = {{"value", d.passes_gateaux()}, {"method", "grid_scan"}};
    }
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::out_of_range& e) {
    err << "validation error: missing parameter (" << e.what() << ")\n";
    return kValidation;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string text = format == "csv" ? format_csv(env) : format_json(env, wall);
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << out_path << "\n";
      return kValidation;
    }
    file << text;
  }
  return kOk;
}

}  // namespace fptlab::cli
