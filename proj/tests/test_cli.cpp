#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "fptlab/cli.hpp"

using nlohmann::json;
using doctest::Approx;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = fptlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  const auto r = run(std::move(args));
  REQUIRE(r.code == 0);
  return json::parse(r.out);
}

std::string strip_wall_time(std::string s) {
  const auto pos = s.find("\"wall_time_s\"");
  return pos == std::string::npos ? s : s.substr(0, pos);
}

}  // namespace

TEST_CASE("envelope layout") {
  const auto j = run_json({"kendall", "--y", "1", "--x", "0", "--t", "1"});
  CHECK(j["schema"] == fptlab::cli::kSchema);
  CHECK(j["version"] == fptlab::cli::kVersion);
  CHECK(j["command"] == "kendall");
  CHECK(j["results"]["fpt_density"]["value"].get<double>() == Approx(0.24197).epsilon(1e-4));
  CHECK(j["results"]["fpt_density"]["method"] == "closed_form");
  CHECK(j.contains("wall_time_s"));
}

TEST_CASE("example commands") {
  const auto e1 = run_json({"verify-example1", "--a1", "1", "--a2", "1", "--b1", "1", "--b2", "1"});
  CHECK(std::abs(e1["results"]["lhs"]["value"].get<double>() - 0.379) < 0.002);
  CHECK(std::abs(e1["results"]["rhs"]["value"].get<double>() - 0.379) < 0.002);
  CHECK(e1["results"]["abs_diff"]["value"].get<double>() < 0.002);
  CHECK(e1["results"]["rhs"]["method"] == "quadrature");

  const auto d = run_json({"daniels", "--delta", "0.5", "--k1", "0.5", "--k2", "0.5", "--t", "1"});
  CHECK(std::abs(d["results"]["f"]["value"].get<double>() - 1.33) < 0.005);
  CHECK(d["results"]["fpt_density"]["value"].get<double>() ==
        Approx(d["results"]["half_f_times_kernel"]["value"].get<double>()).epsilon(1e-12));

  const auto m = run_json({"meander-density", "--lambda", "1", "--y", "1", "--a", "1", "--t", "0.5", "--z", "0.4"});
  CHECK(m["results"]["laplace"]["value"].get<double>() == Approx(4.47705).epsilon(1e-5));
  CHECK(m["results"]["transition_density"]["value"].get<double>() > 0.0);

  const auto cc = run_json({"check-conditions", "--model", "cubic:1"});
  CHECK(cc["results"]["passes_fpt"]["value"] == true);

  const auto bf = run_json({"bridge-fpt", "--constant", "1", "--y", "0", "--points", "9"});
  CHECK(bf["table"]["rows"].size() == 9);
}

TEST_CASE("Monte-Carlo commands echo the seed and the sampling parameters") {
  const auto j = run_json({"cond-prob", "--linear", "1,1", "--z", "0.5", "--n", "2000", "--step", "0.01"});
  CHECK(j["inputs"]["seed"].is_number_unsigned());
  const auto& r = j["results"]["noncross_prob"];
  CHECK(r["method"] == "monte_carlo");
  CHECK(r["n"] == 2000);
  CHECK(r["seed"] == j["inputs"]["seed"]);
  CHECK(r["grid_step"].get<double>() == Approx(0.01));
  CHECK(r.contains("stderr"));
  CHECK(j["results"]["reference"]["method"] == "closed_form");
}

TEST_CASE("csv output and file output") {
  const auto r = run({"fpt-density", "--constant", "1", "--n", "2000", "--step", "0.01", "--seed", "4", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("t,value,stderr\n", 0) == 0);

  const auto path = std::filesystem::temp_directory_path() / "fptlab_cli_test.json";
  const auto w = run({"kendall", "--out", path.string()});
  REQUIRE(w.code == 0);
  CHECK(w.out.empty());
  std::ifstream in(path);
  CHECK(json::parse(in)["command"] == "kendall");
  std::filesystem::remove(path);
}

TEST_CASE("boundary table file") {
  const auto path = std::filesystem::temp_directory_path() / "fptlab_boundary.txt";
  {
    std::ofstream f(path);
    f << "# knot c0 c1\n0 1 1  # 1 + t\n";
  }
  const auto tab = run_json({"cond-prob", "--boundary-file", path.string(), "--z", "0.5", "--n", "500", "--step", "0.01",
                             "--seed", "3"});
  const auto lin = run_json({"cond-prob", "--linear", "1,1", "--z", "0.5", "--n", "500", "--step", "0.01", "--seed", "3"});
  CHECK(tab["results"]["noncross_prob"]["value"] == lin["results"]["noncross_prob"]["value"]);
  std::filesystem::remove(path);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == fptlab::cli::kUsage);
  CHECK(run({"no-such-command"}).code == fptlab::cli::kUsage);
  CHECK(run({"kendall", "--bogus", "1"}).code == fptlab::cli::kUsage);
  CHECK(run({"kendall", "--t", "abc"}).code == fptlab::cli::kUsage);
  CHECK(run({"kendall", "--help"}).code == fptlab::cli::kOk);

  CHECK(run({"kendall", "--t", "-1"}).code == fptlab::cli::kValidation);
  CHECK(run({"cond-prob", "--z", "0"}).code == fptlab::cli::kValidation);
  CHECK(run({"cond-prob", "--linear", "1", "--z", "0"}).code == fptlab::cli::kValidation);
  CHECK(run({"cond-prob", "--linear", "1,1", "--constant", "2", "--z", "0"}).code == fptlab::cli::kValidation);
  CHECK(run({"gateaux", "--linear", "1,1", "--model", "ou:1"}).code == fptlab::cli::kValidation);

  CHECK(run({"verify-example1", "--tol", "1e-300"}).code == fptlab::cli::kNumerical);
}

TEST_CASE("output does not depend on the worker count") {
  const std::vector<std::vector<std::string>> commands = {
      {"cond-prob", "--model", "ou:0.5", "--linear", "1,0.5", "--z", "0.2", "--n", "3000", "--step", "0.01", "--seed", "99"},
      {"estimate-f", "--constant", "1", "--n", "1000", "--step", "0.01", "--seed", "99"},
      {"fpt-density", "--daniels", "0.5,0.5,0.5", "--n", "3000", "--step", "0.01", "--seed", "99"},
      {"gateaux", "--linear", "1,1", "--n-meander", "1500", "--meander-steps", "100", "--seed", "99"},
      {"gateaux", "--linear", "1,1", "--fpt", "mc", "--n-fpt", "1500", "--n-meander", "700", "--meander-steps", "100",
       "--step", "0.01", "--seed", "99"},
  };
  for (const auto& cmd : commands) {
    setenv("FPTLAB_THREADS", "1", 1);
    const auto a = run(cmd);
    setenv("FPTLAB_THREADS", "3", 1);
    const auto b = run(cmd);
    unsetenv("FPTLAB_THREADS");
    REQUIRE(a.code == 0);
    CHECK(strip_wall_time(a.out) == strip_wall_time(b.out));
  }
}
