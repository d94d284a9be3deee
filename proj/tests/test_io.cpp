#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "gvortex/config.hpp"
#include "gvortex/coupled2d.hpp"
#include "gvortex/oscillator.hpp"
#include "gvortex/report_io.hpp"

using namespace gvortex;
namespace fs = std::filesystem;

namespace {
RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

std::string error_of(const std::string& text, int* line = nullptr) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    if (line) *line = e.line();
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("gvortex_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("physical parameters are scaled") {
  const auto c = parse("# trap\nomega_phys = 3\nk_trap = 1\ng_coupling = 1  # inline\n");
  CHECK(c.physical);
  CHECK(c.scaled.omega == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(c.scaled.D_Omega == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(c.source == "test.cfg");
}

TEST_CASE("scaled parameters and optional keys") {
  const auto c = parse(
      "omega = 50\nd_omega = 0.3\ng_coupling = 2\n\ngrid_width = 12\ngrid_points_per_width = 60\nwindow_a = 1.5\n"
      "seed = 9\nout = results/run1\nmin_relax_time = 5\nnl_max_iter = 123\n");
  CHECK_FALSE(c.physical);
  CHECK(c.scaled.omega == 50.0);
  CHECK(c.scaled.D_Omega == 0.3);
  CHECK(c.scaled.G == 2.0);
  CHECK(c.grid.width_multiplier == 12.0);
  CHECK(c.grid.points_per_width == 60);
  CHECK(c.window_a == 1.5);
  CHECK(c.seed == 9);
  CHECK(c.out_dir == "results/run1");
  CHECK(c.coupled_flow.relax_time == 5.0);
  CHECK(c.single_flow.max_iter == 123);
  CHECK(c.coupled_flow.max_iter == FlowParams::coupled().max_iter);
}

TEST_CASE("config errors name the key and line") {
  int line = 0;
  auto msg = error_of("omega = 100\nd_omega = 0.5\n", &line);
  CHECK(msg.find("g_coupling") != std::string::npos);
  msg = error_of("omega_phys = 3\ng_coupling = 1\n");
  CHECK(msg.find("k_trap") != std::string::npos);
  msg = error_of("omega = 100\nd_omega = 0.5\ng_coupling = 1\nomega_phys = 3\nk_trap = 1\n");
  CHECK(msg.find("ambig") != std::string::npos);
  msg = error_of("omega = 100\nd_omega = 0.5\ng_coupling = 1\nomega = 3\n", &line);
  CHECK(line == 4);
  msg = error_of("omega = 100\nd_omega = 0.5\ng_coupling = 1\ncolour = blue\n", &line);
  CHECK(line == 4);
  CHECK(msg.find("colour") != std::string::npos);
  msg = error_of("omega = abc\nd_omega = 0.5\ng_coupling = 1\n", &line);
  CHECK(line == 1);
  msg = error_of("omega =\nd_omega = 0.5\ng_coupling = 1\n", &line);
  CHECK(line == 1);
  msg = error_of("omega 100\n", &line);
  CHECK(line == 1);
  CHECK_FALSE(error_of("omega = 100\nd_omega = 1.5\ng_coupling = 1\n").empty());
  CHECK_FALSE(error_of("omega_phys = 0.9\nk_trap = 1\ng_coupling = 1\n").empty());
  CHECK_THROWS(load_config("/nonexistent/definitely/missing.cfg"));
}

TEST_CASE("resolved entries round-trip through the parser") {
  auto c = parse("omega = 123.456789012345\nd_omega = 0.3\ng_coupling = 0.1\nseed = 77\nmin_dt = 0.25\n");
  std::string text;
  for (const auto& [k, v] : resolved_entries(c)) text += k + " = " + v + "\n";
  const auto d = parse(text);
  CHECK(resolved_entries(c) == resolved_entries(d));
  CHECK(d.scaled.omega == c.scaled.omega);
  CHECK(d.coupled_flow.dt == 0.25);
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("CSV formatting") {
  CHECK(csv_cell("plain") == "plain");
  CHECK(csv_cell("a,b") == "\"a,b\"");
  CHECK(csv_cell("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_cell("two\nlines") == "\"two\nlines\"");
  CsvTable t;
  t.header = {"n", "note"};
  t.add({"1", "x,y"});
  CHECK(t.str() == "n,note\r\n1,\"x,y\"\r\n");
  CHECK_THROWS(t.add({"only one"}));
}

TEST_CASE("JSON outputs") {
  const auto m = ModeProblem::make(100, 100.0, 0.5);
  const auto j = to_json(compute_corrections(m, 1.0));
  for (const char* k : {"n", "P_coeffs", "K_prime", "J_prime", "lambda1_asym", "gamma_asym"}) CHECK(j.contains(k));
  CHECK(j["n"] == 100);
  const auto dir = scratch("json");
  write_json(dir / "a" / "x.json", j);
  const auto back = ojson::parse(slurp(dir / "a" / "x.json"));
  CHECK(back == j);
  CHECK(back["K_prime"].get<double>() == compute_K_prime(m));
  const auto man = manifest("modes", default_run_config(), {"modes.csv"});
  CHECK(man["command"] == "modes");
  CHECK_FALSE(man.contains("timestamp"));
  CHECK_FALSE(man.contains("date"));
  CHECK(manifest("modes", default_run_config(), {"modes.csv"}).dump() == man.dump());
  fs::remove_all(dir);
}

TEST_CASE("state save and load") {
  const ScaledParams p{50.0, 0.5, 1.0};
  const auto range = default_mode_range(50.0);
  const auto grid = shared_grid(p, range);
  const auto table = linear_table(p, range, grid);
  const auto s = initial_state(p, range, grid, table, 5);
  const auto dir = scratch("state");
  const auto files = save_state(dir, s);
  CHECK(files.size() == range.size() + 1);
  const auto t = load_state(dir);
  CHECK(t.range.lo == range.lo);
  CHECK(t.range.hi == range.hi);
  CHECK(t.grid == grid);
  CHECK(t.params.omega == p.omega);
  for (int n = range.lo; n <= range.hi; ++n) CHECK(t.mode(n).values == s.mode(n).values);
  CHECK(energy_F_omega(t).total == energy_F_omega(s).total);
  const auto first = slurp(dir / "modes" / ("mode_" + std::to_string(range.lo) + ".csv"));
  save_state(dir, t);
  CHECK(slurp(dir / "modes" / ("mode_" + std::to_string(range.lo) + ".csv")) == first);
  fs::remove(dir / "modes" / ("mode_" + std::to_string(range.lo + 3) + ".csv"));
  CHECK_THROWS(load_state(dir));
  fs::remove_all(dir);
}
