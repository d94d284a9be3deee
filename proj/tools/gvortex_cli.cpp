#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gvortex/config.hpp"
#include "gvortex/coupled2d.hpp"
#include "gvortex/diagnostics.hpp"
#include "gvortex/linear1d.hpp"
#include "gvortex/nonlinear1d.hpp"
#include "gvortex/oscillator.hpp"
#include "gvortex/parallel.hpp"
#include "gvortex/report_io.hpp"
#include "gvortex/validation.hpp"

namespace fs = std::filesystem;
using namespace gvortex;

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kUsage = 2, kNumerical = 3 };

struct Shared {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> omega, d_omega, g;
};

RunConfig resolve(const Shared& sh) {
  RunConfig c = sh.config_path.empty() ? default_run_config() : load_config(sh.config_path);
  if (!sh.out.empty()) c.out_dir = sh.out;
  if (sh.seed) {
    if (*sh.seed == 0) throw ConfigError("--seed", 0, "seed must be positive");
    c.seed = *sh.seed;
    c.coupled_flow.seed = *sh.seed;
  }
  if (sh.threads) c.threads = *sh.threads;
  if (sh.omega || sh.d_omega || sh.g) {
    if (sh.omega) c.scaled.omega = *sh.omega;
    if (sh.d_omega) c.scaled.D_Omega = *sh.d_omega;
    if (sh.g) c.scaled.G = *sh.g;
    c.physical = false;
    validate(c.scaled);
  }
  set_thread_count(c.threads);
  return c;
}

void finish(const RunConfig& c, const std::string& command, std::vector<std::string> outputs) {
  write_json(fs::path(c.out_dir) / "manifest.json", manifest(command, c, outputs));
  std::cout << "wrote " << (fs::path(c.out_dir) / "manifest.json").string() << "\n";
}

int cmd_scale(const RunConfig& c) {
  ojson j;
  if (c.physical) j["physical"] = to_json(c.trap);
  j["scaled"] = to_json(c.scaled);
  j["regime"] = to_json(classify_regime(c.scaled));
  std::cout << j.dump(2) << "\n";
  write_json(fs::path(c.out_dir) / "scale.json", j);
  finish(c, "scale", {"scale.json"});
  return kOk;
}

int cmd_modes(const RunConfig& c) {
  const auto& p = c.scaled;
  const auto window = mode_window(p.omega, c.window_a);
  const auto recs = sweep_linear_modes(p.omega, p.D_Omega, window.indices, c.grid);
  const auto sel = select_nstar(p.omega, p.D_Omega, window, lambda_table(recs));
  CsvTable t;
  t.header = {"n",         "R_n",       "h_n",       "lambda1",     "lambda2", "lambda1_asym",
              "gap_over_sqrtVpp", "residual1", "residual2", "grid_points", "n_star"};
  for (const auto& r : recs) {
    const double sv = std::sqrt(Vn_derivative(r.mode, 2, r.mode.R_n) / 2.0);
    t.add({std::to_string(r.mode.n), format_double(r.mode.R_n), format_double(r.mode.h_n),
           format_double(r.eigen.lambda1), format_double(r.eigen.lambda2), format_double(asymptotic_lambda1(r.mode)),
           format_double((r.eigen.lambda2 - r.eigen.lambda1) / sv), format_double(r.eigen.residual_norms[0]),
           format_double(r.eigen.residual_norms[1]), std::to_string(r.grid.size()),
           r.mode.n == sel.n_star ? "1" : "0"});
  }
  const fs::path out(c.out_dir);
  write_csv(out / "modes.csv", t);
  ojson j = to_json(sel);
  j["window_a"] = window.a_constant;
  j["window_size"] = window.indices.size();
  j["energy_floor"] = window.energy_floor;
  write_json(out / "selection.json", j);
  std::cout << "n* = " << sel.n_star << " (N = " << format_double(sel.N_real) << ", " << recs.size() << " modes)\n";
  finish(c, "modes", {"modes.csv", "selection.json"});
  return kOk;
}

int cmd_corrections(const RunConfig& c, std::optional<int> n_opt) {
  const auto& p = c.scaled;
  int n = 0;
  if (n_opt) {
    n = *n_opt;
  } else {
    const auto window = mode_window(p.omega, c.window_a);
    const auto recs = sweep_linear_modes(p.omega, p.D_Omega, window.indices, c.grid, 1);
    n = select_nstar(p.omega, p.D_Omega, window, lambda_table(recs)).n_star;
  }
  const auto m = ModeProblem::make(n, p.omega, p.D_Omega);
  const auto corr = compute_corrections(m, p.G);
  const auto eig = solve_linear_modes(m, build_grid(m, c.grid.width_multiplier, c.grid.points_per_width), 1);
  ojson j = to_json(corr);
  j["lambda1_numeric"] = eig.lambda1;
  j["lambda1_minus_asym"] = eig.lambda1 - corr.lambda1_asym;
  const auto mt = moment_integrals();
  j["moments"] = ojson{{"xi1_fourth", mt.xi1_fourth}, {"x2_xi1_sq", mt.x2_xi1_sq}, {"x4_xi1_sq", mt.x4_xi1_sq}};
  const fs::path out(c.out_dir);
  write_json(out / "corrections.json", j);
  CsvTable t;
  t.header = {"j", "P", "Q", "tau"};
  const std::size_t J = std::max({corr.P_expansion.size(), corr.Q_expansion.size(), corr.tau_expansion.size()});
  for (std::size_t k = 0; k < J; ++k) {
    t.add({std::to_string(k), format_double(corr.P_expansion[k]), format_double(corr.Q_expansion[k]),
           format_double(corr.tau_expansion[k])});
  }
  write_csv(out / "expansions.csv", t);
  std::cout << "n = " << n << " K' = " << format_double(corr.K_prime_n) << " J' = " << format_double(corr.J_prime_n)
            << "\n";
  finish(c, "corrections", {"corrections.json", "expansions.csv"});
  return kOk;
}

int cmd_nonlinear(const RunConfig& c) {
  const auto& p = c.scaled;
  const auto window = mode_window(p.omega, c.window_a);
  const auto gp = gamma_profile(p.omega, p.D_Omega, p.G, window, c.grid, c.single_flow);
  CsvTable t;
  t.header = {"n", "gamma", "gamma_asym", "multiplier", "residual", "iterations", "lambda1", "n_star"};
  for (std::size_t k = 0; k < gp.results.size(); ++k) {
    const auto& r = gp.results[k];
    t.add({std::to_string(r.n), format_double(r.gamma_n), format_double(asymptotic_gamma(gp.linear[k].mode, p.G)),
           format_double(r.multiplier), format_double(r.el_residual), std::to_string(r.iterations),
           format_double(gp.linear[k].eigen.lambda1), r.n == gp.selection.n_star ? "1" : "0"});
  }
  const fs::path out(c.out_dir);
  write_csv(out / "gamma.csv", t);
  write_json(out / "gamma_selection.json", to_json(gp.selection));
  std::cout << "argmin gamma_n = " << gp.selection.n_star << "\n";
  finish(c, "nonlinear", {"gamma.csv", "gamma_selection.json"});
  return kOk;
}

int cmd_minimize(const RunConfig& c, std::optional<int> halfwidth) {
  const auto& p = c.scaled;
  auto range = default_mode_range(p.omega);
  if (halfwidth) {
    if (*halfwidth < 1) throw std::invalid_argument("--modes-halfwidth must be at least 1");
    const int center = static_cast<int>(std::lround(p.omega));
    range = ModeRange{center - *halfwidth, center + *halfwidth};
  }
  const auto grid = shared_grid(p, range, c.grid);
  const auto table = linear_table(p, range, grid);
  const auto init = initial_state(p, range, grid, table, c.seed);
  MinimizeReport rep;
  auto s = minimize_full(init, c.coupled_flow, table, &rep);
  int n_star = range.lo;
  for (const auto& r : table) {
    if (r.eigen.lambda1 < table[static_cast<std::size_t>(n_star - range.lo)].eigen.lambda1) n_star = r.mode.n;
  }
  const fs::path out(c.out_dir);
  auto outputs = save_state(out, s);
  const auto breakdown = energy_F_omega(s);
  const auto spectrum = mode_mass_spectrum(s, n_star);
  ojson masses = ojson::object();
  for (std::size_t k = 0; k < spectrum.n.size(); ++k) masses[std::to_string(spectrum.n[k])] = spectrum.mass[k];
  ojson j;
  j["params"] = to_json(p);
  j["seed"] = c.seed;
  j["I_omega"] = breakdown.total;
  j["mu_omega"] = chemical_potential(s);
  j["n_star_linear"] = n_star;
  j["per_mode_masses"] = masses;
  j["moment"] = spectrum.moment;
  j["quartic"] = breakdown.quartic;
  j["breakdown"] = to_json(breakdown);
  j["report"] = to_json(rep);
  write_json(out / "minimize.json", j);
  CsvTable t;
  t.header = {"n", "mass", "lambda1"};
  for (std::size_t k = 0; k < spectrum.n.size(); ++k) {
    t.add({std::to_string(spectrum.n[k]), format_double(spectrum.mass[k]), format_double(table[k].eigen.lambda1)});
  }
  write_csv(out / "mode_masses.csv", t);
  outputs.insert(outputs.end(), {"minimize.json", "mode_masses.csv"});
  std::cout << "F = " << format_double(rep.energy) << " after " << rep.iterations << " iterations\n";
  finish(c, "minimize", outputs);
  return kOk;
}

int cmd_report(const RunConfig& c, const std::string& in_dir) {
  const auto s = load_state(in_dir);
  const auto& p = s.params;
  const auto table = linear_table(p, s.range, s.grid);
  int n_star = s.range.lo;
  for (const auto& r : table) {
    if (r.eigen.lambda1 < table[static_cast<std::size_t>(n_star - s.range.lo)].eigen.lambda1) n_star = r.mode.n;
  }
  const std::size_t nt = c.n_theta ? c.n_theta : default_angular_points(s);
  const auto vr = analyze_vortex(s, table, mode_window(p.omega, c.window_a), c.hole_delta, nt);
  const auto& g1 = table[static_cast<std::size_t>(n_star - s.range.lo)].eigen.g1;
  ojson j = to_json(vr);
  j["n_star"] = n_star;
  j["n_theta"] = nt;
  j["interaction"] = to_json(interaction_lower_bound_report(s, g1, n_star));
  j["density_deviation"] = density_deviation(s, g1);
  const fs::path out(c.out_dir);
  write_json(out / "vortex_report.json", j);
  const auto prof = radial_profile(reconstruct_2d(s, nt));
  CsvTable t;
  t.header = {"r", "abs_max", "abs_min", "winding"};
  for (std::size_t i = 0; i < prof.r.size(); ++i) {
    t.add({format_double(prof.r[i]), format_double(prof.abs_max[i]), format_double(prof.abs_min[i]),
           format_double(prof.winding[i])});
  }
  write_csv(out / "profile.csv", t);
  std::cout << "winding at r=1: " << vr.winding_at_r1 << " (n* = " << n_star << ")\n";
  finish(c, "report", {"vortex_report.json", "profile.csv"});
  return kOk;
}

int cmd_validate(const RunConfig& c, const std::vector<std::string>& only, bool quick) {
  ValidationOptions o;
  o.only = only;
  o.quick = quick;
  o.D_Omega = 0.5;
  const auto rep = run_validation(o, [](const CheckRecord& r) {
    std::printf("[%2d] %-28s %s  computed=%.6g predicted=%.6g tol=%.3g  (%.2fs)%s%s\n", r.id, r.name.c_str(),
                r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL"), r.computed, r.predicted, r.tolerance, r.seconds,
                r.error.empty() ? "" : "  error: ", r.error.c_str());
    std::fflush(stdout);
  });
  write_json(fs::path(c.out_dir) / "validation.json", to_json(rep));
  std::printf("overall: %s (%.1fs)\n", rep.pass ? "PASS" : "FAIL", rep.seconds);
  finish(c, "validate", {"validation.json"});
  return rep.pass ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Giant-vortex mode reduction toolkit"};
  app.require_subcommand(1);
  Shared sh;
  auto shared_flags = [&](CLI::App* sub) {
    sub->add_option("--config", sh.config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", sh.out, "output directory (overrides the config)");
    sub->add_option("--seed", sh.seed, "random seed (overrides the config)");
    sub->add_option("--threads", sh.threads, "worker threads, 0 = hardware");
    sub->add_option("--omega", sh.omega, "override omega");
    sub->add_option("--d", sh.d_omega, "override D_Omega");
    sub->add_option("--g", sh.g, "override G");
  };
  auto* scale = app.add_subcommand("scale", "echo scaled parameters and regime");
  auto* modes = app.add_subcommand("modes", "linear mode sweep over the window");
  auto* corr = app.add_subcommand("corrections", "oscillator corrections for one mode");
  std::optional<int> corr_n;
  corr->add_option("--n", corr_n, "mode index (default: n*)");
  auto* nonlin = app.add_subcommand("nonlinear", "nonlinear single-mode energies over the window");
  auto* mini = app.add_subcommand("minimize", "full multi-mode minimization");
  std::optional<int> halfwidth;
  std::optional<std::size_t> max_iter;
  mini->add_option("--modes-halfwidth", halfwidth, "mode range round(omega) +- this (default ceil(2 sqrt(omega)))");
  mini->add_option("--max-iter", max_iter, "descent iteration cap");
  auto* report = app.add_subcommand("report", "vortex diagnostics of a minimize directory");
  std::string in_dir;
  report->add_option("--in", in_dir, "directory written by minimize")->required()->check(CLI::ExistingDirectory);
  auto* validate = app.add_subcommand("validate", "run the acceptance checks");
  std::vector<std::string> only;
  bool quick = false;
  validate->add_option("--only", only, "check names or ids")->delimiter(',');
  validate->add_flag("--quick", quick, "omega <= 100 subset");
  for (auto* s : {scale, modes, corr, nonlin, mini, report, validate}) shared_flags(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  RunConfig cfg;
  try {
    cfg = resolve(sh);
    if (max_iter) {
      cfg.coupled_flow.max_iter = *max_iter;
      gvortex::validate(cfg.coupled_flow);
    }
    for (const auto& s : only) {
      bool known = false;
      for (const auto& c : check_catalog()) known = known || s == c.name || s == std::to_string(c.id);
      if (!known) throw ConfigError("--only", 0, "unknown check '" + s + "'");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*scale) return cmd_scale(cfg);
    if (*modes) return cmd_modes(cfg);
    if (*corr) return cmd_corrections(cfg, corr_n);
    if (*nonlin) return cmd_nonlinear(cfg);
    if (*mini) return cmd_minimize(cfg, halfwidth);
    if (*report) return cmd_report(cfg, in_dir);
    if (*validate) return cmd_validate(cfg, only, quick);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
