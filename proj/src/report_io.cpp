#include "gvortex/report_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gvortex {

namespace fs = std::filesystem;

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::logic_error("CsvTable: row width does not match header");
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream o;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) o << (k ? "," : "") << csv_cell(cells[k]);
    o << "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return o.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const fs::path& path, const ojson& j) { write_text(path, j.dump(2) + "\n"); }

void write_csv(const fs::path& path, const CsvTable& t) { write_text(path, t.str()); }

ojson to_json(const ScaledParams& p) {
  return ojson{{"omega", p.omega}, {"d_omega", p.D_Omega}, {"g_coupling", p.G}};
}

ojson to_json(const TrapParams& p) {
  return ojson{{"omega_phys", p.Omega}, {"k_trap", p.k}, {"g_coupling", p.G}};
}

ojson to_json(const RegimeTag& t) {
  return ojson{{"kind", to_string(t.kind)},
               {"ratio_G2_over_omega", t.ratio_G2_over_omega},
               {"fixed_g_eligible", t.fixed_g_eligible}};
}

ojson to_json(const ModeSelection& s) {
  return ojson{{"n_star", s.n_star},       {"n_runner_up", s.n_runner_up}, {"R_min", s.R_min},
               {"N_real", s.N_real},       {"quadratic_coeff", s.quadratic_coeff},
               {"vertex", s.vertex},       {"fit_r2", s.fit_r2},           {"degenerate", s.degenerate}};
}

ojson to_json(const CorrectionResult& c) {
  return ojson{{"n", c.n},
               {"G", c.G},
               {"P_coeffs", c.P_coeffs},
               {"K_prime", c.K_prime_n},
               {"J_prime", c.J_prime_n},
               {"lambda1_asym", c.lambda1_asym},
               {"gamma_asym", c.gamma_asym},
               {"P_expansion", c.P_expansion.coefficients},
               {"Q_expansion", c.Q_expansion.coefficients},
               {"tau_expansion", c.tau_expansion.coefficients}};
}

ojson to_json(const MinimizeReport& r) {
  return ojson{{"iterations", r.iterations},
               {"energy", r.energy},
               {"mu", r.mu},
               {"el_residual", r.el_residual},
               {"rejected_steps", r.rejected_steps}};
}

ojson to_json(const EnergyBreakdown& e) {
  return ojson{{"quadratic", e.quadratic}, {"quartic", e.quartic}, {"total", e.total}, {"per_mode", e.per_mode}};
}

ojson to_json(const VortexReport& v) {
  ojson w = ojson::array();
  for (const auto& a : v.annulus_windings) {
    w.push_back(ojson{{"radius", a.radius}, {"winding", a.winding}, {"rounding_residual", a.rounding_residual}});
  }
  ojson zeros = ojson::array();
  for (const auto& [r, th] : v.zeros.points) zeros.push_back(ojson::array({r, th}));
  return ojson{
      {"winding_at_r1", v.winding_at_r1},
      {"winding_residual_at_r1", v.winding_residual_at_r1},
      {"hole_inner_radius", v.hole_inner_radius},
      {"hole_outer_radius", v.hole_outer_radius},
      {"zero_free_annulus", ojson::array({v.zero_free_annulus.first, v.zero_free_annulus.second})},
      {"annulus_windings", w},
      {"windings_unanimous", v.windings_unanimous},
      {"gaussian_fit",
       ojson{{"amplitude", v.gaussian_fit.amplitude},
             {"center", v.gaussian_fit.center},
             {"width", v.gaussian_fit.width},
             {"r_squared", v.gaussian_fit.r_squared}}},
      {"decay_slope", v.decay.sigma},
      {"decay_fit", ojson{{"r_squared", v.decay.r_squared}, {"points", v.decay.points}}},
      {"projection_residual", v.projection_residual},
      {"zeros",
       ojson{{"count", v.zeros.count},
             {"threshold", v.zeros.threshold},
             {"min_ring_distance_sq", v.zeros.min_ring_distance_sq},
             {"points", zeros}}},
      {"hole_check",
       ojson{{"delta", v.hole.delta},
             {"max_in_hole", v.hole.max_in_hole},
             {"min_in_annulus", v.hole.min_in_annulus},
             {"max_overall", v.hole.max_overall},
             {"pass", v.hole.pass}}}};
}

ojson to_json(const InteractionReport& r) {
  return ojson{{"quartic", r.quartic},
               {"leading", r.leading},
               {"moment", r.moment},
               {"c1", r.c1},
               {"c2", r.c2},
               {"lower", r.lower},
               {"c2_required", r.c2_required},
               {"lower_bound_holds", r.lower_bound_holds},
               {"upper_bound_holds", r.upper_bound_holds}};
}

ojson to_json(const ValidationReport& r) {
  ojson checks = ojson::array();
  for (const auto& c : r.records) {
    ojson ms = ojson::array();
    for (const auto& m : c.measurements) {
      ms.push_back(ojson{{"label", m.label},
                         {"predicted", m.predicted},
                         {"computed", m.computed},
                         {"tolerance", m.tolerance},
                         {"relation", to_string(m.relation)},
                         {"pass", m.pass}});
    }
    ojson j{{"id", c.id},
            {"name", c.name},
            {"title", c.title},
            {"predicted", c.predicted},
            {"computed", c.computed},
            {"tolerance", c.tolerance},
            {"pass", c.pass},
            {"skipped", c.skipped},
            {"seconds", c.seconds}};
    if (!c.error.empty()) j["error"] = c.error;
    j["measurements"] = ms;
    checks.push_back(j);
  }
  return ojson{{"pass", r.pass}, {"seconds", r.seconds}, {"checks", checks}};
}

ojson to_json(const RunConfig& c) {
  ojson j = ojson::object();
  for (const auto& [k, v] : resolved_entries(c)) j[k] = v;
  return j;
}

ojson manifest(const std::string& command, const RunConfig& c, const std::vector<std::string>& outputs) {
  return ojson{{"tool", kToolName},
               {"version", kToolVersion},
               {"command", command},
               {"config_source", c.source},
               {"config", to_json(c)},
               {"outputs", outputs}};
}

std::vector<std::string> save_state(const fs::path& dir, const CondensateState& s) {
  ojson meta{{"params", to_json(s.params)},
             {"mode_lo", s.range.lo},
             {"mode_hi", s.range.hi},
             {"grid", ojson{{"r_min", s.grid.r_min()}, {"r_max", s.grid.r_max()}, {"n_points", s.grid.size()}}},
             {"total_mass", s.total_mass}};
  std::vector<std::string> files{"state.json"};
  write_json(dir / "state.json", meta);
  for (std::size_t k = 0; k < s.mode_count(); ++k) {
    const int n = s.range.lo + static_cast<int>(k);
    CsvTable t;
    t.header = {"r", "re", "im"};
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      t.add({format_double(s.grid.r(i)), format_double(s.modes[k][i].real()), format_double(s.modes[k][i].imag())});
    }
    const std::string name = "modes/mode_" + std::to_string(n) + ".csv";
    write_csv(dir / name, t);
    files.push_back(name);
  }
  return files;
}

CondensateState load_state(const fs::path& dir) {
  std::ifstream mf(dir / "state.json");
  if (!mf) throw std::runtime_error("cannot read " + (dir / "state.json").string());
  const auto meta = ojson::parse(mf);
  const ScaledParams p{meta.at("params").at("omega").get<double>(), meta.at("params").at("d_omega").get<double>(),
                       meta.at("params").at("g_coupling").get<double>()};
  const ModeRange range{meta.at("mode_lo").get<int>(), meta.at("mode_hi").get<int>()};
  const auto& g = meta.at("grid");
  const RadialGrid grid(g.at("r_min").get<double>(), g.at("r_max").get<double>(),
                        g.at("n_points").get<std::size_t>());
  CondensateState s(p, range, grid);
  for (int n = range.lo; n <= range.hi; ++n) {
    const fs::path path = dir / ("modes/mode_" + std::to_string(n) + ".csv");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    std::size_t i = 0;
    auto& f = s.mode(n);
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string cell[3];
      for (auto& c : cell) {
        if (!std::getline(ls, c, ',')) throw std::runtime_error(path.string() + ": short row");
      }
      if (i >= grid.size()) throw std::runtime_error(path.string() + ": too many rows");
      f[i++] = cplx(std::strtod(cell[1].c_str(), nullptr), std::strtod(cell[2].c_str(), nullptr));
    }
    if (i != grid.size()) throw std::runtime_error(path.string() + ": expected " + std::to_string(grid.size()) + " rows");
  }
  s.refresh();
  return s;
}

}  // namespace gvortex
