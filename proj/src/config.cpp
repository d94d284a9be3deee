#include "gvortex/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>

namespace gvortex {

ConfigError::ConfigError(const std::string& source, int line, const std::string& msg)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + msg : source + ": " + msg),
      line_(line) {}

RunConfig default_run_config() {
  RunConfig c;
  c.scaled = ScaledParams{100.0, 0.5, 1.0};
  return c;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> e, std::string source) : entries_(std::move(e)), source_(std::move(source)) {}

  bool has(const std::string& k) const { return entries_.count(k) != 0; }

  double number(const std::string& k, double fallback) {
    auto it = entries_.find(k);
    if (it == entries_.end()) return fallback;
    used_.insert(k);
    const std::string& v = it->second.value;
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
      throw ConfigError(source_, it->second.line, "key '" + k + "': not a number: '" + v + "'");
    }
    return out;
  }

  double required(const std::string& k) {
    if (!has(k)) throw ConfigError(source_, 0, "missing key '" + k + "'");
    return number(k, 0.0);
  }

  std::uint64_t count(const std::string& k, std::uint64_t fallback) {
    auto it = entries_.find(k);
    if (it == entries_.end()) return fallback;
    used_.insert(k);
    const std::string& v = it->second.value;
    std::uint64_t out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
      throw ConfigError(source_, it->second.line, "key '" + k + "': not a non-negative integer: '" + v + "'");
    }
    return out;
  }

  std::string text(const std::string& k, const std::string& fallback) {
    auto it = entries_.find(k);
    if (it == entries_.end()) return fallback;
    used_.insert(k);
    return it->second.value;
  }

  int line(const std::string& k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? 0 : it->second.line;
  }

  void reject_unused() const {
    const Entry* first = nullptr;
    std::string name;
    for (const auto& [k, e] : entries_) {
      if (used_.count(k)) continue;
      if (!first || e.line < first->line) {
        first = &e;
        name = k;
      }
    }
    if (first) throw ConfigError(source_, first->line, "unknown key '" + name + "'");
  }

  const std::string& source() const { return source_; }

 private:
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
  std::string source_;
};

void read_flow(Reader& r, const std::string& prefix, FlowParams& f, bool coupled) {
  f.dt = r.number(prefix + "dt", f.dt);
  f.max_iter = r.count(prefix + "max_iter", f.max_iter);
  f.tol_energy = r.number(prefix + "tol_energy", f.tol_energy);
  f.tol_residual = r.number(prefix + "tol_residual", f.tol_residual);
  f.shift_margin = r.number(prefix + "shift_margin", f.shift_margin);
  if (coupled) {
    f.relax_dt = r.number(prefix + "relax_dt", f.relax_dt);
    f.relax_time = r.number(prefix + "relax_time", f.relax_time);
  }
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line_no, "empty key");
    if (value.empty()) throw ConfigError(source, line_no, "key '" + key + "' has no value");
    if (entries.count(key)) {
      throw ConfigError(source, line_no,
                        "duplicate key '" + key + "' (first set on line " + std::to_string(entries[key].line) + ")");
    }
    entries[key] = Entry{value, line_no};
  }

  Reader r(std::move(entries), source);
  RunConfig c;
  c.source = source;
  const bool scaled = r.has("omega") || r.has("d_omega");
  const bool phys = r.has("omega_phys") || r.has("k_trap");
  if (scaled && phys) {
    const int l = std::max(r.line("omega_phys"), r.line("k_trap"));
    throw ConfigError(source, l, "ambiguous parameters: both scaled (omega, d_omega) and physical (omega_phys, k_trap) keys given");
  }
  if (phys) {
    c.physical = true;
    c.trap.Omega = r.required("omega_phys");
    c.trap.k = r.required("k_trap");
    c.trap.G = r.required("g_coupling");
    try {
      c.scaled = scale_parameters(c.trap);
    } catch (const std::exception& e) {
      throw ConfigError(source, r.line("omega_phys"), e.what());
    }
  } else {
    if (!scaled) throw ConfigError(source, 0, "missing key 'omega' (or 'omega_phys')");
    c.scaled.omega = r.required("omega");
    c.scaled.D_Omega = r.required("d_omega");
    c.scaled.G = r.required("g_coupling");
    try {
      validate(c.scaled);
    } catch (const std::exception& e) {
      throw ConfigError(source, r.line("omega"), e.what());
    }
  }

  c.grid.width_multiplier = r.number("grid_width", c.grid.width_multiplier);
  c.grid.points_per_width = r.count("grid_points_per_width", c.grid.points_per_width);
  c.window_a = r.number("window_a", c.window_a);
  c.seed = r.count("seed", c.seed);
  c.threads = static_cast<unsigned>(r.count("threads", c.threads));
  c.out_dir = r.text("out", c.out_dir);
  c.n_theta = r.count("n_theta", c.n_theta);
  c.hole_delta = r.number("hole_delta", c.hole_delta);
  read_flow(r, "nl_", c.single_flow, false);
  read_flow(r, "min_", c.coupled_flow, true);
  r.reject_unused();

  auto check = [&](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(source, r.line(key), "key '" + key + "': " + what);
  };
  check(c.grid.width_multiplier >= 6.0, "grid_width", "must be at least 6");
  check(c.grid.points_per_width >= 4, "grid_points_per_width", "must be at least 4");
  check(c.window_a > 0.0, "window_a", "must be positive");
  check(c.seed > 0, "seed", "must be positive");
  check(c.hole_delta >= 0.0, "hole_delta", "must be non-negative");
  try {
    validate(c.single_flow);
  } catch (const std::exception& e) {
    throw ConfigError(source, 0, std::string("nl_* flow settings: ") + e.what());
  }
  c.coupled_flow.seed = c.seed;
  try {
    validate(c.coupled_flow);
  } catch (const std::exception& e) {
    throw ConfigError(source, 0, std::string("min_* flow settings: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  return parse_config(in, path);
}

std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> e;
  if (c.physical) {
    e.emplace_back("omega_phys", format_double(c.trap.Omega));
    e.emplace_back("k_trap", format_double(c.trap.k));
  }
  e.emplace_back("omega", format_double(c.scaled.omega));
  e.emplace_back("d_omega", format_double(c.scaled.D_Omega));
  e.emplace_back("g_coupling", format_double(c.scaled.G));
  e.emplace_back("grid_width", format_double(c.grid.width_multiplier));
  e.emplace_back("grid_points_per_width", std::to_string(c.grid.points_per_width));
  e.emplace_back("window_a", format_double(c.window_a));
  e.emplace_back("seed", std::to_string(c.seed));
  e.emplace_back("threads", std::to_string(c.threads));
  e.emplace_back("n_theta", std::to_string(c.n_theta));
  e.emplace_back("hole_delta", format_double(c.hole_delta));
  auto flow = [&](const std::string& p, const FlowParams& f, bool coupled) {
    e.emplace_back(p + "dt", format_double(f.dt));
    e.emplace_back(p + "max_iter", std::to_string(f.max_iter));
    e.emplace_back(p + "tol_energy", format_double(f.tol_energy));
    e.emplace_back(p + "tol_residual", format_double(f.tol_residual));
    e.emplace_back(p + "shift_margin", format_double(f.shift_margin));
    if (coupled) {
      e.emplace_back(p + "relax_dt", format_double(f.relax_dt));
      e.emplace_back(p + "relax_time", format_double(f.relax_time));
    }
  };
  flow("nl_", c.single_flow, false);
  flow("min_", c.coupled_flow, true);
  e.emplace_back("out", c.out_dir);
  return e;
}

}  // namespace gvortex
