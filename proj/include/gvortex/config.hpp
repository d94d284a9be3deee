#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gvortex/flow.hpp"
#include "gvortex/linear1d.hpp"
#include "gvortex/params.hpp"

namespace gvortex {

/// Everything a CLI run needs. Parameter keys come either in scaled form
/// (omega, d_omega, g_coupling) or physical form (omega_phys, k_trap,
/// g_coupling); mixing the two is rejected.
///
/// Optional keys and defaults:
///   grid_width = 15, grid_points_per_width = 40, window_a = 2,
///   seed = 1, threads = 0 (hardware), out = "out",
///   n_theta = 0 (automatic), hole_delta = 1,
///   nl_dt, nl_max_iter, nl_tol_energy, nl_tol_residual, nl_shift_margin
///     (FlowParams::single_mode()),
///   min_dt, min_max_iter, min_tol_energy, min_tol_residual, min_shift_margin,
///   min_relax_dt, min_relax_time (FlowParams::coupled()).
struct RunConfig {
  bool physical = false;
  TrapParams trap;
  ScaledParams scaled;
  GridOptions grid;
  double window_a = kDefaultWindowConstant;
  FlowParams single_flow = FlowParams::single_mode();
  FlowParams coupled_flow = FlowParams::coupled();
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::size_t n_theta = 0;
  double hole_delta = 1.0;
  std::string source = "<defaults>";
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

/// omega = 100, d_omega = 0.5, g_coupling = 1 and the defaults above.
RunConfig default_run_config();

RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Resolved key/value pairs in a fixed order, values printed to round-trip.
std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& c);

/// 17 significant digits.
std::string format_double(double x);

}  // namespace gvortex
