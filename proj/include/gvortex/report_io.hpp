#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gvortex/config.hpp"
#include "gvortex/coupled2d.hpp"
#include "gvortex/diagnostics.hpp"
#include "gvortex/linear1d.hpp"
#include "gvortex/oscillator.hpp"
#include "gvortex/params.hpp"
#include "gvortex/validation.hpp"

namespace gvortex {

using ojson = nlohmann::ordered_json;

inline constexpr const char* kToolName = "gvortex";
inline constexpr const char* kToolVersion = "0.1.0";

/// Header plus rows of already formatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string str() const;
};

/// Quotes a cell when it holds a comma, quote or line break.
std::string csv_cell(const std::string& s);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const ojson& j);
void write_csv(const std::filesystem::path& path, const CsvTable& t);

ojson to_json(const ScaledParams& p);
ojson to_json(const TrapParams& p);
ojson to_json(const RegimeTag& t);
ojson to_json(const ModeSelection& s);
ojson to_json(const CorrectionResult& c);
ojson to_json(const MinimizeReport& r);
ojson to_json(const EnergyBreakdown& e);
ojson to_json(const VortexReport& v);
ojson to_json(const InteractionReport& r);
ojson to_json(const ValidationReport& r);
ojson to_json(const RunConfig& c);

/// Resolved config and tool version; no timestamps, so reruns are identical.
ojson manifest(const std::string& command, const RunConfig& c, const std::vector<std::string>& outputs);

/// state.json (parameters, mode range, grid) and modes/mode_<n>.csv (r, re, im).
std::vector<std::string> save_state(const std::filesystem::path& dir, const CondensateState& s);
CondensateState load_state(const std::filesystem::path& dir);

}  // namespace gvortex
