#pragma once

#include <functional>
#include <string>
#include <vector>

namespace gvortex {

enum class Relation {
  Near,     // |computed - predicted| <= tolerance
  AtMost,   // computed <= predicted + tolerance
  AtLeast,  // computed >= predicted - tolerance
  Above,    // computed > predicted
  Below,    // computed < predicted
};

std::string to_string(Relation r);

struct Measurement {
  std::string label;
  double predicted = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::Near;
  bool pass = false;
  double margin = 0.0;  // >= 0 exactly when pass; scaled by the tolerance or bound
};

Measurement make_measurement(std::string label, Relation rel, double predicted, double computed,
                             double tolerance = 0.0);

struct CheckRecord {
  int id = 0;
  std::string name;
  std::string title;
  std::vector<Measurement> measurements;
  bool pass = false;
  bool skipped = false;
  std::string error;  // set when the check threw
  double seconds = 0.0;
  // Headline: the first failing measurement, else the one with least margin.
  double predicted = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
};

struct ValidationReport {
  std::vector<CheckRecord> records;
  bool pass = false;  // every non-skipped record passes
  double seconds = 0.0;
};

struct ValidationOptions {
  bool quick = false;               // omega <= 100 subset
  std::vector<std::string> only;    // names or numeric ids; empty runs all
  double D_Omega = 0.5;
};

struct CheckInfo {
  int id;
  const char* name;
  const char* title;
  bool quick;  // part of the quick subset
};

const std::vector<CheckInfo>& check_catalog();

/// Runs the selected checks in catalog order. Shared results (mode sweeps,
/// minimizations) are computed once per run. `progress` is called after
/// each record.
ValidationReport run_validation(const ValidationOptions& options,
                                const std::function<void(const CheckRecord&)>& progress = {});

}  // namespace gvortex
