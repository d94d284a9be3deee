// Runs every acceptance criterion at its pinned tolerance and prints one
// line per criterion. Exit status is nonzero when any criterion fails.
#include <cstdio>
#include <exception>

#include "gvortex/validation.hpp"

int main() {
  using namespace gvortex;
  try {
    ValidationOptions opts;
    const auto rep = run_validation(opts, [](const CheckRecord& r) {
      std::printf("[%2d] %-28s %s  computed=%.6g predicted=%.6g tol=%.3g  (%.2fs)\n", r.id, r.name.c_str(),
                  r.pass ? "PASS" : "FAIL", r.computed, r.predicted, r.tolerance, r.seconds);
      if (!r.error.empty()) std::printf("      error: %s\n", r.error.c_str());
      if (!r.pass) {
        for (const auto& m : r.measurements) {
          std::printf("      %s %s: computed=%.6g %s predicted=%.6g tol=%.3g\n", m.pass ? "ok  " : "FAIL",
                      m.label.c_str(), m.computed, to_string(m.relation).c_str(), m.predicted, m.tolerance);
        }
      }
      std::fflush(stdout);
    });
    int failed = 0;
    for (const auto& r : rep.records) failed += r.pass ? 0 : 1;
    std::printf("%zu criteria, %d failed (%.1fs)\n", rep.records.size(), failed, rep.seconds);
    return rep.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::printf("acceptance run aborted: %s\n", e.what());
    return 2;
  }
}
