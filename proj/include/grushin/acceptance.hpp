#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace grushin {

// One verification criterion: `measured` is the headline statistic compared
// against `threshold` (direction described by `detail`), and `pass` is the
// full verdict including any secondary gates named in the detail line.
struct CriterionResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceConfig {
  bool quick = false;  // trimmed sample counts for smoke runs; not the gate
  std::uint64_t seed = 20260817ull;
};

// Runs the full verification battery in a fixed order.  on_result, when set,
// is invoked after each criterion finishes (for streaming progress lines).
std::vector<CriterionResult> run_acceptance(
    const AcceptanceConfig& cfg,
    const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace grushin
