#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slipt/table.hpp"

namespace slipt {

/// Outcome of one acceptance criterion.  `measured` is normalized so that
/// measured <= limit means pass; `detail` carries the raw numbers.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct ValidationOptions {
  std::uint64_t seed = 20240001;
  /// Fault-injection knob: scales the model-side junction series resistances
  /// while the circuit oracle keeps the true values.  1.0 = healthy run.
  double fault_rsigma_scale = 1.0;
  int jobs = 1;
  /// Criterion ids to run; empty means the full battery.
  std::vector<int> criteria;
};

/// The full cross-model / oracle / Monte-Carlo battery.  Runs in minutes on a
/// laptop; every tolerance is pinned in code.
std::vector<CriterionResult> run_acceptance_battery(const ValidationOptions& options = {});

Table validation_table(const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace slipt
