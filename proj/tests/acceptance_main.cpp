// Acceptance suite: runs the full validation battery against the reference
// receiver configurations and prints one PASS/FAIL line per criterion.
// Exit code 0 iff every criterion holds at its pinned tolerance.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "slipt/table.hpp"
#include "slipt/validation.hpp"

int main(int argc, char** argv) {
  slipt::ValidationOptions opt;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--seed") == 0 && k + 1 < argc) {
      opt.seed = std::strtoull(argv[++k], nullptr, 10);
    } else if (std::strcmp(argv[k], "--jobs") == 0 && k + 1 < argc) {
      opt.jobs = std::atoi(argv[++k]);
    }
  }

  const auto results = slipt::run_acceptance_battery(opt);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%s  [%2d] %-45s measured=%-12s limit=%-10s %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), slipt::format_double(r.measured).c_str(),
                slipt::format_double(r.limit).c_str(), r.detail.c_str());
    ok = ok && r.pass;
  }
  const auto passed = std::count_if(results.begin(), results.end(),
                                    [](const slipt::CriterionResult& r) { return r.pass; });
  std::printf("%s: %ld/%zu criteria passed\n", ok ? "ACCEPTED" : "REJECTED",
              static_cast<long>(passed), results.size());
  return ok ? 0 : 1;
}
