// End-to-end validation checks shared by the `validate` subcommand and the
// acceptance test binary. Every tolerance is pinned here; a check returns
// its measured statistic, the bound, and pass/fail, and never loosens
// itself at runtime.
#pragma once

#include <string>
#include <vector>

namespace sam {

struct CheckResult {
  std::string name;
  bool pass = false;
  double stat = 0.0;       // primary measured statistic
  double threshold = 0.0;  // bound the statistic must stay below
  double runtime_s = 0.0;
  double budget_s = 0.0;   // wall-clock bound, 0 when none applies
  std::string detail;
};

// Registry order matches the numbered acceptance list.
std::vector<std::string> check_names();

// Runs one named check; out_dir (optional) receives per-check CSV artifacts.
CheckResult run_check(const std::string& name, int threads,
                      const std::string& out_dir);

std::vector<CheckResult> run_checks(const std::vector<std::string>& names,
                                    int threads, const std::string& out_dir);

}  // namespace sam
