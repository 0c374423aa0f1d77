// Release gate: runs every validation check and prints one line per check as
// it completes. Exit code is 0 only when all checks pass. Artifacts
// (per-check CSVs) land in ./acceptance_out, or in $ACCEPTANCE_OUT when set.
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "sam/checks.hpp"

int main(int argc, char** argv) {
  int threads = 0;  // all available
  if (const char* env = std::getenv("ACCEPTANCE_THREADS"))
    threads = std::atoi(env);
  std::string out_dir = "acceptance_out";
  if (const char* env = std::getenv("ACCEPTANCE_OUT")) out_dir = env;
  std::filesystem::create_directories(out_dir);

  // Optional positional arguments select a subset of checks by name prefix.
  std::vector<std::string> names;
  for (int i = 1; i < argc; ++i) names.emplace_back(argv[i]);
  if (names.empty()) names = sam::check_names();

  int failed = 0, ran = 0;
  for (const std::string& name : names) {
    sam::CheckResult r;
    try {
      r = sam::run_check(name, threads, out_dir);
    } catch (const std::exception& e) {
      r.name = name;
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    ++ran;
    std::printf("[%s] %-26s stat=%.6g threshold=%.6g (%.1f s",
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.stat, r.threshold,
                r.runtime_s);
    if (r.budget_s > 0) std::printf(" / budget %.0f s", r.budget_s);
    std::printf(")\n");
    if (!r.detail.empty()) std::printf("       %s\n", r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d/%d checks passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
