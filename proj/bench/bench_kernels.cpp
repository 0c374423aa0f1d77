// Timing harness comparing the OpenMP kernels against their serial
// reference implementations, and asserting that both produce identical
// results (the parallel paths are reductions over keyed streams, so thread
// count must not change any output bit).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "sam/datasim.hpp"
#include "sam/likelihood.hpp"
#include "sam/model.hpp"
#include "sam/rng.hpp"
#include "sam/xi.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Row {
  const char* kernel;
  double serial_s;
  double parallel_s;
  bool match;
};

void print_rows(const std::vector<Row>& rows) {
  std::printf("%-28s %12s %12s %9s %7s\n", "kernel", "serial (s)",
              "parallel (s)", "speedup", "match");
  for (const Row& r : rows)
    std::printf("%-28s %12.3f %12.3f %9.2f %7s\n", r.kernel, r.serial_s,
                r.parallel_s, r.serial_s / r.parallel_s,
                r.match ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n\n", omp_get_max_threads());
#else
  std::printf("OpenMP not available; parallel columns run serially\n\n");
#endif

  sam::LogisticGrowthModel model;
  sam::ParameterBox box({0.03, 850.0, 0.09}, {0.18, 1200.0, 0.12});
  sam::ParameterVector th = {0.1, 1000.0, 0.1};
  std::vector<Row> rows;

  {  // Bank build over elements.
    sam::BankSpec spec{42, 0, {1000.0, 1080.0, 1.0}, &model, box};
    const uint32_t n = 200000;
    sam::XiBank a(spec, n, true), b(spec, n, true);
    double t0 = now_s();
    a.build_serial();
    double t1 = now_s();
    b.build(0);
    double t2 = now_s();
    bool match = true;
    for (uint32_t j = 0; j < n && match; j += 997) {
      sam::XiElement ea = a.get(j), eb = b.get(j);
      match = ea.E == eb.E && ea.Z == eb.Z && ea.times == eb.times &&
              ea.noise == eb.noise;
    }
    rows.push_back({"bank build (200k elements)", t1 - t0, t2 - t1, match});
  }

  {  // Density-estimate reduction over one bank.
    std::vector<sam::ObsPair> pairs = {{1000.0, 1080.0, 1.0}};
    sam::LikelihoodSurface surf(model, box, pairs, 43, 200000,
                                sam::LikelihoodSurface::kStore, 0);
    double t0 = now_s();
    double s = surf.eval_LN_serial(0, th);
    double t1 = now_s();
    double p = surf.eval_LN(0, th, 0);
    double t2 = now_s();
    rows.push_back({"density estimate (N=200k)", t1 - t0, t2 - t1, s == p});
  }

  {  // Euler density oracle over paths.
    sam::EulerConfig euler;
    euler.substeps_log2 = 8;
    euler.paths = 100000;
    double t0 = now_s();
    sam::DensityEstimate s =
        sam::brute_density_serial(model, th, 1000.0, 1080.0, 1.0, euler, 44);
    double t1 = now_s();
    sam::DensityEstimate p =
        sam::brute_density(model, th, 1000.0, 1080.0, 1.0, euler, 44, 0);
    double t2 = now_s();
    rows.push_back({"euler density (100k paths)", t1 - t0, t2 - t1,
                    s.value == p.value && s.hits == p.hits});
  }

  {  // Conditioned-bridge rejection oracle over proposals.
    sam::BridgeFrame f{0.0, 0.25, 1.0};
    std::vector<double> query = {0.5};
    double t0 = now_s();
    sam::BridgeOracleSample s = sam::conditioned_bridge_sample(
        f, -0.51, -0.49, query, 8, 2000, 10000000, 45, 1);
    double t1 = now_s();
    sam::BridgeOracleSample p = sam::conditioned_bridge_sample(
        f, -0.51, -0.49, query, 8, 2000, 10000000, 45, 0);
    double t2 = now_s();
    rows.push_back({"bridge oracle (2k accepts)", t1 - t0, t2 - t1,
                    s.values[0] == p.values[0] && s.tau == p.tau});
  }

  print_rows(rows);
  bool all = true;
  for (const Row& r : rows) all = all && r.match;
  if (!all) {
    std::printf("\nMISMATCH: parallel kernels diverged from serial reference\n");
    return 1;
  }
  return 0;
}
