// Dataset simulation and the brute-force oracles the estimator is tested
// against: fine-grid Euler transition densities and rejection-sampled
// Brownian bridges conditioned on their minimum.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sam/bridge.hpp"
#include "sam/model.hpp"

namespace sam {

struct ObservationSeries {
  std::vector<double> times;   // includes time 0
  std::vector<double> values;  // original scale, first entry is v0
};

std::vector<ObsPair> series_to_pairs(const ObservationSeries& s);

struct EulerConfig {
  int substeps_log2 = 8;   // Euler step = dt * 2^-substeps_log2
  long paths = 100000;     // Monte Carlo paths for density estimates
  double bin_width = 0.0;  // transformed-scale bin; 0 -> sqrt(t) / 50
};

// Euler-Maruyama on the transformed (unit-diffusion) scale, recording every
// dt and mapping back through eta_inv. A step that exits the transformed
// state space is rejected and halved, up to 10 times, then the run fails.
ObservationSeries simulate_dataset(const TransformedModel& model,
                                   const ParameterVector& th0, double v0,
                                   int n, double dt, const EulerConfig& euler,
                                   uint64_t seed);

struct DensityEstimate {
  double value = 0.0;  // original-scale transition density at w
  double se = 0.0;     // binomial standard error of the bin frequency
  long hits = 0;
  long paths = 0;
  double bin_width = 0.0;
};

// Binned fine-grid Euler estimate of p_t(v, w; th).
DensityEstimate brute_density(const TransformedModel& model,
                              const ParameterVector& th, double v, double w,
                              double t, const EulerConfig& euler, uint64_t seed,
                              int threads = 0);
DensityEstimate brute_density_serial(const TransformedModel& model,
                                     const ParameterVector& th, double v,
                                     double w, double t,
                                     const EulerConfig& euler, uint64_t seed);

struct BridgeOracleSample {
  std::vector<double> tau;                  // minimum times of accepted paths
  std::vector<double> min_value;            // exact sampled path minima
  std::vector<std::vector<double>> values;  // [query time][accepted path]
  long proposals = 0;
  long accepted = 0;
};

// Rejection oracle: simulates Brownian-bridge skeletons on a grid with step
// t * 2^-substeps_log2 (query times inserted into the grid), draws each
// segment's exact minimum from the closed-form bridge-minimum law, and keeps
// paths whose exact global minimum lies in (m_lo, m_hi). tau is resolved to
// the midpoint of the winning segment. Errors out when fewer than 100 paths
// are accepted within max_proposals.
BridgeOracleSample conditioned_bridge_sample(
    const BridgeFrame& f, double m_lo, double m_hi,
    std::span<const double> query_times, int substeps_log2, long want,
    long max_proposals, uint64_t seed, int threads = 0);

}  // namespace sam
