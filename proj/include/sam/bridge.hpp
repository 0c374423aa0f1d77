// Brownian-bridge machinery on the transformed scale: exact minimum draw,
// the two-point minimum-time mixture, discrete standard bridges, skeleton
// values at given times conditioned on (minimum, minimum time), and the
// rejection (EA) / single-proposal (AM) bridge samplers built from them.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sam/model.hpp"
#include "sam/rng.hpp"

namespace sam {

struct BridgeFrame {
  double x, y, t;  // endpoints on the transformed scale, t > 0
};

// Minimum draw with cancellation-free gaps: xm * ym == t * E / 2 holds to
// rounding error by construction.
struct BridgeMin {
  double m;   // minimum value, m < min(x, y) for E > 0
  double xm;  // x - m
  double ym;  // y - m
};

BridgeMin bridge_minimum(const BridgeFrame& f, double E);

// Minimum plus the two-point mixture for the minimum's time:
// tau1 with weight p1, tau2 with weight 1 - p1.
struct MinSplit {
  double E, m, xm, ym;
  double g;           // in (0, 1]; g == 1 iff Z == 0
  double tau1, tau2;  // both in (0, t)
  double p1;          // in (0, 1)
};

MinSplit split_at_minimum(const BridgeFrame& f, double E, double Z);

// Branch pick by a uniform V: 0 -> tau1, 1 -> tau2.
int sample_branch(const MinSplit& ms, double V);
double tau_of(const MinSplit& ms, int branch);

// Standard Brownian bridge (0,0) -> (1,0) evaluated at strictly increasing
// times s in (0,1), one N(0,1) draw per time.
std::vector<double> bb_discrete(std::span<const double> s,
                                std::span<const double> noise);

// Bridge values at times Y in (0, t), conditioned on minimum m at time
// tau(branch), built from a 3 x Y.size() column-major noise matrix.
// Outputs satisfy chi >= m. If tau lands within 1e-14 * t of some Y_j it is
// nudged by 1e-12 * t away from that point before use.
std::vector<double> chi_values(const BridgeFrame& f, const MinSplit& ms,
                               int branch, std::span<const double> Y,
                               std::span<const double> noise);

struct PathSkeleton {
  BridgeFrame frame;
  std::vector<double> times;   // interior times, sorted, in (0, t)
  std::vector<double> values;  // all >= min_value
  double min_value = 0.0;
  double tau = 0.0;  // time of the minimum
};

struct EaResult {
  PathSkeleton skeleton;
  long proposals = 0;  // total proposals consumed, including the accepted one
};

// Rejection sampler for the diffusion bridge of `model` between
// x = eta(v), y = eta(w): proposes minimum-decomposed Brownian bridges with
// Poisson marks at rate r_sup(m) and accepts with the product weight.
// Throws after max_proposals rejected attempts.
EaResult ea_sample_bridge(const TransformedModel& model,
                          const ParameterVector& th, const BridgeFrame& f,
                          Stream& st, long max_proposals = 1000000);

// Single-proposal unbiased estimate of the EA acceptance probability a(th),
// in [0, 1]. With rate_override the marks run at that rate (must dominate
// r_sup(m); checked to 1e-9), leaving the mean unchanged.
double am_estimate(const TransformedModel& model, const ParameterVector& th,
                   const BridgeFrame& f, Stream& st,
                   std::optional<double> rate_override = {});

}  // namespace sam
