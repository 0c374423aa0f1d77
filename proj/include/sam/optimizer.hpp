// Derivative-free maximization of the Monte Carlo log-likelihood surface:
// Nelder-Mead with box constraints enforced by coordinate folding, a
// diameter stopping rule measured in box-width units, one restart at 10%
// scale, and standard-error extraction from the observed information.
#pragma once

#include <functional>
#include <vector>

#include "sam/likelihood.hpp"
#include "sam/linalg.hpp"
#include "sam/model.hpp"

namespace sam {

struct SimplexConfig {
  double eps = 1e-6;         // simplex diameter threshold, box-width units
  double init_scale = 0.05;  // initial simplex edge, box-width units
  int max_evals = 20000;
  bool restart = true;       // one restart from the optimum at 10% scale
  double fd_h_scale = 1e-4;  // stencil for the information matrices
  int threads = 0;
};

struct TracePoint {
  int eval;
  ParameterVector theta;
  double value;
};

struct MleResult {
  ParameterVector theta_hat;
  double loglik = 0.0;
  double eps_used = 0.0;
  uint32_t n_bank = 0;
  int evals = 0;
  std::vector<double> se_obs;  // per coordinate; NaN when info is not PD
  bool info_pd = false;
  Mat observed_info;      // negative Hessian of the log-likelihood
  Mat score_spread_mat;   // summed per-element score covariance
  Mat mc_cov;             // info^-1 * spread * info^-1 / N
  std::vector<TracePoint> trace;
};

// Plain Nelder-Mead core over an arbitrary objective (maximized). The
// objective may return -infinity to flag a point; an all-flagged simplex
// throws (no progress).
struct SimplexOutcome {
  ParameterVector best;
  double value;
  int evals;
  std::vector<TracePoint> trace;
};
SimplexOutcome nelder_mead_max(
    const std::function<double(const ParameterVector&)>& fn,
    const ParameterBox& box, ParameterVector start, const SimplexConfig& cfg);

// Maximize the surface's log-likelihood; fills the information matrices
// when with_se is set.
MleResult maximize(const LikelihoodSurface& surface, ParameterVector start,
                   const SimplexConfig& cfg, bool with_se = true);

// Increasing-N warm-start sweep: banks are nested across N by construction,
// each stage starts from the previous maximizer, and the stage tolerance is
// eps(N) = max(1e-8, 0.1 / sqrt(N)).
std::vector<MleResult> warm_start_ladder(
    const std::function<LikelihoodSurface(uint32_t)>& surface_builder,
    const std::vector<uint32_t>& n_ladder, ParameterVector start,
    SimplexConfig cfg, bool with_se = true);

double ladder_eps(uint32_t n_bank);

struct ProfilePoint {
  double coord_value;
  ParameterVector theta;  // maximizer with the coordinate pinned
  double loglik;
};

// Profile likelihood over one coordinate; with d == 1 this is the plain
// log-likelihood curve.
std::vector<ProfilePoint> profile(const LikelihoodSurface& surface, int coord,
                                  const std::vector<double>& grid,
                                  ParameterVector start,
                                  const SimplexConfig& cfg);

}  // namespace sam
