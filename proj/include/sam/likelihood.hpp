// Unbiased transition-density estimator and the per-dataset likelihood
// surface built from element banks. One bank element is parameter free, so
// the same banks are reused at every parameter value (common random
// numbers) and the estimated likelihood is a fixed smooth surface that
// optimizers and finite differences can probe repeatedly.
#pragma once

#include <cstdint>
#include <vector>

#include "sam/linalg.hpp"
#include "sam/model.hpp"
#include "sam/xi.hpp"

namespace sam {

// Slack allowed when asserting that the stored mark rate dominates the
// per-parameter envelope at the sampled minimum.
inline constexpr double kDominanceTol = 1e-9;

// Marks-product threshold above which the two branch products are
// accumulated in log space.
inline constexpr int kLogSpaceMarks = 50;

// One unbiased draw of the transition density p_t(v, w; th). Throws when
// xi.lambda fails to dominate r_sup at the implied bridge minimum.
double eval_L(const TransformedModel& model, const ParameterVector& th,
              const ObsPair& pair, const XiElement& xi);

class LikelihoodSurface {
 public:
  enum Materialize { kAuto = 0, kStore = 1, kLazy = 2 };

  // Elements above this count fall back to lazy regeneration under kAuto.
  static constexpr uint64_t kAutoStoreLimit = 500000;

  LikelihoodSurface(const TransformedModel& model, ParameterBox box,
                    std::vector<ObsPair> pairs, uint64_t seed, uint32_t n_bank,
                    Materialize mode = kAuto, int build_threads = 0);

  // Adopts prebuilt banks (e.g. loaded from a cache); one bank per pair,
  // all of one size, all sharing one seed.
  LikelihoodSurface(const TransformedModel& model, ParameterBox box,
                    std::vector<ObsPair> pairs, std::vector<XiBank> banks);

  const TransformedModel& model() const { return *model_; }
  const ParameterBox& box() const { return box_; }
  uint32_t bank_size() const { return n_bank_; }
  size_t intervals() const { return banks_.size(); }
  uint64_t seed() const { return seed_; }
  const XiBank& bank(size_t i) const { return banks_[i]; }

  // Monte Carlo transition-density estimate for interval i.
  double eval_LN(size_t i, const ParameterVector& th, int threads = 1) const;
  double eval_LN_serial(size_t i, const ParameterVector& th) const;

  // Sum of log estimates; -infinity when any interval estimate is
  // nonpositive (a flag for the optimizer, not an error).
  double loglik(const ParameterVector& th, int threads = 0) const;
  double loglik_serial(const ParameterVector& th) const;

  // Central differences over the fixed banks. h_k = h_scale * box width_k;
  // throws std::domain_error when a stencil point leaves the box.
  std::vector<double> fd_gradient(const ParameterVector& th,
                                  double h_scale = 1e-4, int threads = 0) const;
  Mat fd_hessian(const ParameterVector& th, double h_scale = 1e-4,
                 int threads = 0) const;

  // Sum over intervals of the sample covariance (over bank elements) of
  // grad eval_L / eval_LN, the Monte Carlo score-spread matrix.
  Mat score_spread(const ParameterVector& th, double h_scale = 1e-4,
                   int threads = 0) const;

 private:
  const TransformedModel* model_;
  ParameterBox box_;
  std::vector<ObsPair> pairs_;
  uint64_t seed_;
  uint32_t n_bank_;
  std::vector<XiBank> banks_;
};

}  // namespace sam
