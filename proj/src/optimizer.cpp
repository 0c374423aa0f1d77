#include "sam/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Reflect a coordinate into [lo, hi] by folding at the walls.
double fold(double v, double lo, double hi) {
  double w = hi - lo;
  double z = std::fmod(v - lo, 2.0 * w);
  if (z < 0.0) z += 2.0 * w;
  return lo + (z <= w ? z : 2.0 * w - z);
}

ParameterVector fold_into(const ParameterBox& box, ParameterVector th) {
  for (int k = 0; k < box.dim(); ++k)
    th[static_cast<size_t>(k)] =
        fold(th[static_cast<size_t>(k)], box.lo[static_cast<size_t>(k)],
             box.hi[static_cast<size_t>(k)]);
  return th;
}

double simplex_diameter(const std::vector<ParameterVector>& verts,
                        const ParameterBox& box, size_t best) {
  double d = 0.0;
  for (size_t v = 0; v < verts.size(); ++v) {
    if (v == best) continue;
    for (int k = 0; k < box.dim(); ++k) {
      double w = box.width(k);
      d = std::max(d, std::fabs(verts[v][static_cast<size_t>(k)] -
                                verts[best][static_cast<size_t>(k)]) /
                          w);
    }
  }
  return d;
}

struct SimplexState {
  std::vector<ParameterVector> verts;
  std::vector<double> vals;
};

SimplexState init_simplex(const ParameterBox& box, const ParameterVector& start,
                          double scale) {
  int d = box.dim();
  SimplexState s;
  s.verts.push_back(fold_into(box, start));
  for (int k = 0; k < d; ++k) {
    ParameterVector v = start;
    v[static_cast<size_t>(k)] += scale * box.width(k);
    s.verts.push_back(fold_into(box, std::move(v)));
  }
  s.vals.assign(s.verts.size(), kNegInf);
  return s;
}

}  // namespace

SimplexOutcome nelder_mead_max(
    const std::function<double(const ParameterVector&)>& fn,
    const ParameterBox& box, ParameterVector start, const SimplexConfig& cfg) {
  int d = box.dim();
  if (static_cast<int>(start.size()) != d)
    throw std::invalid_argument("nelder_mead_max: start dimension mismatch");

  SimplexOutcome out;
  out.evals = 0;
  out.value = kNegInf;

  auto eval = [&](const ParameterVector& th) {
    double v = fn(th);
    ++out.evals;
    out.trace.push_back({out.evals, th, v});
    if (v > out.value) {
      out.value = v;
      out.best = th;
    }
    return v;
  };

  auto run_stage = [&](ParameterVector from, double scale) {
    SimplexState s = init_simplex(box, from, scale);
    size_t nv = s.verts.size();
    for (size_t v = 0; v < nv; ++v) s.vals[v] = eval(s.verts[v]);
    if (std::all_of(s.vals.begin(), s.vals.end(),
                    [](double v) { return v == kNegInf; }))
      throw std::runtime_error(
          "nelder_mead_max: no progress, every vertex is flagged");

    // Standard coefficients: reflect 1, expand 2, contract 0.5, shrink 0.5.
    while (out.evals < cfg.max_evals) {
      size_t best = 0, worst = 0, second = 0;
      for (size_t v = 1; v < nv; ++v) {
        if (s.vals[v] > s.vals[best]) best = v;
        if (s.vals[v] < s.vals[worst]) worst = v;
      }
      for (size_t v = 0; v < nv; ++v)
        if (v != worst && (second == worst || s.vals[v] < s.vals[second]))
          second = v;
      if (second == worst) second = best;

      if (simplex_diameter(s.verts, box, best) < cfg.eps) break;

      ParameterVector centroid(static_cast<size_t>(d), 0.0);
      for (size_t v = 0; v < nv; ++v) {
        if (v == worst) continue;
        for (int k = 0; k < d; ++k)
          centroid[static_cast<size_t>(k)] += s.verts[v][static_cast<size_t>(k)];
      }
      for (int k = 0; k < d; ++k)
        centroid[static_cast<size_t>(k)] /= static_cast<double>(nv - 1);

      auto blend = [&](double c) {
        ParameterVector p(static_cast<size_t>(d));
        for (int k = 0; k < d; ++k)
          p[static_cast<size_t>(k)] =
              centroid[static_cast<size_t>(k)] +
              c * (centroid[static_cast<size_t>(k)] -
                   s.verts[worst][static_cast<size_t>(k)]);
        return fold_into(box, std::move(p));
      };

      ParameterVector refl = blend(1.0);
      double frefl = eval(refl);
      if (frefl > s.vals[best]) {
        ParameterVector expd = blend(2.0);
        double fexpd = eval(expd);
        if (fexpd > frefl) {
          s.verts[worst] = std::move(expd);
          s.vals[worst] = fexpd;
        } else {
          s.verts[worst] = std::move(refl);
          s.vals[worst] = frefl;
        }
        continue;
      }
      if (frefl > s.vals[second]) {
        s.verts[worst] = std::move(refl);
        s.vals[worst] = frefl;
        continue;
      }
      ParameterVector ctr = blend(frefl > s.vals[worst] ? 0.5 : -0.5);
      double fctr = eval(ctr);
      if (fctr > std::max(frefl, s.vals[worst])) {
        s.verts[worst] = std::move(ctr);
        s.vals[worst] = fctr;
        continue;
      }
      // Shrink toward the best vertex.
      for (size_t v = 0; v < nv; ++v) {
        if (v == best) continue;
        for (int k = 0; k < d; ++k)
          s.verts[v][static_cast<size_t>(k)] =
              s.verts[best][static_cast<size_t>(k)] +
              0.5 * (s.verts[v][static_cast<size_t>(k)] -
                     s.verts[best][static_cast<size_t>(k)]);
        s.verts[v] = fold_into(box, std::move(s.verts[v]));
        s.vals[v] = eval(s.verts[v]);
      }
    }
  };

  run_stage(start, cfg.init_scale);
  if (cfg.restart) run_stage(out.best, 0.1 * cfg.init_scale);
  return out;
}

MleResult maximize(const LikelihoodSurface& surface, ParameterVector start,
                   const SimplexConfig& cfg, bool with_se) {
  auto fn = [&](const ParameterVector& th) {
    return surface.loglik(th, cfg.threads);
  };
  SimplexOutcome oc = nelder_mead_max(fn, surface.box(), std::move(start), cfg);

  MleResult res;
  res.theta_hat = oc.best;
  res.loglik = oc.value;
  res.eps_used = cfg.eps;
  res.n_bank = surface.bank_size();
  res.evals = oc.evals;
  res.trace = std::move(oc.trace);

  int d = surface.box().dim();
  res.se_obs.assign(static_cast<size_t>(d),
                    std::numeric_limits<double>::quiet_NaN());
  if (with_se) {
    // A maximizer within a stencil width of a box wall has no usable
    // observed-information standard errors; keep the estimate, leave the
    // standard errors NaN, and flag the information matrix as unusable.
    try {
      res.observed_info = mat_scale(
          surface.fd_hessian(res.theta_hat, cfg.fd_h_scale, cfg.threads),
          -1.0);
      res.score_spread_mat =
          surface.score_spread(res.theta_hat, cfg.fd_h_scale, cfg.threads);
      res.info_pd = mat_is_pd(res.observed_info);
      if (res.info_pd) {
        Mat inv;
        if (mat_invert(res.observed_info, inv)) {
          for (int k = 0; k < d; ++k)
            res.se_obs[static_cast<size_t>(k)] = std::sqrt(inv.at(k, k));
          res.mc_cov = mat_scale(
              mat_mul(mat_mul(inv, res.score_spread_mat), inv),
              1.0 / surface.bank_size());
        }
      }
    } catch (const std::domain_error&) {
      res.observed_info = Mat{};
      res.score_spread_mat = Mat{};
      res.mc_cov = Mat{};
      res.info_pd = false;
      std::fill(res.se_obs.begin(), res.se_obs.end(),
                std::numeric_limits<double>::quiet_NaN());
    }
  }
  return res;
}

double ladder_eps(uint32_t n_bank) {
  return std::max(1e-8, 0.1 / std::sqrt(static_cast<double>(n_bank)));
}

std::vector<MleResult> warm_start_ladder(
    const std::function<LikelihoodSurface(uint32_t)>& surface_builder,
    const std::vector<uint32_t>& n_ladder, ParameterVector start,
    SimplexConfig cfg, bool with_se) {
  std::vector<MleResult> results;
  ParameterVector at = std::move(start);
  for (uint32_t n : n_ladder) {
    LikelihoodSurface surf = surface_builder(n);
    cfg.eps = ladder_eps(n);
    // The score-spread covariance needs at least two elements per bank.
    MleResult r = maximize(surf, at, cfg, with_se && n >= 2);
    at = r.theta_hat;
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<ProfilePoint> profile(const LikelihoodSurface& surface, int coord,
                                  const std::vector<double>& grid,
                                  ParameterVector start,
                                  const SimplexConfig& cfg) {
  int d = surface.box().dim();
  if (coord < 0 || coord >= d) throw std::invalid_argument("profile: bad coord");
  std::vector<ProfilePoint> out;
  if (d == 1) {
    ParameterVector th(1);
    for (double v : grid) {
      th[0] = v;
      out.push_back({v, th, surface.loglik(th, cfg.threads)});
    }
    return out;
  }

  // Reduced search over the free coordinates with `coord` pinned.
  std::vector<double> rlo, rhi;
  std::vector<int> free_idx;
  for (int k = 0; k < d; ++k) {
    if (k == coord) continue;
    free_idx.push_back(k);
    rlo.push_back(surface.box().lo[static_cast<size_t>(k)]);
    rhi.push_back(surface.box().hi[static_cast<size_t>(k)]);
  }
  ParameterBox rbox(rlo, rhi);
  ParameterVector rat;
  for (int k : free_idx) rat.push_back(start[static_cast<size_t>(k)]);

  for (double v : grid) {
    auto expand = [&](const ParameterVector& r) {
      ParameterVector full(static_cast<size_t>(d));
      full[static_cast<size_t>(coord)] = v;
      for (size_t q = 0; q < free_idx.size(); ++q)
        full[static_cast<size_t>(free_idx[q])] = r[q];
      return full;
    };
    auto fn = [&](const ParameterVector& r) {
      return surface.loglik(expand(r), cfg.threads);
    };
    SimplexOutcome oc = nelder_mead_max(fn, rbox, rat, cfg);
    rat = oc.best;
    out.push_back({v, expand(oc.best), oc.value});
  }
  return out;
}

}  // namespace sam
