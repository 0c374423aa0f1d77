#include "sam/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sam/bridge.hpp"
#include "sam/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sam {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

// Per (interval, parameter) constants shared by all bank elements.
struct PairContext {
  const TransformedModel* model;
  const ParameterVector* th;
  double x, y, t;
  double pref;  // |eta'(w)| * N_t(y - x) * exp(A(y) - A(x) - l t)
};

PairContext make_context(const TransformedModel& model,
                         const ParameterVector& th, const ObsPair& pair) {
  PairContext c{&model, &th, 0.0, 0.0, pair.t, 0.0};
  c.x = model.eta(pair.v, th);
  c.y = model.eta(pair.w, th);
  double expo = -(c.y - c.x) * (c.y - c.x) / (2.0 * pair.t) +
                model.A(c.y, th) - model.A(c.x, th) -
                model.l_bound(th) * pair.t;
  c.pref = std::fabs(model.eta_du(pair.w, th)) * std::exp(expo) /
           std::sqrt(kTwoPi * pair.t);
  return c;
}

// Allocation-free twin of chi_values folded with the mark product.
double branch_weight(const PairContext& c, const MinSplit& ms, int branch,
                     const std::vector<double>& Y,
                     const std::vector<double>& noise, double lambda) {
  size_t n = Y.size();
  if (n == 0) return 1.0;
  double t = c.t;
  double tau = branch == 0 ? ms.tau1 : ms.tau2;
  for (size_t j = 0; j < n; ++j)
    if (std::fabs(tau - Y[j]) < 1e-14 * t)
      tau += (tau >= Y[j] ? 1e-12 : -1e-12) * t;
  size_t h = 0;
  while (h < n && Y[h] <= tau) ++h;

  bool logspace = n > static_cast<size_t>(kLogSpaceMarks);
  double prod = 1.0, lsum = 0.0;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, prev = 0.0;
  size_t j = 0;
  auto fold = [&](double chi) {
    double f = 1.0 - c.model->phi(chi, *c.th) / lambda;
    if (f <= 0.0) return false;
    if (logspace)
      lsum += std::log(f);
    else
      prod *= f;
    return true;
  };
  for (; j < h; ++j) {
    double cc = std::sqrt((Y[j] - prev) / ((tau - Y[j]) * (tau - prev)));
    s1 += noise[3 * j] * cc;
    s2 += noise[3 * j + 1] * cc;
    s3 += noise[3 * j + 2] * cc;
    double u = tau - Y[j];
    double b1 = ms.xm * u / tau + u * s1, b2 = u * s2, b3 = u * s3;
    if (!fold(ms.m + std::sqrt(b1 * b1 + b2 * b2 + b3 * b3))) return 0.0;
    prev = Y[j];
  }
  s1 = s2 = s3 = 0.0;
  prev = tau;
  for (; j < n; ++j) {
    double cc = std::sqrt((Y[j] - prev) / ((t - Y[j]) * (t - prev)));
    s1 += noise[3 * j] * cc;
    s2 += noise[3 * j + 1] * cc;
    s3 += noise[3 * j + 2] * cc;
    double u = t - Y[j];
    double b1 = ms.ym * (Y[j] - tau) / (t - tau) + u * s1;
    double b2 = u * s2, b3 = u * s3;
    if (!fold(ms.m + std::sqrt(b1 * b1 + b2 * b2 + b3 * b3))) return 0.0;
    prev = Y[j];
  }
  return logspace ? std::exp(lsum) : prod;
}

double eval_L_ctx(const PairContext& c, const XiElement& xi) {
  MinSplit ms = split_at_minimum(BridgeFrame{c.x, c.y, c.t}, xi.E, xi.Z);
  double rm = c.model->r_sup(ms.m, *c.th);
  if (xi.lambda < rm - kDominanceTol)
    throw std::runtime_error(
        "eval_L: stored rate fails to dominate the envelope at the minimum");
  double a = 1.0;
  if (!xi.times.empty()) {
    double w0 = branch_weight(c, ms, 0, xi.times, xi.noise, xi.lambda);
    double w1 = branch_weight(c, ms, 1, xi.times, xi.noise, xi.lambda);
    a = ms.p1 * w0 + (1.0 - ms.p1) * w1;
  }
  return c.pref * a;
}

int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

}  // namespace

double eval_L(const TransformedModel& model, const ParameterVector& th,
              const ObsPair& pair, const XiElement& xi) {
  PairContext c = make_context(model, th, pair);
  return eval_L_ctx(c, xi);
}

LikelihoodSurface::LikelihoodSurface(const TransformedModel& model,
                                     ParameterBox box,
                                     std::vector<ObsPair> pairs, uint64_t seed,
                                     uint32_t n_bank, Materialize mode,
                                     int build_threads)
    : model_(&model),
      box_(std::move(box)),
      pairs_(std::move(pairs)),
      seed_(seed),
      n_bank_(n_bank) {
  if (pairs_.empty()) throw std::invalid_argument("LikelihoodSurface: no data");
  if (n_bank_ == 0) throw std::invalid_argument("LikelihoodSurface: N == 0");
  bool store = mode == kStore ||
               (mode == kAuto &&
                static_cast<uint64_t>(pairs_.size()) * n_bank_ <= kAutoStoreLimit);
  banks_.reserve(pairs_.size());
  for (size_t i = 0; i < pairs_.size(); ++i) {
    BankSpec spec{seed_, static_cast<uint32_t>(i), pairs_[i], model_, box_};
    banks_.emplace_back(std::move(spec), n_bank_, store);
    banks_.back().build(build_threads);
  }
}

LikelihoodSurface::LikelihoodSurface(const TransformedModel& model,
                                     ParameterBox box,
                                     std::vector<ObsPair> pairs,
                                     std::vector<XiBank> banks)
    : model_(&model),
      box_(std::move(box)),
      pairs_(std::move(pairs)),
      banks_(std::move(banks)) {
  if (pairs_.empty()) throw std::invalid_argument("LikelihoodSurface: no data");
  if (banks_.size() != pairs_.size())
    throw std::invalid_argument("LikelihoodSurface: one bank per pair needed");
  seed_ = banks_.front().spec().seed;
  n_bank_ = banks_.front().size();
  if (n_bank_ == 0) throw std::invalid_argument("LikelihoodSurface: N == 0");
  for (const XiBank& b : banks_)
    if (b.size() != n_bank_ || b.spec().seed != seed_)
      throw std::invalid_argument(
          "LikelihoodSurface: banks differ in size or seed");
}

double LikelihoodSurface::eval_LN(size_t i, const ParameterVector& th,
                                  int threads) const {
  const XiBank& b = banks_[i];
  PairContext c = make_context(*model_, th, pairs_[i]);
  uint32_t n = b.size();
  auto value_at = [&](uint32_t j) {
    const XiElement* p = b.stored(j);
    if (p != nullptr) return eval_L_ctx(c, *p);
    XiElement tmp = generate_xi(b.spec(), j);
    return eval_L_ctx(c, tmp);
  };
#ifdef _OPENMP
  if (threads != 1 && n >= 128) {
    std::vector<double> vals(n);
    bool bad = false;
    std::string msg;
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
    for (int64_t j = 0; j < static_cast<int64_t>(n); ++j) {
      try {
        vals[static_cast<size_t>(j)] = value_at(static_cast<uint32_t>(j));
      } catch (const std::exception& e) {
#pragma omp critical
        {
          bad = true;
          msg = e.what();
        }
        vals[static_cast<size_t>(j)] = 0.0;
      }
    }
    if (bad) throw std::runtime_error(msg);
    double s = 0.0;
    for (uint32_t j = 0; j < n; ++j) s += vals[j];
    return s / static_cast<double>(n);
  }
#else
  (void)threads;
#endif
  double s = 0.0;
  for (uint32_t j = 0; j < n; ++j) s += value_at(j);
  return s / static_cast<double>(n);
}

double LikelihoodSurface::eval_LN_serial(size_t i,
                                         const ParameterVector& th) const {
  return eval_LN(i, th, 1);
}

double LikelihoodSurface::loglik(const ParameterVector& th, int threads) const {
  size_t m = pairs_.size();
  std::vector<double> ln(m);
#ifdef _OPENMP
  if (threads != 1 && m >= 2) {
    bool bad = false;
    std::string msg;
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
    for (int64_t i = 0; i < static_cast<int64_t>(m); ++i) {
      try {
        ln[static_cast<size_t>(i)] = eval_LN(static_cast<size_t>(i), th, 1);
      } catch (const std::exception& e) {
#pragma omp critical
        {
          bad = true;
          msg = e.what();
        }
        ln[static_cast<size_t>(i)] = 0.0;
      }
    }
    if (bad) throw std::runtime_error(msg);
  } else
#else
  (void)threads;
#endif
  {
    for (size_t i = 0; i < m; ++i) ln[i] = eval_LN(i, th, 1);
  }
  double s = 0.0;
  for (size_t i = 0; i < m; ++i) {
    if (!(ln[i] > 0.0) || !std::isfinite(ln[i]))
      return -std::numeric_limits<double>::infinity();
    s += std::log(ln[i]);
  }
  return s;
}

double LikelihoodSurface::loglik_serial(const ParameterVector& th) const {
  return loglik(th, 1);
}

std::vector<double> LikelihoodSurface::fd_gradient(const ParameterVector& th,
                                                   double h_scale,
                                                   int threads) const {
  int d = box_.dim();
  std::vector<double> g(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) {
    double h = h_scale * box_.width(k);
    ParameterVector up = th, dn = th;
    up[static_cast<size_t>(k)] += h;
    dn[static_cast<size_t>(k)] -= h;
    if (!box_.contains(up) || !box_.contains(dn))
      throw std::domain_error("fd_gradient: stencil leaves the parameter box");
    g[static_cast<size_t>(k)] =
        (loglik(up, threads) - loglik(dn, threads)) / (2.0 * h);
  }
  return g;
}

Mat LikelihoodSurface::fd_hessian(const ParameterVector& th, double h_scale,
                                  int threads) const {
  int d = box_.dim();
  Mat hess(d);
  std::vector<double> h(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) {
    h[static_cast<size_t>(k)] = h_scale * box_.width(k);
    ParameterVector up = th, dn = th;
    up[static_cast<size_t>(k)] += h[static_cast<size_t>(k)];
    dn[static_cast<size_t>(k)] -= h[static_cast<size_t>(k)];
    if (!box_.contains(up) || !box_.contains(dn))
      throw std::domain_error("fd_hessian: stencil leaves the parameter box");
  }
  double f0 = loglik(th, threads);
  auto shifted = [&](int k, double sk, int l, double sl) {
    ParameterVector p = th;
    p[static_cast<size_t>(k)] += sk * h[static_cast<size_t>(k)];
    if (l >= 0) p[static_cast<size_t>(l)] += sl * h[static_cast<size_t>(l)];
    if (!box_.contains(p))
      throw std::domain_error("fd_hessian: stencil leaves the parameter box");
    return loglik(p, threads);
  };
  for (int k = 0; k < d; ++k) {
    double hk = h[static_cast<size_t>(k)];
    hess.at(k, k) =
        (shifted(k, 1, -1, 0) - 2.0 * f0 + shifted(k, -1, -1, 0)) / (hk * hk);
    for (int l = k + 1; l < d; ++l) {
      double hl = h[static_cast<size_t>(l)];
      double v = (shifted(k, 1, l, 1) - shifted(k, 1, l, -1) -
                  shifted(k, -1, l, 1) + shifted(k, -1, l, -1)) /
                 (4.0 * hk * hl);
      hess.at(k, l) = v;
      hess.at(l, k) = v;
    }
  }
  return mat_symmetrize(hess);
}

Mat LikelihoodSurface::score_spread(const ParameterVector& th, double h_scale,
                                    int threads) const {
  int d = box_.dim();
  Mat an(d);
  std::vector<double> h(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) {
    h[static_cast<size_t>(k)] = h_scale * box_.width(k);
    ParameterVector up = th, dn = th;
    up[static_cast<size_t>(k)] += h[static_cast<size_t>(k)];
    dn[static_cast<size_t>(k)] -= h[static_cast<size_t>(k)];
    if (!box_.contains(up) || !box_.contains(dn))
      throw std::domain_error("score_spread: stencil leaves the parameter box");
  }
  uint32_t n = n_bank_;
  if (n < 2) throw std::invalid_argument("score_spread: need N >= 2");
  std::vector<double> scores(static_cast<size_t>(n) * d);
  for (size_t i = 0; i < pairs_.size(); ++i) {
    double ln = eval_LN(i, th, threads);
    if (!(ln > 0.0) || !std::isfinite(ln))
      throw std::runtime_error("score_spread: flagged likelihood value");
    std::vector<PairContext> cup, cdn;
    std::vector<ParameterVector> thup(static_cast<size_t>(d), th);
    std::vector<ParameterVector> thdn(static_cast<size_t>(d), th);
    for (int k = 0; k < d; ++k) {
      thup[static_cast<size_t>(k)][static_cast<size_t>(k)] += h[static_cast<size_t>(k)];
      thdn[static_cast<size_t>(k)][static_cast<size_t>(k)] -= h[static_cast<size_t>(k)];
    }
    for (int k = 0; k < d; ++k) {
      cup.push_back(make_context(*model_, thup[static_cast<size_t>(k)], pairs_[i]));
      cdn.push_back(make_context(*model_, thdn[static_cast<size_t>(k)], pairs_[i]));
    }
    const XiBank& b = banks_[i];
    auto fill_row = [&](uint32_t j) {
      const XiElement* p = b.stored(j);
      XiElement tmp;
      if (p == nullptr) {
        tmp = generate_xi(b.spec(), j);
        p = &tmp;
      }
      for (int k = 0; k < d; ++k) {
        double lp = eval_L_ctx(cup[static_cast<size_t>(k)], *p);
        double lm = eval_L_ctx(cdn[static_cast<size_t>(k)], *p);
        scores[static_cast<size_t>(j) * d + k] =
            (lp - lm) / (2.0 * h[static_cast<size_t>(k)] * ln);
      }
    };
#ifdef _OPENMP
    if (threads != 1 && n >= 128) {
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
      for (int64_t j = 0; j < static_cast<int64_t>(n); ++j)
        fill_row(static_cast<uint32_t>(j));
    } else
#endif
    {
      for (uint32_t j = 0; j < n; ++j) fill_row(j);
    }
    // Covariance over elements, accumulated deterministically.
    std::vector<double> mean(static_cast<size_t>(d), 0.0);
    for (uint32_t j = 0; j < n; ++j)
      for (int k = 0; k < d; ++k)
        mean[static_cast<size_t>(k)] += scores[static_cast<size_t>(j) * d + k];
    for (int k = 0; k < d; ++k) mean[static_cast<size_t>(k)] /= n;
    for (uint32_t j = 0; j < n; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = k; l < d; ++l) {
          double vk = scores[static_cast<size_t>(j) * d + k] - mean[static_cast<size_t>(k)];
          double vl = scores[static_cast<size_t>(j) * d + l] - mean[static_cast<size_t>(l)];
          an.at(k, l) += vk * vl / (n - 1.0);
        }
  }
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < k; ++l) an.at(k, l) = an.at(l, k);
  return an;
}

}  // namespace sam
