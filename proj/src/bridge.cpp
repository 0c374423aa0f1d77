#include "sam/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sam {

BridgeMin bridge_minimum(const BridgeFrame& f, double E) {
  if (!(f.t > 0.0) || !(E >= 0.0))
    throw std::domain_error("bridge_minimum: need t > 0 and E >= 0");
  double d = f.y - f.x;
  double D = std::sqrt(2.0 * f.t * E + d * d);
  BridgeMin bm;
  // The smaller gap is recovered from the product identity to avoid
  // cancellation when 2tE << d^2.
  if (d >= 0.0) {
    bm.ym = 0.5 * (D + d);
    bm.xm = E == 0.0 ? 0.0 : f.t * E / (D + d);
  } else {
    bm.xm = 0.5 * (D - d);
    bm.ym = E == 0.0 ? 0.0 : f.t * E / (D - d);
  }
  bm.m = f.x - bm.xm;
  return bm;
}

MinSplit split_at_minimum(const BridgeFrame& f, double E, double Z) {
  if (!(E > 0.0)) throw std::domain_error("split_at_minimum: need E > 0");
  BridgeMin bm = bridge_minimum(f, E);
  MinSplit ms;
  ms.E = E;
  ms.m = bm.m;
  ms.xm = bm.xm;
  ms.ym = bm.ym;
  double s = Z * Z / E;
  ms.g = 1.0 / (1.0 + s + std::sqrt(s * (s + 2.0)));
  ms.tau1 = f.t / (1.0 + ms.g * ms.ym / ms.xm);
  ms.tau2 = f.t / (1.0 + ms.ym / (ms.xm * ms.g));
  double xm2 = 2.0 * ms.xm * ms.xm;
  ms.p1 = (f.t * ms.g * E + xm2) / ((1.0 + ms.g) * (f.t * E + xm2));
  return ms;
}

int sample_branch(const MinSplit& ms, double V) { return V <= ms.p1 ? 0 : 1; }

double tau_of(const MinSplit& ms, int branch) {
  return branch == 0 ? ms.tau1 : ms.tau2;
}

std::vector<double> bb_discrete(std::span<const double> s,
                                std::span<const double> noise) {
  if (noise.size() < s.size())
    throw std::invalid_argument("bb_discrete: not enough noise");
  std::vector<double> w(s.size());
  double acc = 0.0;
  double prev = 0.0;
  for (size_t j = 0; j < s.size(); ++j) {
    double sj = s[j];
    if (!(sj > prev && sj < 1.0))
      throw std::domain_error("bb_discrete: times must increase within (0,1)");
    acc += noise[j] * std::sqrt((sj - prev) / ((1.0 - prev) * (1.0 - sj)));
    w[j] = (1.0 - sj) * acc;
    prev = sj;
  }
  return w;
}

std::vector<double> chi_values(const BridgeFrame& f, const MinSplit& ms,
                               int branch, std::span<const double> Y,
                               std::span<const double> noise) {
  size_t n = Y.size();
  if (noise.size() < 3 * n)
    throw std::invalid_argument("chi_values: noise must be 3 x Y.size()");
  std::vector<double> chi(n);
  if (n == 0) return chi;

  double tau = tau_of(ms, branch);
  for (size_t j = 0; j < n; ++j) {
    if (std::fabs(tau - Y[j]) < 1e-14 * f.t)
      tau += (tau >= Y[j] ? 1e-12 : -1e-12) * f.t;
  }

  // Points at or before the minimum's time feed the descending span, the
  // rest the ascending span; the two spans use disjoint noise columns.
  size_t h = 0;
  while (h < n && Y[h] <= tau) ++h;

  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  double prev = 0.0;
  for (size_t j = 0; j < h; ++j) {
    double c = std::sqrt((Y[j] - prev) / ((tau - Y[j]) * (tau - prev)));
    s1 += noise[3 * j] * c;
    s2 += noise[3 * j + 1] * c;
    s3 += noise[3 * j + 2] * c;
    double u = tau - Y[j];
    double beta = ms.xm * u / tau;
    double b1 = beta + u * s1, b2 = u * s2, b3 = u * s3;
    chi[j] = ms.m + std::sqrt(b1 * b1 + b2 * b2 + b3 * b3);
    prev = Y[j];
  }
  s1 = s2 = s3 = 0.0;
  prev = tau;
  for (size_t j = h; j < n; ++j) {
    double c = std::sqrt((Y[j] - prev) / ((f.t - Y[j]) * (f.t - prev)));
    s1 += noise[3 * j] * c;
    s2 += noise[3 * j + 1] * c;
    s3 += noise[3 * j + 2] * c;
    double u = f.t - Y[j];
    double beta = ms.ym * (Y[j] - tau) / (f.t - tau);
    double b1 = beta + u * s1, b2 = u * s2, b3 = u * s3;
    chi[j] = ms.m + std::sqrt(b1 * b1 + b2 * b2 + b3 * b3);
    prev = Y[j];
  }
  return chi;
}

EaResult ea_sample_bridge(const TransformedModel& model,
                          const ParameterVector& th, const BridgeFrame& f,
                          Stream& st, long max_proposals) {
  EaResult res;
  for (res.proposals = 1; res.proposals <= max_proposals; ++res.proposals) {
    // Draw order per proposal: E, Z, marks, branch, noise, accept-uniform.
    double E = st.exponential();
    double Z = st.gaussian();
    MinSplit ms = split_at_minimum(f, E, Z);
    double rate = model.r_sup(ms.m, th);
    std::vector<double> Y =
        rate > 0.0 ? draw_poisson_process(st, rate, f.t) : std::vector<double>{};
    int branch = sample_branch(ms, st.u01());
    std::vector<double> noise =
        draw_gaussian_matrix(st, 3, static_cast<int>(Y.size()));
    std::vector<double> chi = chi_values(f, ms, branch, Y, noise);
    double weight = 1.0;
    for (size_t j = 0; j < Y.size(); ++j) {
      weight *= 1.0 - model.phi(chi[j], th) / rate;
      if (weight <= 0.0) {
        weight = 0.0;
        break;
      }
    }
    bool accept = weight >= 1.0 || st.u01() <= weight;
    if (accept) {
      res.skeleton.frame = f;
      res.skeleton.times = std::move(Y);
      res.skeleton.values = std::move(chi);
      res.skeleton.min_value = ms.m;
      res.skeleton.tau = tau_of(ms, branch);
      return res;
    }
  }
  throw std::runtime_error("ea_sample_bridge: no acceptance within proposal cap");
}

double am_estimate(const TransformedModel& model, const ParameterVector& th,
                   const BridgeFrame& f, Stream& st,
                   std::optional<double> rate_override) {
  double E = st.exponential();
  double Z = st.gaussian();
  MinSplit ms = split_at_minimum(f, E, Z);
  double r = model.r_sup(ms.m, th);
  double rate = rate_override.value_or(r);
  if (rate < r - 1e-9)
    throw std::runtime_error("am_estimate: override rate below r_sup(m)");
  if (rate <= 0.0) return 1.0;
  std::vector<double> Y = draw_poisson_process(st, rate, f.t);
  int branch = sample_branch(ms, st.u01());
  std::vector<double> noise =
      draw_gaussian_matrix(st, 3, static_cast<int>(Y.size()));
  std::vector<double> chi = chi_values(f, ms, branch, Y, noise);
  double weight = 1.0;
  for (size_t j = 0; j < Y.size(); ++j) {
    weight *= 1.0 - model.phi(chi[j], th) / rate;
    if (weight <= 0.0) return 0.0;
  }
  return std::min(weight, 1.0);
}

}  // namespace sam
