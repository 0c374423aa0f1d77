#include "sam/datasim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sam/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sam {

namespace {

int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

// One checked Euler substep of total length h; exits are rejected and the
// local step halved, at most 10 times across the substep.
double euler_substep(const TransformedModel& model, const ParameterVector& th,
                     const StateSpace& ts, double x, double h, Stream& st) {
  double remaining = h;
  double hloc = h;
  int halvings = 0;
  while (remaining > 0.0) {
    double step = std::min(hloc, remaining);
    double xn = x + model.alpha(x, th) * step + std::sqrt(step) * st.gaussian();
    if (xn > ts.lo && xn < ts.hi) {
      x = xn;
      remaining -= step;
      continue;
    }
    if (++halvings > 10)
      throw std::runtime_error(
          "simulate_dataset: trajectory exits the state space");
    hloc *= 0.5;
  }
  return x;
}

}  // namespace

std::vector<ObsPair> series_to_pairs(const ObservationSeries& s) {
  if (s.times.size() != s.values.size() || s.times.size() < 2)
    throw std::invalid_argument("series_to_pairs: need at least two points");
  std::vector<ObsPair> pairs;
  pairs.reserve(s.times.size() - 1);
  for (size_t i = 0; i + 1 < s.times.size(); ++i) {
    double t = s.times[i + 1] - s.times[i];
    if (!(t > 0.0))
      throw std::invalid_argument("series_to_pairs: times must increase");
    pairs.push_back({s.values[i], s.values[i + 1], t});
  }
  return pairs;
}

ObservationSeries simulate_dataset(const TransformedModel& model,
                                   const ParameterVector& th0, double v0,
                                   int n, double dt, const EulerConfig& euler,
                                   uint64_t seed) {
  if (n < 1 || !(dt > 0.0)) throw std::invalid_argument("simulate_dataset: bad n or dt");
  StateSpace ss = model.state_space();
  if (!(v0 > ss.lo && v0 < ss.hi))
    throw std::invalid_argument("simulate_dataset: v0 outside the state space");
  StateSpace ts = model.transformed_space(th0);

  long sub = 1L << euler.substeps_log2;
  double h = dt / static_cast<double>(sub);
  double x = model.eta(v0, th0);
  Stream st(make_key(seed, 0, 0, Purpose::euler));

  ObservationSeries out;
  out.times.reserve(static_cast<size_t>(n) + 1);
  out.values.reserve(static_cast<size_t>(n) + 1);
  out.times.push_back(0.0);
  out.values.push_back(v0);
  for (int i = 1; i <= n; ++i) {
    for (long s = 0; s < sub; ++s) x = euler_substep(model, th0, ts, x, h, st);
    out.times.push_back(dt * static_cast<double>(i));
    out.values.push_back(model.eta_inv(x, th0));
  }
  return out;
}

namespace {

// Endpoint hit indicator for one Euler path of the transformed diffusion.
int density_path_hit(const TransformedModel& model, const ParameterVector& th,
                     const StateSpace& ts, double x0, double y, double t,
                     long steps, double half_bin, uint64_t seed, long p) {
  Stream st(make_key(seed, 0, static_cast<uint32_t>(p), Purpose::euler));
  double h = t / static_cast<double>(steps);
  double x = x0;
  for (long s = 0; s < steps; ++s)
    x = euler_substep(model, th, ts, x, h, st);
  return std::fabs(x - y) <= half_bin ? 1 : 0;
}

}  // namespace

DensityEstimate brute_density(const TransformedModel& model,
                              const ParameterVector& th, double v, double w,
                              double t, const EulerConfig& euler, uint64_t seed,
                              int threads) {
  if (!(t > 0.0) || euler.paths < 1)
    throw std::invalid_argument("brute_density: bad t or path count");
  double x0 = model.eta(v, th);
  double y = model.eta(w, th);
  StateSpace ts = model.transformed_space(th);
  long steps = 1L << euler.substeps_log2;
  double bin = euler.bin_width > 0.0 ? euler.bin_width : std::sqrt(t) / 50.0;
  double half_bin = 0.5 * bin;
  long m = euler.paths;
  long hits = 0;
#ifdef _OPENMP
  if (threads != 1) {
#pragma omp parallel for schedule(static) reduction(+ : hits) \
    num_threads(resolve_threads(threads))
    for (long p = 0; p < m; ++p)
      hits += density_path_hit(model, th, ts, x0, y, t, steps, half_bin, seed, p);
  } else
#else
  (void)threads;
#endif
  {
    for (long p = 0; p < m; ++p)
      hits += density_path_hit(model, th, ts, x0, y, t, steps, half_bin, seed, p);
  }
  DensityEstimate de;
  de.hits = hits;
  de.paths = m;
  de.bin_width = bin;
  double phat = static_cast<double>(hits) / static_cast<double>(m);
  double scale = std::fabs(model.eta_du(w, th)) / bin;
  de.value = scale * phat;
  de.se = scale * std::sqrt(phat * (1.0 - phat) / static_cast<double>(m));
  return de;
}

DensityEstimate brute_density_serial(const TransformedModel& model,
                                     const ParameterVector& th, double v,
                                     double w, double t,
                                     const EulerConfig& euler, uint64_t seed) {
  return brute_density(model, th, v, w, t, euler, seed, 1);
}

namespace {

struct OracleSlot {
  bool accepted = false;
  double tau = 0.0;
  double min_value = 0.0;
  std::vector<double> values;
};

void oracle_proposal(const BridgeFrame& f, double m_lo, double m_hi,
                     const std::vector<double>& grid,
                     const std::vector<size_t>& qidx, uint64_t seed, long p,
                     std::vector<double>& w, OracleSlot& slot) {
  Stream st(make_key(seed, 1, static_cast<uint32_t>(p), Purpose::oracle));
  size_t gn = grid.size();
  w[0] = f.x;
  for (size_t i = 1; i + 1 < gn; ++i) {
    double rem = f.t - grid[i - 1];
    double step = grid[i] - grid[i - 1];
    double mean = w[i - 1] + (f.y - w[i - 1]) * step / rem;
    double var = step * (f.t - grid[i]) / rem;
    w[i] = mean + std::sqrt(var) * st.gaussian();
  }
  w[gn - 1] = f.y;

  double gmin = std::numeric_limits<double>::infinity();
  size_t win = 0;
  for (size_t i = 0; i + 1 < gn; ++i) {
    double hseg = grid[i + 1] - grid[i];
    BridgeMin bm =
        bridge_minimum(BridgeFrame{w[i], w[i + 1], hseg}, st.exponential());
    if (bm.m < gmin) {
      gmin = bm.m;
      win = i;
    }
  }
  slot.accepted = gmin > m_lo && gmin < m_hi;
  if (!slot.accepted) return;
  slot.tau = 0.5 * (grid[win] + grid[win + 1]);
  slot.min_value = gmin;
  slot.values.resize(qidx.size());
  for (size_t q = 0; q < qidx.size(); ++q) slot.values[q] = w[qidx[q]];
}

}  // namespace

BridgeOracleSample conditioned_bridge_sample(
    const BridgeFrame& f, double m_lo, double m_hi,
    std::span<const double> query_times, int substeps_log2, long want,
    long max_proposals, uint64_t seed, int threads) {
  if (!(m_lo < m_hi) || !(m_hi < std::min(f.x, f.y)))
    throw std::invalid_argument("conditioned_bridge_sample: bad minimum bin");
  if (want < 1) throw std::invalid_argument("conditioned_bridge_sample: want < 1");

  long segs = 1L << substeps_log2;
  std::vector<double> grid;
  grid.reserve(static_cast<size_t>(segs) + 1 + query_times.size());
  for (long i = 0; i <= segs; ++i)
    grid.push_back(f.t * static_cast<double>(i) / static_cast<double>(segs));
  for (double q : query_times) {
    if (!(q > 0.0 && q < f.t))
      throw std::invalid_argument("conditioned_bridge_sample: query outside (0,t)");
    grid.push_back(q);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [&](double a, double b) {
                           return std::fabs(a - b) <= 1e-12 * f.t;
                         }),
             grid.end());
  std::vector<size_t> qidx;
  for (double q : query_times) {
    auto it = std::lower_bound(grid.begin(), grid.end(), q - 2e-12 * f.t);
    qidx.push_back(static_cast<size_t>(it - grid.begin()));
  }

  BridgeOracleSample out;
  out.values.resize(query_times.size());
  const long block = 16384;
  std::vector<OracleSlot> slots(static_cast<size_t>(block));

  long next = 0;
  while (static_cast<long>(out.tau.size()) < want && next < max_proposals) {
    long count = std::min(block, max_proposals - next);
#ifdef _OPENMP
    if (threads != 1) {
#pragma omp parallel num_threads(resolve_threads(threads))
      {
        std::vector<double> w(grid.size());
#pragma omp for schedule(static)
        for (long b = 0; b < count; ++b)
          oracle_proposal(f, m_lo, m_hi, grid, qidx, seed, next + b, w,
                          slots[static_cast<size_t>(b)]);
      }
    } else
#else
    (void)threads;
#endif
    {
      std::vector<double> w(grid.size());
      for (long b = 0; b < count; ++b)
        oracle_proposal(f, m_lo, m_hi, grid, qidx, seed, next + b, w,
                        slots[static_cast<size_t>(b)]);
    }
    long used = count;
    for (long b = 0; b < count; ++b) {
      const OracleSlot& s = slots[static_cast<size_t>(b)];
      if (!s.accepted) continue;
      out.tau.push_back(s.tau);
      out.min_value.push_back(s.min_value);
      for (size_t q = 0; q < qidx.size(); ++q)
        out.values[q].push_back(s.values[q]);
      if (static_cast<long>(out.tau.size()) == want) {
        used = b + 1;
        break;
      }
    }
    next += used;
  }
  out.proposals = next;
  out.accepted = static_cast<long>(out.tau.size());
  if (out.accepted < std::min<long>(want, 100) &&
      next >= max_proposals)
    throw std::runtime_error(
        "conditioned_bridge_sample: acceptance starved within proposal cap");
  return out;
}

}  // namespace sam
