#include "sam/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sam {

namespace {

constexpr uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

inline void philox_round(std::array<uint32_t, 4>& c,
                         const std::array<uint32_t, 2>& k) {
  uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM4x32A, c[0], hi0, lo0);
  mulhilo(kPhiloxM4x32B, c[2], hi1, lo1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& ctr,
                                   const std::array<uint32_t, 2>& key) {
  std::array<uint32_t, 4> c = ctr;
  std::array<uint32_t, 2> k = key;
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k[0] += kPhiloxW32A;
      k[1] += kPhiloxW32B;
    }
    philox_round(c, k);
  }
  return c;
}

Stream::Stream(const StreamKey& k) {
  key_ = {static_cast<uint32_t>(k.seed), static_cast<uint32_t>(k.seed >> 32)};
  ctr_ = {0u, k.purpose, k.interval, k.replicate};
}

void Stream::refill() {
  ctr_[0] = block_;
  buf_ = philox4x32(ctr_, key_);
  ++block_;
  if (block_ == 0) throw std::runtime_error("rng: stream block counter wrapped");
  pos_ = 0;
}

uint32_t Stream::next_u32() {
  if (pos_ == 4) refill();
  return buf_[pos_++];
}

uint64_t Stream::next_u64() {
  uint64_t lo = next_u32();
  uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double Stream::u01() {
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are excluded.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::gaussian() { return inv_normal_cdf(u01()); }

double Stream::exponential() { return -std::log(u01()); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// Wichura's PPND16 rational approximations.
double inv_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inv_normal_cdf: p outside (0,1)");
  static const double a[8] = {
      3.3871328727963666080e0,  1.3314166789178437745e2,
      1.9715909503065514427e3,  1.3731693765509461125e4,
      4.5921953931549871457e4,  6.7265770927008700853e4,
      3.3430575583588128105e4,  2.5090809287301226727e3};
  static const double b[8] = {
      1.0,                      4.2313330701600911252e1,
      6.8718700749205790830e2,  5.3941960214247511077e3,
      2.1213794301586595867e4,  3.9307895800092710610e4,
      2.8729085735721942674e4,  5.2264952788528545610e3};
  static const double c[8] = {
      1.42343711074968357734e0,  4.63033784615654529590e0,
      5.76949722146069140550e0,  3.64784832476320460504e0,
      1.27045825245236838258e0,  2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static const double d[8] = {
      1.0,                       2.05319162663775882187e0,
      1.67638483018380384940e0,  6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2,
      5.47593808499534494600e-4, 1.05075007164441684324e-9};
  static const double e[8] = {
      6.65790464350110377720e0,  5.46378491116411436990e0,
      1.78482653991729133580e0,  2.96560571828504891230e-1,
      2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static const double f[8] = {
      1.0,                       5.99832206555887937690e-1,
      1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5,
      1.42151175831644588870e-7, 2.04426310338993978564e-15};
  auto rational = [](const double* num, const double* den, double r) {
    double n = num[7], m = den[7];
    for (int i = 6; i >= 0; --i) {
      n = n * r + num[i];
      m = m * r + den[i];
    }
    return n / m;
  };
  double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    double r = 0.180625 - q * q;
    return q * rational(a, b, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    x = rational(c, d, r - 1.6);
  } else {
    x = rational(e, f, r - 5.0);
  }
  return q < 0.0 ? -x : x;
}

long draw_poisson_count(Stream& st, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::domain_error("draw_poisson_count: bad mean");
  if (mean == 0.0) return 0;
  if (mean <= 30.0) {
    double u = st.u01();
    double pk = std::exp(-mean);
    double cum = pk;
    long k = 0;
    while (u > cum) {
      ++k;
      pk *= mean / static_cast<double>(k);
      cum += pk;
      if (k > 2000) break;  // cum has saturated; u was within an ulp of 1
    }
    return k;
  }
  // Hormann's transformed rejection with squeeze (PTRS).
  double smu = std::sqrt(mean);
  double bb = 0.931 + 2.53 * smu;
  double aa = -0.059 + 0.02483 * bb;
  double inv_alpha = 1.1239 + 1.1328 / (bb - 3.4);
  double vr = 0.9277 - 3.6224 / (bb - 2.0);
  double log_mu = std::log(mean);
  for (;;) {
    double u = st.u01() - 0.5;
    double v = st.u01();
    double us = 0.5 - std::fabs(u);
    double kd = std::floor((2.0 * aa / us + bb) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<long>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    double k = kd;
    double lhs = std::log(v * inv_alpha / (aa / (us * us) + bb));
    double rhs = k * log_mu - mean - std::lgamma(k + 1.0);
    if (lhs <= rhs) return static_cast<long>(kd);
  }
}

std::vector<double> draw_poisson_process(Stream& st, double rate,
                                         double horizon) {
  if (!(rate >= 0.0) || !(horizon > 0.0))
    throw std::domain_error("draw_poisson_process: bad rate or horizon");
  long n = draw_poisson_count(st, rate * horizon);
  std::vector<double> pts(static_cast<size_t>(n));
  for (auto& p : pts) p = horizon * st.u01();
  std::sort(pts.begin(), pts.end());
  return pts;
}

std::vector<double> draw_gaussian_matrix(Stream& st, int rows, int cols) {
  std::vector<double> m(static_cast<size_t>(rows) * cols);
  for (auto& v : m) v = st.gaussian();
  return m;
}

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  // splitmix64 finalizer over seed xor golden-ratio multiples of salt.
  uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace sam
