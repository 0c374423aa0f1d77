#include "sam/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sam {

double mean_of(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("mean_of: empty");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance_of(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("variance_of: need n >= 2");
  double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double ks_one_sample(std::vector<double> x,
                     const std::function<double(double)>& cdf) {
  if (x.empty()) throw std::invalid_argument("ks_one_sample: empty");
  std::sort(x.begin(), x.end());
  double n = static_cast<double>(x.size());
  double d = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double f = cdf(x[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

double ks_coefficient(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }

double ks_critical_one(double alpha, size_t n) {
  return ks_coefficient(alpha) / std::sqrt(static_cast<double>(n));
}

double ks_critical_two(double alpha, size_t n1, size_t n2) {
  double m = static_cast<double>(n1), n = static_cast<double>(n2);
  return ks_coefficient(alpha) * std::sqrt((m + n) / (m * n));
}

}  // namespace sam
