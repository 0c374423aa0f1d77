// Sample moments and Kolmogorov-Smirnov machinery used by the
// distributional test suites and the validation checks.
#pragma once

#include <functional>
#include <vector>

namespace sam {

double mean_of(const std::vector<double>& x);
double variance_of(const std::vector<double>& x);  // unbiased, n >= 2

// One-sample KS statistic against a continuous CDF.
double ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);

// Two-sample KS statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic critical scale c(alpha) = sqrt(-ln(alpha/2)/2).
double ks_coefficient(double alpha);

// Critical values: reject when D exceeds these.
double ks_critical_one(double alpha, size_t n);
double ks_critical_two(double alpha, size_t n1, size_t n2);

}  // namespace sam
