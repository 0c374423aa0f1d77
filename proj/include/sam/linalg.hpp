// Dense d x d helpers for the low-dimensional information matrices.
#pragma once

#include <vector>

namespace sam {

struct Mat {
  int n = 0;
  std::vector<double> a;  // row-major n x n

  Mat() = default;
  explicit Mat(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}

  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

Mat mat_mul(const Mat& x, const Mat& y);
Mat mat_scale(const Mat& x, double s);

// Gauss-Jordan with partial pivoting; false when singular.
bool mat_invert(const Mat& x, Mat& out);

// Cholesky test for (strict) positive definiteness of a symmetric matrix.
bool mat_is_pd(const Mat& x);

// (x + x^T) / 2.
Mat mat_symmetrize(const Mat& x);

}  // namespace sam
