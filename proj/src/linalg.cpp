#include "sam/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace sam {

Mat mat_mul(const Mat& x, const Mat& y) {
  if (x.n != y.n) throw std::invalid_argument("mat_mul: size mismatch");
  Mat r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      double v = x.at(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < x.n; ++j) r.at(i, j) += v * y.at(k, j);
    }
  return r;
}

Mat mat_scale(const Mat& x, double s) {
  Mat r = x;
  for (auto& v : r.a) v *= s;
  return r;
}

bool mat_invert(const Mat& x, Mat& out) {
  int n = x.n;
  Mat w = x;
  out = Mat(n);
  for (int i = 0; i < n; ++i) out.at(i, i) = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::fabs(w.at(col, col));
    for (int r = col + 1; r < n; ++r) {
      double v = std::fabs(w.at(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (!(best > 0.0) || !std::isfinite(best)) return false;
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(w.at(piv, j), w.at(col, j));
        std::swap(out.at(piv, j), out.at(col, j));
      }
    }
    double d = w.at(col, col);
    for (int j = 0; j < n; ++j) {
      w.at(col, j) /= d;
      out.at(col, j) /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = w.at(r, col);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        w.at(r, j) -= f * w.at(col, j);
        out.at(r, j) -= f * out.at(col, j);
      }
    }
  }
  return true;
}

bool mat_is_pd(const Mat& x) {
  int n = x.n;
  Mat l(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = x.at(i, j);
      for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) return false;
        l.at(i, i) = std::sqrt(s);
      } else {
        l.at(i, j) = s / l.at(j, j);
      }
    }
  }
  return true;
}

Mat mat_symmetrize(const Mat& x) {
  Mat r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j)
      r.at(i, j) = 0.5 * (x.at(i, j) + x.at(j, i));
  return r;
}

}  // namespace sam
