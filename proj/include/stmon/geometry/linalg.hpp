#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace stmon::geom {

using Vec = std::vector<double>;

inline double dot(const Vec &a, const Vec &b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Dense row-major matrix, just large enough for the affine dynamics used here.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  Mat(int r, int c, std::vector<double> v) : rows(r), cols(c), a(std::move(v)) {
    assert(a.size() == static_cast<std::size_t>(r) * c);
  }

  double &operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Vec operator*(const Mat &m, const Vec &v) {
  assert(static_cast<int>(v.size()) == m.cols);
  Vec r(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r[i] += m(i, j) * v[j];
  return r;
}

inline Mat operator*(const Mat &x, const Mat &y) {
  assert(x.cols == y.rows);
  Mat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

inline Mat operator+(const Mat &x, const Mat &y) {
  assert(x.rows == y.rows && x.cols == y.cols);
  Mat r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
  return r;
}

inline Mat scale(const Mat &x, double s) {
  Mat r = x;
  for (double &v : r.a) v *= s;
  return r;
}

}  // namespace stmon::geom
