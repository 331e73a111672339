#pragma once

// Reference computations written independently of the library, used to pin
// derived values in the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

// det via Gaussian elimination with partial pivoting.
inline double det(Mat a) {
  const std::size_t n = a.size();
  double d = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(a[i][k]) > std::fabs(a[piv][k])) piv = i;
    if (a[piv][k] == 0.0) return 0.0;
    if (piv != k) {
      std::swap(a[piv], a[k]);
      d = -d;
    }
    d *= a[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= l * a[k][j];
    }
  }
  return d;
}

// Number of eigenvalues of m strictly below t: sign changes in the sequence
// 1, D_1(t), ..., D_n(t) of leading principal minors of m - t I, each minor a
// pivoted determinant. A zero minor takes the sign opposite to its predecessor.
inline int count_below(const Mat& m, double t) {
  const std::size_t n = m.size();
  int changes = 0;
  double prev = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    Mat a(k, std::vector<double>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) a[i][j] = m[i][j] - (i == j ? t : 0.0);
    double dk = det(a);
    if (dk == 0.0) dk = -prev;
    if ((dk < 0.0) != (prev < 0.0)) ++changes;
    prev = dk;
  }
  return changes;
}

// All eigenvalues ascending, each by bisection on the count inside the Gershgorin interval.
inline std::vector<double> eigenvalues_bisect(const Mat& m) {
  const std::size_t n = m.size();
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r += std::fabs(m[i][j]);
    lo = (i == 0) ? m[i][i] - r : std::min(lo, m[i][i] - r);
    hi = (i == 0) ? m[i][i] + r : std::max(hi, m[i][i] + r);
  }
  const double pad = 1e-9 * (1.0 + std::max(std::fabs(lo), std::fabs(hi)));
  lo -= pad;
  hi += pad;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
      const double c = 0.5 * (a + b);
      if (count_below(m, c) > static_cast<int>(k))
        b = c;
      else
        a = c;
    }
    out[k] = 0.5 * (a + b);
  }
  return out;
}

// Eigenvalues of [[a, b], [b, c]] ascending.
inline std::pair<double, double> eig2(double a, double b, double c) {
  const double m = 0.5 * (a + c);
  const double r = std::hypot(0.5 * (a - c), b);
  return {m - r, m + r};
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 300) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int i = 0; i < iters; ++i) {
    if (f(c) < f(d))
      b = d;
    else
      a = c;
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return f(0.5 * (a + b));
}

// P(min of n iid U[0,1] <= t)
inline double min_uniform_cdf(int n, double t) { return 1.0 - std::pow(1.0 - t, n); }

}  // namespace oracle
