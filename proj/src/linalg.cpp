#include "adamprecond/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adamprecond/errors.hpp"

namespace adamprecond {

bool close(double a, double b, double atol, double rtol) {
  return std::abs(a - b) <= std::max(atol, rtol * std::max(std::abs(a), std::abs(b)));
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  require(a_.size() == rows * cols, ErrorKind::InvalidArgument, "entry count does not match shape");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vec& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

bool Matrix::finite() const {
  return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorKind::InvalidArgument, "shape mismatch in product");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vec operator*(const Matrix& a, const Vec& x) {
  require(a.cols() == x.size(), ErrorKind::InvalidArgument, "shape mismatch in product");
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::InvalidArgument,
          "shape mismatch in difference");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

Matrix scaled(const Matrix& a, double s) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
  return c;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm1(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

double norm_inf(const Vec& a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

SymMatrix::SymMatrix(const Matrix& m) : m_(m) {
  require(m.rows() == m.cols(), ErrorKind::InvalidArgument, "symmetric matrix must be square");
  require(m.rows() >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = i + 1; j < dim(); ++j) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      m_(i, j) = avg;
      m_(j, i) = avg;
    }
}

SymMatrix::SymMatrix(std::size_t d, const std::vector<double>& row_major)
    : SymMatrix(Matrix(d, d, row_major)) {}

Vec SymMatrix::diag() const {
  Vec d(dim());
  for (std::size_t i = 0; i < dim(); ++i) d[i] = m_(i, i);
  return d;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    if (theta < 0.0) t = -t;
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();
  for (std::size_t r = 0; r < n; ++r) {
    if (r == p || r == q) continue;
    const double arp = a(r, p), arq = a(r, q);
    const double np = c * arp - s * arq;
    const double nq = s * arp + c * arq;
    a(r, p) = np;
    a(p, r) = np;
    a(r, q) = nq;
    a(q, r) = nq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double vrp = v(r, p), vrq = v(r, q);
    v(r, p) = c * vrp - s * vrq;
    v(r, q) = s * vrp + c * vrq;
  }
}

}  // namespace

EigenDecomposition eig_sym(const SymMatrix& m) {
  const Matrix& src = m.matrix();
  require(src.finite(), ErrorKind::NonFinite, "eigensolver input has non-finite entries");
  const std::size_t n = m.dim();
  Matrix a = src;
  Matrix v = Matrix::identity(n);
  const double target = 1e-14 * src.frobenius();
  constexpr int kMaxSweeps = 100;

  int sweeps = 0;
  while (off_diagonal_norm(a) > target) {
    if (sweeps == kMaxSweeps)
      throw Error(ErrorKind::NonConvergence, "Jacobi sweeps exhausted without convergence");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    ++sweeps;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.sweeps = sweeps;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.eigenvalues[k] = a(j, j);
    std::size_t imax = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v(r, j)) > std::abs(v(imax, j))) imax = r;
    const double sign = v(imax, j) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = sign * v(r, j);
  }
  return out;
}

Vec singular_values(const Matrix& m) {
  const bool tall = m.rows() >= m.cols();
  const Matrix g = tall ? m.transpose() * m : m * m.transpose();
  Vec ev = eig_sym(SymMatrix(g)).eigenvalues;
  Vec s(ev.size());
  for (std::size_t i = 0; i < ev.size(); ++i) s[i] = std::sqrt(std::max(0.0, ev[ev.size() - 1 - i]));
  return s;
}

GershgorinBound gershgorin(const SymMatrix& m) {
  GershgorinBound b;
  const std::size_t n = m.dim();
  b.centers.resize(n);
  b.radii.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r += std::abs(m(i, j));
    b.centers[i] = m(i, i);
    b.radii[i] = r;
    const double lo = m(i, i) - r, hi = m(i, i) + r;
    b.lower = i == 0 ? lo : std::min(b.lower, lo);
    b.upper = i == 0 ? hi : std::max(b.upper, hi);
  }
  return b;
}

namespace {

double ratio_or_throw(double smax, double smin) {
  if (!(smax > 0.0) || smin <= 1e-14 * smax)
    throw Error(ErrorKind::SingularMatrix, "smallest singular value is numerically zero");
  return smax / smin;
}

}  // namespace

double cond(const SymMatrix& m) {
  const Vec ev = eig_sym(m).eigenvalues;
  double smax = 0.0, smin = std::abs(ev[0]);
  for (double e : ev) {
    smax = std::max(smax, std::abs(e));
    smin = std::min(smin, std::abs(e));
  }
  return ratio_or_throw(smax, smin);
}

double cond(const Matrix& m) {
  const Vec s = singular_values(m);
  return ratio_or_throw(s.front(), s.back());
}

Vec cholesky_solve(const SymMatrix& a, const Vec& b) {
  const std::size_t n = a.dim();
  require(b.size() == n, ErrorKind::InvalidArgument, "right-hand side has wrong length");
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > 0.0)) throw Error(ErrorKind::SingularMatrix, "matrix is not positive definite");
    l(j, j) = std::sqrt(s);
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / l(j, j);
    }
  }
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

}  // namespace adamprecond
