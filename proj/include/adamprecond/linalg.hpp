#pragma once

#include <cstddef>
#include <vector>

namespace adamprecond {

using Vec = std::vector<double>;

inline constexpr double kAtol = 1e-12;
inline constexpr double kRtol = 1e-10;

// |a - b| <= max(atol, rtol * max(|a|, |b|))
bool close(double a, double b, double atol = kAtol, double rtol = kRtol);

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vec& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  const std::vector<double>& data() const { return a_; }

  Matrix transpose() const;
  double frobenius() const;
  bool finite() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vec operator*(const Matrix& a, const Vec& x);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& a, double s);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm1(const Vec& a);
double norm_inf(const Vec& a);

// Square matrix kept exactly symmetric; off-diagonal pairs are averaged on construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);
  SymMatrix(std::size_t d, const std::vector<double>& row_major);

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }
  Vec diag() const;

 private:
  Matrix m_;
};

struct EigenDecomposition {
  Vec eigenvalues;      // ascending
  Matrix eigenvectors;  // column j pairs with eigenvalues[j]
  int sweeps = 0;
};

struct GershgorinBound {
  Vec centers;
  Vec radii;
  double lower = 0.0;
  double upper = 0.0;
};

EigenDecomposition eig_sym(const SymMatrix& m);

// Descending.
Vec singular_values(const Matrix& m);

GershgorinBound gershgorin(const SymMatrix& m);

double cond(const SymMatrix& m);
double cond(const Matrix& m);

// Solve a x = b for symmetric positive-definite a.
Vec cholesky_solve(const SymMatrix& a, const Vec& b);

}  // namespace adamprecond
