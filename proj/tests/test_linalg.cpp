#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "adamprecond/errors.hpp"
#include "adamprecond/linalg.hpp"
#include "adamprecond/rng.hpp"
#include "oracles.hpp"

using namespace adamprecond;

namespace {

oracle::Mat random_sym(std::size_t d, Rng& rng) {
  oracle::Mat m(d, std::vector<double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) m[i][j] = m[j][i] = rng.uniform(-1.0, 1.0);
  return m;
}

SymMatrix to_sym(const oracle::Mat& m) {
  std::vector<double> flat;
  for (const auto& r : m) flat.insert(flat.end(), r.begin(), r.end());
  return SymMatrix(m.size(), flat);
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("eigenvalues agree with the bisection oracle") {
  Rng rng(11);
  for (int s = 0; s < 100; ++s) {
    const std::size_t d = 1 + s % 6;
    const auto m = random_sym(d, rng);
    const auto e = eig_sym(to_sym(m));
    const auto ref = oracle::eigenvalues_bisect(m);
    for (std::size_t k = 0; k < d; ++k) CHECK(e.eigenvalues[k] == doctest::Approx(ref[k]).epsilon(1e-9));
  }
}

TEST_CASE("eigendecomposition reconstructs and is orthonormal") {
  Rng rng(12);
  for (int s = 0; s < 50; ++s) {
    const std::size_t d = 2 + s % 5;
    const SymMatrix a = to_sym(random_sym(d, rng));
    const auto e = eig_sym(a);
    const Matrix lam = Matrix::diagonal(e.eigenvalues);
    const Matrix rec = e.eigenvectors * lam * e.eigenvectors.transpose();
    CHECK((rec - a.matrix()).frobenius() <= 1e-10 * a.matrix().frobenius());
    const Matrix vtv = e.eigenvectors.transpose() * e.eigenvectors;
    CHECK((vtv - Matrix::identity(d)).frobenius() <= 1e-12);
  }
}

TEST_CASE("product of eigenvalues equals the determinant") {
  Rng rng(13);
  for (int s = 0; s < 30; ++s) {
    const std::size_t d = 1 + s % 6;
    const auto m = random_sym(d, rng);
    const auto e = eig_sym(to_sym(m));
    double prod = 1.0;
    for (double v : e.eigenvalues) prod *= v;
    CHECK(prod == doctest::Approx(oracle::det(m)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("2x2 closed form") {
  const auto e = eig_sym(SymMatrix(2, {3.0, 2.0, 2.0, -1.0}));
  const auto [lo, hi] = oracle::eig2(3.0, 2.0, -1.0);
  CHECK(e.eigenvalues[0] == doctest::Approx(lo).epsilon(1e-14));
  CHECK(e.eigenvalues[1] == doctest::Approx(hi).epsilon(1e-14));
}

TEST_CASE("repeated eigenvalues") {
  const auto e = eig_sym(SymMatrix(3, {2, 0, 0, 0, 2, 0, 0, 0, 5}));
  CHECK(e.eigenvalues[0] == doctest::Approx(2.0));
  CHECK(e.eigenvalues[1] == doctest::Approx(2.0));
  CHECK(e.eigenvalues[2] == doctest::Approx(5.0));
}

TEST_CASE("gershgorin discs enclose the spectrum") {
  Rng rng(14);
  for (int s = 0; s < 30; ++s) {
    const auto m = random_sym(5, rng);
    const auto g = gershgorin(to_sym(m));
    const auto e = eig_sym(to_sym(m));
    CHECK(g.lower <= e.eigenvalues.front() + 1e-12);
    CHECK(g.upper >= e.eigenvalues.back() - 1e-12);
    CHECK(g.radii[0] == doctest::Approx(std::fabs(m[0][1]) + std::fabs(m[0][2]) + std::fabs(m[0][3]) +
                                        std::fabs(m[0][4])));
  }
}

TEST_CASE("singular values are square roots of the Gram eigenvalues") {
  Rng rng(15);
  Matrix a(4, 3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) a(i, j) = rng.normal();
  const Vec sv = singular_values(a);
  const Matrix g = a.transpose() * a;
  oracle::Mat gm(3, std::vector<double>(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) gm[i][j] = g(i, j);
  auto ref = oracle::eigenvalues_bisect(gm);
  std::reverse(ref.begin(), ref.end());
  REQUIRE(sv.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(sv[k] == doctest::Approx(std::sqrt(ref[k])).epsilon(1e-9));
  CHECK(cond(a) == doctest::Approx(sv.front() / sv.back()));
}

TEST_CASE("cholesky solve") {
  const SymMatrix a(3, {4, 1, 0, 1, 3, 1, 0, 1, 2});
  const Vec b{1, 2, 3};
  const Vec x = cholesky_solve(a, b);
  const Vec r = a.matrix() * x;
  for (std::size_t i = 0; i < 3; ++i) CHECK(r[i] == doctest::Approx(b[i]).epsilon(1e-13));
  CHECK_THROWS_AS(cholesky_solve(SymMatrix(2, {1, 2, 2, 1}), Vec{1, 1}), Error);
}

TEST_CASE("symmetric construction averages off-diagonal pairs") {
  const SymMatrix a(Matrix(2, 2, {1.0, 2.0, 4.0, 1.0}));
  CHECK(a(0, 1) == 3.0);
  CHECK(a(1, 0) == 3.0);
  CHECK(cond(SymMatrix(2, {1, 0, 0, 9})) == doctest::Approx(9.0));
}

TEST_CASE("norms and tolerance helper") {
  const Vec v{3, -4};
  CHECK(norm2(v) == 5.0);
  CHECK(norm1(v) == 7.0);
  CHECK(norm_inf(v) == 4.0);
  CHECK(dot(v, v) == 25.0);
  CHECK(close(1.0, 1.0 + 1e-11));
  CHECK_FALSE(close(1.0, 1.0 + 1e-9));
}

}
