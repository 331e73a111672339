#include "adamprecond/quadratics.hpp"

#include <algorithm>
#include <cmath>

#include "adamprecond/errors.hpp"
#include "adamprecond/io.hpp"
#include "adamprecond/rng.hpp"

namespace adamprecond {

namespace {

constexpr std::uint64_t kInitStream = 0x1417;

bool off_diagonal_zero(const SymMatrix& q) {
  for (std::size_t i = 0; i < q.dim(); ++i)
    for (std::size_t j = 0; j < q.dim(); ++j)
      if (i != j && q(i, j) != 0.0) return false;
  return true;
}

}  // namespace

void InitSpec::validate() const {
  require(b > 0.0, ErrorKind::InvalidArgument, "B must be positive");
  require(p > 0.0 && p < 1.0, ErrorKind::InvalidArgument, "p must lie in (0, 1)");
  require(theta > 0.0 && theta <= 1.0, ErrorKind::InvalidArgument, "theta must lie in (0, 1]");
  require(zeta >= 1.0, ErrorKind::InvalidArgument, "zeta must be at least 1");
}

QuadraticProblem make_problem(const SymMatrix& q, Vec x_star, std::string generator,
                              std::uint64_t seed, bool normalize) {
  require(x_star.size() == q.dim(), ErrorKind::InvalidArgument, "x_star has wrong length");
  QuadraticProblem prob;
  prob.q = q;
  prob.x_star = std::move(x_star);
  prob.generator = std::move(generator);
  prob.seed = seed;
  prob.eig = eig_sym(prob.q);
  require(prob.lambda_min() > 0.0, ErrorKind::BadSpectrum, "Hessian is not positive definite");
  if (normalize) {
    prob.q = SymMatrix(scaled(prob.q.matrix(), 1.0 / prob.lambda_min()));
    prob.eig = eig_sym(prob.q);
    prob.normalized = true;
  }
  prob.diagonal = off_diagonal_zero(prob.q);
  return prob;
}

QuadraticProblem make_diagonal(std::size_t d, const Vec& spectrum, const Vec& x_star) {
  require(spectrum.size() == d && d >= 1, ErrorKind::InvalidArgument, "spectrum must have d entries");
  const double lo = *std::min_element(spectrum.begin(), spectrum.end());
  require(lo == 1.0, ErrorKind::BadSpectrum, "spectrum minimum must equal 1");
  for (double s : spectrum) require(std::isfinite(s), ErrorKind::BadSpectrum, "non-finite eigenvalue");
  QuadraticProblem prob = make_problem(SymMatrix(Matrix::diagonal(spectrum)), x_star, "diagonal", 0, false);
  prob.normalized = true;
  return prob;
}

QuadraticProblem make_diag_dominant(std::size_t d, double nu, const Vec& diag, std::uint64_t seed) {
  require(diag.size() == d && d >= 1, ErrorKind::InvalidArgument, "diag must have d entries");
  require(nu >= 0.0 && nu < 1.0, ErrorKind::InvalidArgument, "nu must lie in [0, 1)");
  for (double v : diag) require(v > 0.0, ErrorKind::InvalidArgument, "diagonal entries must be positive");

  Rng rng(seed);
  Matrix w(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j) w(i, j) = rng.uniform(-1.0, 1.0);
  for (std::size_t i = 0; i < d; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      if (j != i) row += std::abs(w(i, j));
    const double s = row > 0.0 ? nu * diag[i] / row : 0.0;
    for (std::size_t j = 0; j < d; ++j) w(i, j) = j == i ? diag[i] : w(i, j) * s;
  }

  SymMatrix q(w);
  bool ok = false;
  for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
    Vec shrink(d, 1.0);
    ok = true;
    for (std::size_t i = 0; i < d; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) row += std::abs(q(i, j));
      if (row > nu * q(i, i)) {
        ok = false;
        shrink[i] = nu * q(i, i) / row * (1.0 - 1e-15);
      }
    }
    if (ok) break;
    Matrix m = q.matrix();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        if (i != j) m(i, j) *= std::min(shrink[i], shrink[j]);
    q = SymMatrix(m);
  }
  require(ok, ErrorKind::ConstructionFailure, "dominance could not be restored after symmetrization");
  return make_problem(q, Vec(d, 0.0), "diag_dominant", seed, true);
}

QuadraticProblem make_wishart(std::size_t d, double mean, std::uint64_t seed) {
  require(d >= 2, ErrorKind::InvalidArgument, "wishart needs d >= 2");
  Rng rng(seed);
  Matrix a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = rng.normal(mean, 1.0);
  const SymMatrix q(scaled(a * a.transpose(), 1.0 / static_cast<double>(d)));
  const EigenDecomposition raw = eig_sym(q);
  if (raw.eigenvalues.front() < 1e-12)
    throw Error(ErrorKind::SingularDraw, "raw wishart draw is numerically singular");
  return make_problem(q, Vec(d, 0.0), "wishart", seed, true);
}

QuadraticProblem make_adversarial_2x2(double b) {
  require(b > 1.0, ErrorKind::InvalidArgument, "b must exceed 1");
  QuadraticProblem prob = make_problem(SymMatrix(2, {b, b - 1.0, b - 1.0, b}), Vec(2, 0.0), "adversarial", 0, false);
  prob.normalized = true;
  return prob;
}

Vec log_spectrum(std::size_t d, double kappa) {
  require(kappa >= 1.0 && d >= 1, ErrorKind::BadSpectrum, "kappa must be at least 1");
  Vec s(d, 1.0);
  if (d == 1) return s;
  for (std::size_t i = 1; i < d; ++i)
    s[i] = std::pow(kappa, static_cast<double>(i) / static_cast<double>(d - 1));
  s[d - 1] = kappa;
  return s;
}

SpectralSummary spectral_summary(const QuadraticProblem& prob) {
  const std::size_t d = prob.dim();
  SpectralSummary s;
  s.dim = d;
  require(prob.lambda_min() > 0.0, ErrorKind::BadSpectrum, "Hessian is not positive definite");
  s.kappa = prob.lambda_max() / prob.lambda_min();

  const Vec dg = prob.q.diag();
  s.q_min = *std::min_element(dg.begin(), dg.end());
  s.q_max = *std::max_element(dg.begin(), dg.end());
  s.kappa_diag = s.q_max / s.q_min;

  Matrix jac(d, d), gram(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      jac(i, j) = prob.q(i, j) / std::sqrt(dg[i] * dg[j]);
      gram(i, j) = prob.q(i, j) / (dg[i] * dg[j]);
    }
  // eigenvalues of D^{-1/2} Q D^{-1/2} are the squared singular values of Qbar
  const Vec mu = eig_sym(SymMatrix(jac)).eigenvalues;
  s.mu1 = mu.front();
  s.mu2 = mu.back();
  s.kappa_bar = s.mu2 / s.mu1;
  // D^{-1} Q D^{-1} is the Gram matrix Qhat Qhat^T
  const Vec rho_sq = eig_sym(SymMatrix(gram)).eigenvalues;
  s.rho1 = std::sqrt(std::max(0.0, rho_sq.front()));
  s.rho2 = std::sqrt(rho_sq.back());
  if (!(s.rho1 > 1e-14 * s.rho2)) throw Error(ErrorKind::SingularMatrix, "Qhat is numerically singular");
  s.kappa_hat = s.rho2 / s.rho1;
  return s;
}

std::pair<double, Vec> value_and_grad(const QuadraticProblem& prob, const Vec& x) {
  const std::size_t d = prob.dim();
  Vec z(d);
  for (std::size_t i = 0; i < d; ++i) z[i] = x[i] - prob.x_star[i];
  Vec g(d);
  if (prob.diagonal) {
    for (std::size_t i = 0; i < d; ++i) g[i] = prob.q(i, i) * z[i];
  } else {
    g = prob.q.matrix() * z;
  }
  return {0.5 * dot(z, g), std::move(g)};
}

double value(const QuadraticProblem& prob, const Vec& x) { return value_and_grad(prob, x).first; }

Vec sample_init(const QuadraticProblem& prob, const InitSpec& spec, InitMode mode) {
  spec.validate();
  const std::size_t d = prob.dim();
  Rng rng(derive_seed(spec.seed, kInitStream));
  Vec y(d);
  for (double& v : y) v = rng.uniform(-2.0 * spec.b, 2.0 * spec.b);
  if (mode == InitMode::UniformBox) {
    require(norm_inf(prob.x_star) <= spec.b, ErrorKind::BoundViolation, "|x*|_inf exceeds B");
    return y;
  }
  const Vec dg = prob.q.diag();
  Vec tx = prob.q.matrix() * prob.x_star;
  for (std::size_t i = 0; i < d; ++i) tx[i] /= dg[i];
  require(norm_inf(tx) <= spec.b, ErrorKind::BoundViolation, "|T x*|_inf exceeds B");
  // T x0 = y  <=>  Q x0 = D y
  for (std::size_t i = 0; i < d; ++i) y[i] *= dg[i];
  return cholesky_solve(prob.q, y);
}

Matrix qbar_matrix(const QuadraticProblem& prob) {
  const std::size_t d = prob.dim();
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      m(i, j) = prob.eig.eigenvectors(i, j) * std::sqrt(prob.eig.eigenvalues[j]) / std::sqrt(prob.q(i, i));
  return m;
}

Matrix qhat_matrix(const QuadraticProblem& prob) {
  const std::size_t d = prob.dim();
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      m(i, j) = prob.eig.eigenvectors(i, j) * std::sqrt(prob.eig.eigenvalues[j]) / prob.q(i, i);
  return m;
}

Vec gbar_of(const QuadraticProblem& prob, const Vec& x) {
  const std::size_t d = prob.dim();
  Vec out(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += prob.eig.eigenvectors(i, j) * (x[i] - prob.x_star[i]);
    out[j] = std::sqrt(prob.eig.eigenvalues[j]) * s;
  }
  return out;
}

Vec ghat_of(const QuadraticProblem& prob, const Vec& x) {
  Vec g = value_and_grad(prob, x).second;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] /= prob.q(i, i);
  return g;
}

std::string problem_to_json(const QuadraticProblem& prob) {
  Json j;
  j["dim"] = prob.dim();
  j["q"] = prob.q.matrix().data();
  j["x_star"] = prob.x_star;
  j["generator"] = prob.generator;
  j["seed"] = prob.seed;
  j["normalized"] = prob.normalized;
  return dump_json(j);
}

QuadraticProblem problem_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("problem JSON: ") + e.what());
  }
  try {
    const auto d = j.at("dim").get<std::size_t>();
    const auto q = j.at("q").get<std::vector<double>>();
    require(q.size() == d * d, ErrorKind::InvalidArgument, "q must hold dim*dim entries");
    QuadraticProblem prob = make_problem(SymMatrix(d, q), j.at("x_star").get<Vec>(),
                                         j.value("generator", std::string("explicit")),
                                         j.value("seed", std::uint64_t{0}), false);
    prob.normalized = j.value("normalized", false);
    if (prob.normalized)
      require(std::abs(prob.lambda_min() - 1.0) <= 1e-8, ErrorKind::BadSpectrum,
              "normalized flag set but lambda_min differs from 1");
    return prob;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("problem JSON: ") + e.what());
  }
}

std::string summary_to_json(const SpectralSummary& s) {
  Json j;
  j["dim"] = s.dim;
  j["kappa"] = s.kappa;
  j["kappa_diag"] = s.kappa_diag;
  j["kappa_bar"] = s.kappa_bar;
  j["kappa_hat"] = s.kappa_hat;
  j["mu1"] = s.mu1;
  j["mu2"] = s.mu2;
  j["rho1"] = s.rho1;
  j["rho2"] = s.rho2;
  j["q_min"] = s.q_min;
  j["q_max"] = s.q_max;
  return dump_json(j);
}

const char* to_string(InitMode mode) {
  return mode == InitMode::UniformBox ? "uniform_box" : "assumption_general";
}

}  // namespace adamprecond
