#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "adamprecond/linalg.hpp"

namespace adamprecond {

// f(x) = 1/2 (x - x*)^T Q (x - x*)
struct QuadraticProblem {
  SymMatrix q;
  Vec x_star;
  bool normalized = false;
  std::string generator = "explicit";
  std::uint64_t seed = 0;
  EigenDecomposition eig;  // cached on construction
  bool diagonal = false;

  std::size_t dim() const { return q.dim(); }
  double lambda_min() const { return eig.eigenvalues.front(); }
  double lambda_max() const { return eig.eigenvalues.back(); }
};

struct SpectralSummary {
  std::size_t dim = 0;
  double kappa = 1.0;
  double kappa_diag = 1.0;
  double kappa_bar = 1.0;
  double kappa_hat = 1.0;
  double mu1 = 1.0, mu2 = 1.0;
  double rho1 = 1.0, rho2 = 1.0;
  double q_min = 1.0, q_max = 1.0;
};

struct InitSpec {
  double b = 1.0;
  double p = 0.75;
  double theta = 1.0;
  double zeta = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class InitMode { UniformBox, AssumptionGeneral };

// Builds a problem from an arbitrary SPD matrix; normalize divides Q by lambda_min.
QuadraticProblem make_problem(const SymMatrix& q, Vec x_star, std::string generator,
                              std::uint64_t seed, bool normalize);

QuadraticProblem make_diagonal(std::size_t d, const Vec& spectrum, const Vec& x_star);
QuadraticProblem make_diag_dominant(std::size_t d, double nu, const Vec& diag, std::uint64_t seed);
QuadraticProblem make_wishart(std::size_t d, double mean, std::uint64_t seed);
QuadraticProblem make_adversarial_2x2(double b);

// d log-spaced eigenvalues from 1 to kappa, ascending.
Vec log_spectrum(std::size_t d, double kappa);

SpectralSummary spectral_summary(const QuadraticProblem& prob);

std::pair<double, Vec> value_and_grad(const QuadraticProblem& prob, const Vec& x);
double value(const QuadraticProblem& prob, const Vec& x);

Vec sample_init(const QuadraticProblem& prob, const InitSpec& spec, InitMode mode);

// Qbar = D^{-1/2} U Lambda^{1/2},  Qhat = D^{-1} U Lambda^{1/2}
Matrix qbar_matrix(const QuadraticProblem& prob);
Matrix qhat_matrix(const QuadraticProblem& prob);
// gbar = Lambda^{1/2} U^T (x - x*), so f = |gbar|^2 / 2
Vec gbar_of(const QuadraticProblem& prob, const Vec& x);
// ghat = D^{-1} grad f = T (x - x*)
Vec ghat_of(const QuadraticProblem& prob, const Vec& x);

std::string problem_to_json(const QuadraticProblem& prob);
QuadraticProblem problem_from_json(const std::string& text);

std::string summary_to_json(const SpectralSummary& s);

const char* to_string(InitMode mode);

}  // namespace adamprecond
