#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adamprecond/linalg.hpp"
#include "adamprecond/optimizers.hpp"
#include "adamprecond/quadratics.hpp"
#include "adamprecond/rng.hpp"
#include "adamprecond/schedules.hpp"

namespace adamprecond {

// Objective with per-coordinate smoothness constants L_i and a
// smoothness-dependent PL constant mu_tilde.
struct PLProblem {
  std::string name;
  std::size_t dim = 0;
  std::function<double(const Vec&, Vec&)> eval;  // returns f, writes gradient
  Vec l_coords;
  double mu_tilde = 0.0;
  double f_star = 0.0;
  std::optional<Vec> minimizer;
  double box_radius = 2.0;  // samples are drawn from minimizer + [-R, R]^d

  double l_min() const;
  double l_max() const;
  double value(const Vec& x) const;
};

PLProblem pl_from_quadratic(const QuadraticProblem& prob);

// f(x) = sum_i s_i log cosh(x_i). mu_tilde is the exact infimum of the PL ratio on the box.
PLProblem pl_separable_logcosh(std::size_t d, const Vec& scales, double box_radius = 2.0);

struct CheckReport {
  std::string check;
  std::size_t n_samples = 0;
  std::size_t violations = 0;
  double max_violation = 0.0;  // largest lhs - rhs seen, before slack
  std::vector<std::pair<std::string, double>> certified_constants;

  bool passed() const { return violations == 0; }
};

// f(y) <= f(x) + <g(x), y - x> + 1/2 sum_i L_i (y_i - x_i)^2
CheckReport check_descent_lemma(const PLProblem& p, std::size_t n_pairs, std::uint64_t seed);

// g_i(x)^2 <= 2 L_i (f(x) - min_h f(x + h e_i)) and g_i(x)^2 <= 2 L_i (f(x) - f*)
CheckReport check_grad_bound(const PLProblem& p, std::size_t n_points, std::uint64_t seed);

// sum_i g_i^2 / sqrt(2 L_i) >= sqrt(2 mu_tilde) (f - f*); certifies mu_tilde from samples.
CheckReport check_plc(const PLProblem& p, std::size_t n_points, std::uint64_t seed);

// L_max-Lipschitz gradient and sqrt(mu_tilde L_min)-PL, both in the Euclidean norm.
CheckReport check_consequences(const PLProblem& p, std::size_t n_samples, std::uint64_t seed);

// Central differences with step h * max(1, |x_i|); reports the worst error relative to |g|_inf.
CheckReport check_gradient_fd(const PLProblem& p, std::size_t n_points, std::uint64_t seed, double h = 1e-6);

// mu_{i,0} = g0_i^2 / (2 Delta0) and kappa_max0 = max_i L_i / mu_{i,0}
struct InitConstants {
  double delta0 = 0.0;
  Vec mu0;
  double kappa_max0 = 1.0;
  double min_g0_over_l_sq = 0.0;
};

InitConstants init_constants(const PLProblem& p, const Vec& x0);
PLConstants pl_constants(const PLProblem& p, const Vec& x0);

// min over h of phi(h): bracket expansion from h = 0, then golden section.
double line_minimum(const std::function<double(double)>& phi, double tol = 1e-12, int max_iter = 200);

Vec sample_box(const PLProblem& p, Rng& rng);

Objective objective_from(const PLProblem& p);

std::string check_to_json(const CheckReport& r);

}  // namespace adamprecond
