#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "adamprecond/optimizers.hpp"
#include "adamprecond/quadratics.hpp"

namespace adamprecond {

struct PLConstants {
  double l_min = 1.0;
  double l_max = 1.0;
  double mu_tilde = 1.0;
  double kappa_max0 = 1.0;
  double delta0 = 1.0;
  // min_i (g0_i / L_i)^2 when known; negative means "derive from kappa_max0"
  double min_g0_over_l_sq = -1.0;

  void validate() const;
};

enum class ScheduleKind { Diagonal, General, PL };

const char* to_string(ScheduleKind k);

struct ScheduleReport {
  ScheduleKind kind = ScheduleKind::Diagonal;
  AdamHyperParams hp;
  long k_tilde = 0;
  long k_star = 0;
  double kappa_adam = 1.0;

  // echoed inputs
  std::size_t d = 0;
  double eps = 0.0;
  double eps_target = 0.0;  // tolerance the budget is computed against
  double b = 0.0;
  double p = 0.0;
  double theta = 1.0;
  double zeta = 1.0;
  double c_alpha = 1.0;
  double init_scale = 0.0;  // |z0|_inf, |gbar0|_2 or Delta0
  std::optional<SpectralSummary> summary;
  std::optional<PLConstants> pl;

  // derived
  double p_tilde = 0.0;
  double alpha_formula = 0.0;
  double alpha_cap = 0.0;
  std::string alpha_branch;  // "formula" or "cap"
  double gamma = 0.0;        // first-stage contraction factor
  double budget_factor = 0.0;
  double gd_factor = 0.0;
};

// exp(-2 (beta2^{-k/2} - 1))
double tight_decay(double beta2, double k);

// log(log^2(e^2 r) / divisor) / log(1/beta2): iterations for the tight decay to shrink by r > 1.
double budget_iterations(double beta2, double ratio, double divisor = 4.0);

// p_tilde = (log(1/p) / (zeta (1 + log(1/p)/d)))^{1/theta}
double p_tilde(double p, std::size_t d, double theta, double zeta);

ScheduleReport schedule_diagonal(std::size_t d, double kappa, double b, double p, double eps,
                                 double c_alpha = 1.0, std::optional<double> z0_inf = std::nullopt);

ScheduleReport schedule_general(const SpectralSummary& s, std::size_t d, double b, double p, double theta,
                                double zeta, double eps, double c_alpha = 1.0,
                                std::optional<double> gbar0_norm = std::nullopt);

ScheduleReport schedule_pl(const PLConstants& c, double eps, double c_alpha = 1.0);

// Continuous-descent horizon. diagonal selects the per-coordinate form with ghat0 = z0.
long descent_horizon(const SpectralSummary& s, const Vec& qdiag, const AdamHyperParams& hp, const Vec& ghat0,
                     bool diagonal);

struct DecayPredicates {
  std::vector<bool> loose;
  std::vector<bool> tight;
  long k_tilde = 0;
  double gamma = 0.0;
  long first_failure = -1;  // iteration index, -1 when all hold
};

// Evaluates the first-stage and second-stage decay bounds on every record with k <= K_tilde.
// The trace must hold one record per iteration.
DecayPredicates decay_bound_predicates(const RunTrace& trace, const ScheduleReport& report,
                                       const SpectralSummary& s, const Vec& qdiag, const Vec& ghat0,
                                       bool diagonal);

std::string schedule_to_json(const ScheduleReport& r);

}  // namespace adamprecond
