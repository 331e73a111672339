#include "adamprecond/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adamprecond/errors.hpp"
#include "adamprecond/io.hpp"

namespace adamprecond {

void PLConstants::validate() const {
  require(mu_tilde > 0.0 && mu_tilde <= l_min * (1.0 + 1e-12) && l_min <= l_max, ErrorKind::InvalidArgument,
          "PL constants must satisfy 0 < mu_tilde <= L_min <= L_max");
  require(kappa_max0 >= 1.0, ErrorKind::InvalidArgument, "kappa_max0 must be at least 1");
  require(delta0 >= 0.0, ErrorKind::InvalidArgument, "Delta0 must be non-negative");
}

const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::Diagonal: return "diagonal";
    case ScheduleKind::General: return "general";
    case ScheduleKind::PL: return "pl";
  }
  return "unknown";
}

double tight_decay(double beta2, double k) {
  return std::exp(-2.0 * std::expm1(-0.5 * k * std::log(beta2)));
}

double budget_iterations(double beta2, double ratio, double divisor) {
  if (!(ratio > 1.0)) throw Error(ErrorKind::DegenerateBudget, "target tolerance is not below the initial error");
  const double l = 2.0 + std::log(ratio);
  return std::log(l * l / divisor) / -std::log(beta2);
}

double p_tilde(double p, std::size_t d, double theta, double zeta) {
  const double lp = std::log(1.0 / p);
  return std::pow(lp / (zeta * (1.0 + lp / static_cast<double>(d))), 1.0 / theta);
}

namespace {

long to_horizon(double v) {
  if (!std::isfinite(v)) return std::numeric_limits<long>::max();
  return v < 0.0 ? 0 : static_cast<long>(std::floor(v));
}

long to_budget(double v) { return std::max(1L, static_cast<long>(std::ceil(v))); }

void choose_alpha(ScheduleReport& r, double formula, double cap) {
  r.alpha_formula = formula;
  r.alpha_cap = cap;
  if (formula <= cap) {
    r.hp.alpha = formula;
    r.alpha_branch = "formula";
  } else {
    r.hp.alpha = cap;
    r.alpha_branch = "cap";
  }
}

void check_common(double b, double p, double eps, double c_alpha) {
  require(b > 0.0, ErrorKind::InvalidArgument, "B must be positive");
  require(p > 0.0 && p < 1.0, ErrorKind::InvalidArgument, "p must lie in (0, 1)");
  require(eps > 0.0, ErrorKind::InvalidArgument, "eps must be positive");
  require(c_alpha > 0.0, ErrorKind::InvalidArgument, "c_alpha must be positive");
}

}  // namespace

ScheduleReport schedule_diagonal(std::size_t d, double kappa, double b, double p, double eps, double c_alpha,
                                 std::optional<double> z0_inf) {
  check_common(b, p, eps, c_alpha);
  require(d >= 1 && kappa >= 1.0, ErrorKind::InvalidArgument, "need d >= 1 and kappa >= 1");
  const double dd = static_cast<double>(d);
  const double lp = std::log(1.0 / p);

  ScheduleReport r;
  r.kind = ScheduleKind::Diagonal;
  r.d = d;
  r.eps = eps;
  r.b = b;
  r.p = p;
  r.c_alpha = c_alpha;
  r.p_tilde = p_tilde(p, d, 1.0, 1.0);
  // |z|_inf <= eps / sqrt(d kappa) gives f <= eps^2 / 2
  r.eps_target = eps / std::sqrt(dd * kappa);
  r.init_scale = z0_inf.value_or(3.0 * b);

  const double log_arg = std::sqrt(dd * kappa) * b / eps;
  if (!(log_arg > 1.0)) throw Error(ErrorKind::DegenerateBudget, "eps is not below sqrt(d kappa) B");
  const double phi = b;
  const double formula =
      c_alpha * b * std::max(std::sqrt(lp / (dd + lp)), 1.0 / std::sqrt(kappa)) / std::sqrt(std::log(log_arg));
  choose_alpha(r, formula, std::max(3.0 * b, phi) / std::sqrt(2.0));

  const double a = r.hp.alpha;
  r.hp.beta1 = 0.0;
  r.hp.beta2 = 1.0 - a * a / (8.0 * std::max(9.0 * b * b, phi * phi));
  r.hp.phi = phi;
  r.hp.delta = DeltaSchedule::decaying();
  r.gamma = 1.0 - a * a / (4.0 * std::max(9.0 * b * b, phi * phi));
  r.kappa_adam = std::min(dd / lp + 1.0, kappa);

  r.k_star = to_budget(budget_iterations(r.hp.beta2, r.init_scale / r.eps_target));
  // horizon at the probability-p floor min_i |z0_i| > 2 p_tilde B / d and phi_i >= phi / kappa
  const double z = 2.0 * r.p_tilde * b / dd;
  const double one_m = 1.0 - r.hp.beta2;
  r.k_tilde = to_horizon(std::log(z * z / (a * a) + std::max(z * z, phi * phi / (kappa * kappa)) / (2.0 * one_m * a * a)) /
                         -std::log(r.hp.beta2));
  return r;
}

ScheduleReport schedule_general(const SpectralSummary& s, std::size_t d, double b, double p, double theta, double zeta,
                                double eps, double c_alpha, std::optional<double> gbar0_norm) {
  check_common(b, p, eps, c_alpha);
  require(theta > 0.0 && theta <= 1.0 && zeta >= 1.0, ErrorKind::InvalidArgument, "need 0 < theta <= 1 and zeta >= 1");
  require(d >= 1, ErrorKind::InvalidArgument, "need d >= 1");
  const double dd = static_cast<double>(d);
  const double lp = std::log(1.0 / p);

  ScheduleReport r;
  r.kind = ScheduleKind::General;
  r.d = d;
  r.eps = eps;
  r.eps_target = eps;
  r.b = b;
  r.p = p;
  r.theta = theta;
  r.zeta = zeta;
  r.c_alpha = c_alpha;
  r.summary = s;
  r.p_tilde = p_tilde(p, d, theta, zeta);
  // |gbar0| <= |ghat0| / rho1 <= 3 B sqrt(d) / rho1
  r.init_scale = gbar0_norm.value_or(3.0 * b * std::sqrt(dd) / s.rho1);

  const double kh = s.kappa_hat;
  const double log_arg = std::sqrt(dd) * b / (s.rho1 * eps);
  if (!(log_arg > 1.0)) throw Error(ErrorKind::DegenerateBudget, "eps is not below sqrt(d) B / rho1");
  const double pt = r.p_tilde;
  const double formula = c_alpha * (kh * std::sqrt(dd) * b / std::sqrt(s.mu1 * s.mu2)) *
                         std::pow(std::max(pt * pt / (kh * kh * dd * dd * dd), 1.0 / (s.kappa_diag * s.kappa_diag)), 0.25) /
                         std::sqrt(std::log(log_arg));
  const double phi = kh * std::sqrt(dd) * b * s.q_min;
  choose_alpha(r, formula, std::max(3.0 * kh * std::sqrt(dd) * b, phi / s.q_min) / (std::sqrt(2.0) * s.mu1));

  const double a = r.hp.alpha;
  const double m = std::max(9.0 * kh * kh * dd * b * b, phi * phi / (s.q_min * s.q_min));
  r.hp.beta1 = 0.0;
  r.hp.beta2 = 1.0 - a * a * s.mu1 * s.mu1 / (8.0 * m);
  r.hp.phi = phi;
  r.hp.delta = DeltaSchedule::decaying();
  r.gamma = 1.0 - a * a * s.mu1 * s.mu1 / (4.0 * m);
  r.kappa_adam = s.kappa_bar * std::min(kh * std::pow(dd, 1.5) / std::pow(lp, 1.0 / theta) * std::pow(zeta, 1.0 / theta) *
                                            std::pow(1.0 + lp / dd, 1.0 / theta),
                                        s.kappa_diag);

  r.k_star = to_budget(budget_iterations(r.hp.beta2, r.init_scale / eps));
  const double g = 2.0 * pt * b / dd;
  const double ma = s.mu2 * a;
  const double one_m = 1.0 - r.hp.beta2;
  r.k_tilde = to_horizon(std::log(g * g / (ma * ma) + std::max(g * g, phi * phi / (s.q_max * s.q_max)) / (2.0 * one_m * ma * ma)) /
                         -std::log(r.hp.beta2));
  return r;
}

ScheduleReport schedule_pl(const PLConstants& c, double eps, double c_alpha) {
  c.validate();
  require(eps > 0.0 && c_alpha > 0.0, ErrorKind::InvalidArgument, "eps and c_alpha must be positive");
  if (!(c.delta0 > eps)) throw Error(ErrorKind::DegenerateBudget, "eps is not below f(x0) - f*");

  ScheduleReport r;
  r.kind = ScheduleKind::PL;
  r.eps = eps;
  r.eps_target = eps;
  r.c_alpha = c_alpha;
  r.pl = c;
  r.init_scale = c.delta0;

  const double formula =
      c_alpha *
      std::pow(std::max(1.0 / c.kappa_max0, c.l_min / c.l_max) * c.delta0 * c.delta0 / (c.mu_tilde * c.l_max), 0.25) /
      std::sqrt(std::log(c.delta0 / eps));
  choose_alpha(r, formula, std::sqrt(c.delta0 / c.mu_tilde));

  const double a = r.hp.alpha;
  r.hp.beta1 = 0.0;
  r.hp.beta2 = 1.0 - a * a * c.mu_tilde / (16.0 * c.delta0);
  r.hp.phi = std::sqrt(2.0 * c.l_min * c.delta0);
  r.hp.delta = DeltaSchedule::decaying();
  r.gamma = 1.0 - a * a * c.mu_tilde / (8.0 * c.delta0);
  r.budget_factor = std::sqrt(c.l_max / c.mu_tilde) * std::min(std::sqrt(c.l_max / c.l_min), std::sqrt(c.kappa_max0));
  r.gd_factor = c.l_max / std::sqrt(c.mu_tilde * c.l_min);
  r.kappa_adam = r.budget_factor;

  r.k_star = to_budget(budget_iterations(r.hp.beta2, c.delta0 / eps));
  // (g0_i)^2 >= 2 mu_{i,0} Delta0 >= 2 L_i Delta0 / kappa_max0
  const double g_ratio =
      c.min_g0_over_l_sq >= 0.0 ? c.min_g0_over_l_sq : 2.0 * c.delta0 / (c.kappa_max0 * c.l_max);
  const double phi = r.hp.phi;
  r.k_tilde = to_horizon(std::log(std::max(g_ratio, phi * phi / (c.l_max * c.l_max)) /
                                  (2.0 * (1.0 - r.hp.beta2) * a * a)) /
                         -std::log(r.hp.beta2));
  return r;
}

long descent_horizon(const SpectralSummary& s, const Vec& qdiag, const AdamHyperParams& hp, const Vec& ghat0,
                     bool diagonal) {
  require(hp.delta.kind == DeltaSchedule::Kind::Decaying, ErrorKind::MismatchedSchedule,
          "descent horizon needs the decaying delta schedule");
  require(ghat0.size() == qdiag.size() && !ghat0.empty(), ErrorKind::InvalidArgument, "ghat0 has wrong length");
  const double a = hp.alpha;
  const double one_m = 1.0 - hp.beta2;
  const double log_inv = -std::log(hp.beta2);
  if (diagonal) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ghat0.size(); ++i) {
      const double z2 = ghat0[i] * ghat0[i];
      const double phi_i = hp.phi / qdiag[i];
      const double v = std::log(z2 / (a * a) + std::max(z2, phi_i * phi_i) / (2.0 * one_m * a * a)) / log_inv;
      best = std::min(best, v);
    }
    return to_horizon(best);
  }
  double gmin = std::abs(ghat0[0]);
  for (double g : ghat0) gmin = std::min(gmin, std::abs(g));
  const double ma = s.mu2 * a;
  const double g2 = gmin * gmin;
  return to_horizon(std::log(g2 / (ma * ma) + std::max(g2, hp.phi * hp.phi / (s.q_max * s.q_max)) / (2.0 * one_m * ma * ma)) /
                    log_inv);
}

DecayPredicates decay_bound_predicates(const RunTrace& trace, const ScheduleReport& report, const SpectralSummary& s,
                                       const Vec& qdiag, const Vec& ghat0, bool diagonal) {
  const AdamHyperParams& hp = report.hp;
  require(hp.delta.kind == DeltaSchedule::Kind::Decaying, ErrorKind::MismatchedSchedule,
          "decay bounds need the decaying delta schedule");
  const double a = hp.alpha, b = report.b, dd = static_cast<double>(report.d);
  double expected;
  double m;
  if (diagonal) {
    m = std::max(9.0 * b * b, hp.phi * hp.phi);
    expected = 1.0 - a * a / (8.0 * m);
  } else {
    m = std::max(9.0 * s.kappa_hat * s.kappa_hat * dd * b * b, hp.phi * hp.phi / (s.q_min * s.q_min));
    expected = 1.0 - a * a * s.mu1 * s.mu1 / (8.0 * m);
  }
  if (std::abs((1.0 - hp.beta2) - (1.0 - expected)) > 1e-9 * (1.0 - expected))
    throw Error(ErrorKind::MismatchedSchedule, "beta2 does not match the schedule relation");

  DecayPredicates out;
  out.gamma = diagonal ? 1.0 - a * a / (4.0 * m) : 1.0 - a * a * s.mu1 * s.mu1 / (4.0 * m);
  out.k_tilde = descent_horizon(s, qdiag, hp, ghat0, diagonal);
  require(!trace.records.empty() && trace.records.front().k == 0, ErrorKind::InvalidArgument, "trace lacks record 0");
  const double f0 = trace.records.front().f;
  const double log_gamma = std::log(out.gamma);
  for (const TraceRecord& r : trace.records) {
    if (static_cast<long>(r.k) > out.k_tilde) break;
    require(r.k == out.loose.size(), ErrorKind::InvalidArgument, "trace must hold every iteration");
    const double kk = static_cast<double>(r.k);
    // |gbar_k|^2 = 2 f_k
    const bool loose = r.f <= std::exp(kk * log_gamma) * f0 * (1.0 + 1e-12) + 1e-300;
    const double td = tight_decay(hp.beta2, kk);
    const bool tight = r.f <= td * td * f0 * (1.0 + 1e-12) + 1e-300;
    out.loose.push_back(loose);
    out.tight.push_back(tight);
    if ((!loose || !tight) && out.first_failure < 0) out.first_failure = static_cast<long>(r.k);
  }
  return out;
}

std::string schedule_to_json(const ScheduleReport& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["alpha"] = r.hp.alpha;
  j["beta1"] = r.hp.beta1;
  j["beta2"] = r.hp.beta2;
  j["phi"] = r.hp.phi;
  j["delta_schedule"] = r.hp.delta.kind == DeltaSchedule::Kind::Decaying ? "decaying" : "constant";
  j["k_tilde"] = r.k_tilde;
  j["k_star"] = r.k_star;
  j["kappa_adam"] = r.kappa_adam;
  j["alpha_branch"] = r.alpha_branch;
  j["alpha_formula"] = r.alpha_formula;
  j["alpha_cap"] = r.alpha_cap;
  j["gamma"] = r.gamma;
  Json in;
  in["d"] = r.d;
  in["eps"] = r.eps;
  in["eps_target"] = r.eps_target;
  in["B"] = r.b;
  in["p"] = r.p;
  in["theta"] = r.theta;
  in["zeta"] = r.zeta;
  in["c_alpha"] = r.c_alpha;
  in["init_scale"] = r.init_scale;
  in["p_tilde"] = r.p_tilde;
  if (r.summary) in["spectral"] = Json::parse(summary_to_json(*r.summary));
  if (r.pl) {
    Json c;
    c["l_min"] = r.pl->l_min;
    c["l_max"] = r.pl->l_max;
    c["mu_tilde"] = r.pl->mu_tilde;
    c["kappa_max0"] = r.pl->kappa_max0;
    c["delta0"] = r.pl->delta0;
    in["pl"] = c;
    j["budget_factor"] = r.budget_factor;
    j["gd_factor"] = r.gd_factor;
  }
  j["inputs"] = in;
  return dump_json(j);
}

}  // namespace adamprecond
