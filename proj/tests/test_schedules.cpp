#include <doctest.h>

#include <cmath>

#include "adamprecond/errors.hpp"
#include "adamprecond/io.hpp"
#include "adamprecond/quadratics.hpp"
#include "adamprecond/schedules.hpp"

using namespace adamprecond;

TEST_SUITE("schedules") {

TEST_CASE("budget makes the tight decay reach the ratio") {
  for (double beta2 : {0.9, 0.999, 0.99999}) {
    for (double r : {2.0, 1e3, 1e12}) {
      const double k = budget_iterations(beta2, r);
      CHECK(tight_decay(beta2, k) * r == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK(tight_decay(0.99, 0.0) == 1.0);
  CHECK_THROWS_AS(budget_iterations(0.99, 1.0), Error);
  // a larger divisor shortens the budget by log(divisor ratio) / log(1/beta2)
  const double k4 = budget_iterations(0.99, 1e6), k32 = budget_iterations(0.99, 1e6, 32.0);
  CHECK(k4 - k32 == doctest::Approx(std::log(8.0) / -std::log(0.99)));
}

TEST_CASE("p_tilde") {
  const double lp = std::log(4.0 / 3.0);
  CHECK(p_tilde(0.75, 10, 1.0, 1.0) == doctest::Approx(lp / (1.0 + lp / 10.0)));
  CHECK(p_tilde(0.75, 10, 0.5, 2.0) == doctest::Approx(std::pow(lp / (2.0 * (1.0 + lp / 10.0)), 2.0)));
}

TEST_CASE("diagonal schedule recomputed by hand") {
  const double d = 10, kappa = 1e4, b = 1.0, p = 0.75, eps = 1e-6;
  const auto r = schedule_diagonal(10, kappa, b, p, eps);
  const double lp = std::log(1.0 / p);
  const double alpha = std::max(std::sqrt(lp / (d + lp)), 1.0 / std::sqrt(kappa)) /
                       std::sqrt(std::log(std::sqrt(d * kappa) / eps));
  CHECK(r.alpha_branch == "formula");
  CHECK(r.hp.alpha == doctest::Approx(alpha).epsilon(1e-14));
  CHECK(r.hp.beta2 == doctest::Approx(1.0 - alpha * alpha / 72.0).epsilon(1e-15));
  CHECK(r.gamma == doctest::Approx(1.0 - alpha * alpha / 36.0).epsilon(1e-15));
  CHECK(r.hp.phi == 1.0);
  CHECK(r.kappa_adam == doctest::Approx(d / lp + 1.0));
  const double ratio = 3.0 / (eps / std::sqrt(d * kappa));
  const double l = std::log(std::exp(2.0) * ratio);
  CHECK(r.k_star == static_cast<long>(std::ceil(std::log(l * l / 4.0) / -std::log(r.hp.beta2))));
  // frozen values
  CHECK(r.hp.alpha == doctest::Approx(0.037799001261583538).epsilon(1e-12));
  CHECK(r.k_star == 244699);
  CHECK(r.k_tilde == 550189);
}

TEST_CASE("step size cap") {
  const auto r = schedule_diagonal(10, 1e4, 2.0, 0.75, 1e-6, 1e3);
  CHECK(r.alpha_branch == "cap");
  CHECK(r.hp.alpha == doctest::Approx(6.0 / std::sqrt(2.0)));
  CHECK(r.alpha_formula > r.alpha_cap);
  CHECK(r.hp.beta2 > 0.0);
}

TEST_CASE("kappa_adam saturates at kappa") {
  CHECK(schedule_diagonal(1000, 5.0, 1.0, 0.75, 1e-6).kappa_adam == 5.0);
}

TEST_CASE("degenerate inputs") {
  CHECK_THROWS_AS(schedule_diagonal(2, 1.0, 1.0, 0.75, 10.0), Error);
  CHECK_THROWS_AS(schedule_diagonal(2, 1.0, 1.0, 1.5, 1e-3), Error);
  PLConstants c;
  c.delta0 = 1e-3;
  CHECK_THROWS_AS(schedule_pl(c, 1e-2), Error);
}

TEST_CASE("general schedule on an explicit matrix") {
  const auto prob = make_adversarial_2x2(10.0);
  const auto s = spectral_summary(prob);
  const auto r = schedule_general(s, 2, 1.0, 0.75, 1.0, 1.0, 1e-4);
  CHECK(r.kind == ScheduleKind::General);
  CHECK(r.hp.beta2 < 1.0);
  CHECK(r.hp.beta2 > 0.0);
  CHECK(r.init_scale == doctest::Approx(3.0 * std::sqrt(2.0) / s.rho1));
  const double q_min = 10.0;
  CHECK(r.hp.phi == doctest::Approx(s.kappa_hat * std::sqrt(2.0) * q_min));
  const double m = std::max(9.0 * s.kappa_hat * s.kappa_hat * 2.0, r.hp.phi * r.hp.phi / (q_min * q_min));
  CHECK(r.hp.beta2 == doctest::Approx(1.0 - r.hp.alpha * r.hp.alpha * s.mu1 * s.mu1 / (8.0 * m)).epsilon(1e-15));
}

TEST_CASE("PL schedule recomputed by hand") {
  PLConstants c;
  c.l_min = 1.0;
  c.l_max = 100.0;
  c.mu_tilde = 0.5;
  c.kappa_max0 = 400.0;
  c.delta0 = 10.0;
  const auto r = schedule_pl(c, 1e-6);
  const double alpha = std::pow(std::max(1.0 / 400.0, 0.01) * 100.0 / 50.0, 0.25) / std::sqrt(std::log(1e7));
  CHECK(r.hp.alpha == doctest::Approx(alpha).epsilon(1e-14));
  CHECK(r.hp.beta2 == doctest::Approx(1.0 - alpha * alpha * 0.5 / 160.0).epsilon(1e-15));
  CHECK(r.hp.phi == doctest::Approx(std::sqrt(20.0)));
  CHECK(r.budget_factor == doctest::Approx(std::sqrt(200.0) * 10.0));
  CHECK(r.gd_factor == doctest::Approx(100.0 / std::sqrt(0.5)));
}

TEST_CASE("schedule json carries the inputs") {
  const auto j = Json::parse(schedule_to_json(schedule_diagonal(4, 100.0, 1.0, 0.75, 1e-4)));
  CHECK(j["kind"] == "diagonal");
  CHECK(j["alpha_branch"] == "formula");
  CHECK(j.contains("k_star"));
  CHECK(j.contains("inputs"));
}

}
