#include <doctest.h>

#include <cmath>

#include "adamprecond/errors.hpp"
#include "adamprecond/io.hpp"
#include "adamprecond/plfuncs.hpp"
#include "adamprecond/quadratics.hpp"
#include "oracles.hpp"

using namespace adamprecond;

TEST_SUITE("plfuncs") {

TEST_CASE("line minimum agrees with golden section") {
  auto q = [](double h) { return (h - 1.5) * (h - 1.5) + 3.0; };
  CHECK(line_minimum(q) == doctest::Approx(oracle::golden_min(q, -10.0, 10.0)).epsilon(1e-12));
  auto c = [](double h) { return std::cosh(h + 4.0) - 2.0; };
  CHECK(line_minimum(c) == doctest::Approx(oracle::golden_min(c, -10.0, 10.0)).epsilon(1e-12));
}

TEST_CASE("diagonal quadratic instance") {
  const auto prob = make_diagonal(3, {1.0, 10.0, 100.0}, Vec(3, 0.0));
  const PLProblem p = pl_from_quadratic(prob);
  CHECK(p.l_min() == 1.0);
  CHECK(p.l_max() == 100.0);
  CHECK(p.mu_tilde == 1.0);
  CHECK(p.value({1.0, 0.0, 0.0}) == 0.5);
  CHECK_THROWS_AS(pl_from_quadratic(make_wishart(3, 5.0, 1)), Error);
}

TEST_CASE("logcosh constant is the infimum of the one-dimensional ratio") {
  const double s = 3.0, r = 1.5;
  const PLProblem p = pl_separable_logcosh(1, {s}, r);
  auto ratio = [&](double x) {
    Vec g;
    const double f = p.eval({x}, g);
    return g[0] * g[0] / std::sqrt(2.0 * s) / f;
  };
  // the ratio is even and decreasing in |x|, so the infimum sits on the box edge
  const double edge = ratio(r);
  CHECK(std::sqrt(2.0 * p.mu_tilde) == doctest::Approx(edge).epsilon(1e-12));
  CHECK(ratio(0.3) > edge);
  CHECK(ratio(-r) == doctest::Approx(edge));
  CHECK(p.mu_tilde <= p.l_min());
}

TEST_CASE("sampling checks pass on both instances") {
  const std::vector<PLProblem> probs{pl_from_quadratic(make_diagonal(4, log_spectrum(4, 100.0), Vec(4, 0.0))),
                                     pl_separable_logcosh(4, log_spectrum(4, 100.0), 2.0)};
  for (const auto& p : probs) {
    CHECK(check_descent_lemma(p, 500, 1).passed());
    CHECK(check_grad_bound(p, 500, 2).passed());
    CHECK(check_plc(p, 500, 3).passed());
    CHECK(check_consequences(p, 500, 4).passed());
    CHECK(check_gradient_fd(p, 50, 5).passed());
  }
}

TEST_CASE("an overstated PL constant is caught") {
  PLProblem p = pl_separable_logcosh(3, {1.0, 2.0, 4.0}, 2.0);
  p.mu_tilde *= 1.5;
  CHECK_FALSE(check_plc(p, 2000, 6).passed());
}

TEST_CASE("a wrong gradient is caught") {
  PLProblem p = pl_from_quadratic(make_diagonal(2, {1.0, 4.0}, Vec(2, 0.0)));
  auto good = p.eval;
  p.eval = [good](const Vec& x, Vec& g) {
    const double f = good(x, g);
    g[1] *= 1.01;
    return f;
  };
  CHECK_FALSE(check_gradient_fd(p, 20, 7).passed());
}

TEST_CASE("initial constants") {
  const PLProblem p = pl_from_quadratic(make_diagonal(2, {1.0, 4.0}, Vec(2, 0.0)));
  const Vec x0{1.0, 1.0};
  const InitConstants ic = init_constants(p, x0);
  CHECK(ic.delta0 == doctest::Approx(2.5));
  // mu_i0 = g_i^2 / (2 Delta0): 1/5 and 16/5
  CHECK(ic.mu0[0] == doctest::Approx(0.2));
  CHECK(ic.mu0[1] == doctest::Approx(3.2));
  CHECK(ic.kappa_max0 == doctest::Approx(5.0));
  const PLConstants c = pl_constants(p, x0);
  CHECK(c.l_max == 4.0);
  CHECK(c.delta0 == doctest::Approx(2.5));
}

TEST_CASE("check json") {
  const auto rep = check_plc(pl_from_quadratic(make_diagonal(2, {1.0, 4.0}, Vec(2, 0.0))), 10, 1);
  const auto j = Json::parse(check_to_json(rep));
  CHECK(j["check"] == "plc");
  CHECK(j["violations"] == 0);
}

}
