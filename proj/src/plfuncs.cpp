#include "adamprecond/plfuncs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adamprecond/errors.hpp"
#include "adamprecond/io.hpp"

namespace adamprecond {

namespace {

constexpr double kSlack = 1e-9;
constexpr double kDegenerate = 1e-14;  // points with f - f* below this are skipped

double note(CheckReport& r, double excess, double slack) {
  r.max_violation = std::max(r.max_violation, excess);
  if (excess > slack) ++r.violations;
  return excess;
}

CheckReport start_report(const char* name) {
  CheckReport r;
  r.check = name;
  r.max_violation = -std::numeric_limits<double>::infinity();
  return r;
}

Vec centre(const PLProblem& p) { return p.minimizer.value_or(Vec(p.dim, 0.0)); }

}  // namespace

double PLProblem::l_min() const { return *std::min_element(l_coords.begin(), l_coords.end()); }
double PLProblem::l_max() const { return *std::max_element(l_coords.begin(), l_coords.end()); }

double PLProblem::value(const Vec& x) const {
  Vec g;
  return eval(x, g);
}

PLProblem pl_from_quadratic(const QuadraticProblem& prob) {
  if (!prob.diagonal) throw Error(ErrorKind::NotDiagonal, "per-coordinate constants need a diagonal Hessian");
  PLProblem p;
  p.name = "quadratic";
  p.dim = prob.dim();
  p.l_coords = prob.q.diag();
  p.mu_tilde = *std::min_element(p.l_coords.begin(), p.l_coords.end());
  p.f_star = 0.0;
  p.minimizer = prob.x_star;
  p.eval = [lam = p.l_coords, xs = prob.x_star](const Vec& x, Vec& g) {
    g.resize(x.size());
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double z = x[i] - xs[i];
      g[i] = lam[i] * z;
      f += 0.5 * lam[i] * z * z;
    }
    return f;
  };
  return p;
}

PLProblem pl_separable_logcosh(std::size_t d, const Vec& scales, double box_radius) {
  require(d >= 1 && scales.size() == d, ErrorKind::InvalidArgument, "need d positive scales");
  require(box_radius > 0.0, ErrorKind::InvalidArgument, "box radius must be positive");
  for (double s : scales) require(s > 0.0 && std::isfinite(s), ErrorKind::InvalidArgument, "scales must be positive");
  PLProblem p;
  p.name = "logcosh";
  p.dim = d;
  p.l_coords = scales;
  p.box_radius = box_radius;
  p.minimizer = Vec(d, 0.0);
  p.f_star = 0.0;
  // per coordinate the PL ratio is sqrt(s_i / 2) tanh^2(x) / log cosh(x), decreasing in |x|
  const double t = std::tanh(box_radius);
  const double lc = box_radius + std::log1p(std::exp(-2.0 * box_radius)) - std::log(2.0);
  const double h = t * t / lc;
  p.mu_tilde = p.l_min() * h * h / 4.0;
  p.eval = [s = scales](const Vec& x, Vec& g) {
    g.resize(x.size());
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double a = std::abs(x[i]);
      // log cosh a = a + log(1 + e^{-2a}) - log 2, stable for large a
      f += s[i] * (a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0));
      g[i] = s[i] * std::tanh(x[i]);
    }
    return f;
  };
  return p;
}

Vec sample_box(const PLProblem& p, Rng& rng) {
  Vec x = centre(p);
  for (double& v : x) v += rng.uniform(-p.box_radius, p.box_radius);
  return x;
}

double line_minimum(const std::function<double(double)>& phi, double tol, int max_iter) {
  constexpr double kGold = 1.6180339887498949;
  double best = phi(0.0);
  auto eval = [&](double h) {
    const double v = phi(h);
    best = std::min(best, v);
    return v;
  };
  double lo = -1.0, hi = 1.0;
  double a = 0.0, fa = best;
  double b = 1.0, fb = eval(b);
  bool bracketed = false;
  if (fb > fa) {
    const double fm = eval(-1.0);
    bracketed = fm >= fa;
    b = -1.0;
    fb = fm;
  }
  if (!bracketed) {
    // walk downhill from a through b until the function turns up
    double c = b + kGold * (b - a), fc = eval(c);
    for (int it = 0; it < max_iter && fc < fb; ++it) {
      a = b;
      b = c;
      fb = fc;
      c = b + kGold * (b - a);
      fc = eval(c);
    }
    lo = std::min(a, c);
    hi = std::max(a, c);
  }
  double x1 = hi - (hi - lo) / kGold, x2 = lo + (hi - lo) / kGold;
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < max_iter && hi - lo > tol * (1.0 + std::abs(x1)); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - (hi - lo) / kGold;
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + (hi - lo) / kGold;
      f2 = eval(x2);
    }
  }
  return best;
}

CheckReport check_descent_lemma(const PLProblem& p, std::size_t n_pairs, std::uint64_t seed) {
  require(n_pairs >= 1, ErrorKind::InvalidArgument, "n_pairs must be positive");
  Rng rng(derive_seed(seed, 0x514));
  CheckReport r = start_report("descent_lemma");
  Vec gx, gy;
  for (std::size_t s = 0; s < n_pairs; ++s) {
    const Vec x = sample_box(p, rng);
    const Vec y = sample_box(p, rng);
    const double fx = p.eval(x, gx);
    const double fy = p.eval(y, gy);
    double bound = fx;
    for (std::size_t i = 0; i < p.dim; ++i) {
      const double h = y[i] - x[i];
      bound += gx[i] * h + 0.5 * p.l_coords[i] * h * h;
    }
    note(r, fy - bound, kSlack * (1.0 + std::abs(fx)));
  }
  r.n_samples = n_pairs;
  r.certified_constants = {{"l_max", p.l_max()}, {"l_min", p.l_min()}};
  return r;
}

CheckReport check_grad_bound(const PLProblem& p, std::size_t n_points, std::uint64_t seed) {
  require(n_points >= 1, ErrorKind::InvalidArgument, "n_points must be positive");
  Rng rng(derive_seed(seed, 0x515));
  CheckReport r = start_report("grad_bound");
  double worst_ratio = 0.0;
  Vec g, scratch;
  for (std::size_t s = 0; s < n_points; ++s) {
    Vec x = sample_box(p, rng);
    const double fx = p.eval(x, g);
    for (std::size_t i = 0; i < p.dim; ++i) {
      const double xi = x[i];
      const double line_min = line_minimum([&](double h) {
        x[i] = xi + h;
        const double v = p.eval(x, scratch);
        x[i] = xi;
        return v;
      });
      const double two_l = 2.0 * p.l_coords[i];
      // slack in gradient-squared units: the f-unit slack scaled by 2 L_i
      const double slack = kSlack * two_l * (1.0 + std::abs(fx));
      const double lhs = g[i] * g[i];
      note(r, lhs - two_l * (fx - line_min), slack);
      note(r, lhs - two_l * (fx - p.f_star), slack);
      if (fx - line_min > kDegenerate) worst_ratio = std::max(worst_ratio, lhs / (two_l * (fx - line_min)));
    }
  }
  r.n_samples = n_points;
  r.certified_constants = {{"max_ratio", worst_ratio}};
  return r;
}

CheckReport check_plc(const PLProblem& p, std::size_t n_points, std::uint64_t seed) {
  require(n_points >= 1, ErrorKind::InvalidArgument, "n_points must be positive");
  Rng rng(derive_seed(seed, 0x516));
  CheckReport r = start_report("plc");
  double min_ratio = std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  Vec g;
  for (std::size_t s = 0; s < n_points; ++s) {
    const Vec x = sample_box(p, rng);
    const double gap = p.eval(x, g) - p.f_star;
    if (gap <= kDegenerate) continue;
    double lhs = 0.0;
    for (std::size_t i = 0; i < p.dim; ++i) lhs += g[i] * g[i] / std::sqrt(2.0 * p.l_coords[i]);
    min_ratio = std::min(min_ratio, lhs / gap);
    note(r, std::sqrt(2.0 * p.mu_tilde) * gap - lhs, kSlack * (1.0 + lhs));
    ++used;
  }
  const double certified = std::isfinite(min_ratio) ? std::min(0.5 * min_ratio * min_ratio, p.l_min()) : 0.0;
  if (p.mu_tilde > certified * (1.0 + kSlack)) ++r.violations;
  r.n_samples = used;
  r.certified_constants = {{"mu_tilde", p.mu_tilde}, {"certified_mu_tilde", certified}};
  return r;
}

CheckReport check_consequences(const PLProblem& p, std::size_t n_samples, std::uint64_t seed) {
  require(n_samples >= 1, ErrorKind::InvalidArgument, "n_samples must be positive");
  Rng rng(derive_seed(seed, 0x517));
  CheckReport r = start_report("consequences");
  const double lmax = p.l_max();
  const double pl = std::sqrt(p.mu_tilde * p.l_min());
  Vec gx, gy;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Vec x = sample_box(p, rng);
    const Vec y = sample_box(p, rng);
    const double fx = p.eval(x, gx);
    p.eval(y, gy);
    double dg = 0.0, dx = 0.0;
    for (std::size_t i = 0; i < p.dim; ++i) {
      dg += (gy[i] - gx[i]) * (gy[i] - gx[i]);
      dx += (y[i] - x[i]) * (y[i] - x[i]);
    }
    const double lip = lmax * std::sqrt(dx);
    note(r, std::sqrt(dg) - lip, kSlack * (1.0 + lip));
    const double gsq = dot(gx, gx);
    const double rhs = 2.0 * pl * (fx - p.f_star);
    note(r, rhs - gsq, kSlack * (1.0 + gsq));
  }
  r.n_samples = n_samples;
  r.certified_constants = {{"l_max", lmax}, {"pl_constant", pl}};
  return r;
}

CheckReport check_gradient_fd(const PLProblem& p, std::size_t n_points, std::uint64_t seed, double h) {
  require(n_points >= 1 && h > 0.0, ErrorKind::InvalidArgument, "need n_points >= 1 and h > 0");
  Rng rng(derive_seed(seed, 0x518));
  CheckReport r = start_report("gradient_fd");
  Vec g, scratch;
  for (std::size_t s = 0; s < n_points; ++s) {
    Vec x = sample_box(p, rng);
    p.eval(x, g);
    for (std::size_t i = 0; i < p.dim; ++i) {
      const double xi = x[i];
      const double step = h * std::max(1.0, std::abs(xi));
      x[i] = xi + step;
      const double fp = p.eval(x, scratch);
      x[i] = xi - step;
      const double fm = p.eval(x, scratch);
      x[i] = xi;
      const double fd = (fp - fm) / (2.0 * step);
      // normwise relative error: coordinates with tiny gradients sit below the rounding floor of f
      note(r, std::abs(fd - g[i]) / std::max(norm_inf(g), 1e-300), 1e-6);
    }
  }
  r.n_samples = n_points;
  return r;
}

InitConstants init_constants(const PLProblem& p, const Vec& x0) {
  require(x0.size() == p.dim, ErrorKind::InvalidArgument, "x0 has wrong length");
  Vec g;
  InitConstants c;
  c.delta0 = p.eval(x0, g) - p.f_star;
  require(c.delta0 > 0.0, ErrorKind::DegenerateBudget, "x0 is already optimal");
  c.mu0.resize(p.dim);
  c.kappa_max0 = 0.0;
  c.min_g0_over_l_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.dim; ++i) {
    c.mu0[i] = g[i] * g[i] / (2.0 * c.delta0);
    require(c.mu0[i] > 0.0, ErrorKind::DegenerateBudget, "a gradient coordinate vanishes at x0");
    c.kappa_max0 = std::max(c.kappa_max0, p.l_coords[i] / c.mu0[i]);
    const double q = g[i] / p.l_coords[i];
    c.min_g0_over_l_sq = std::min(c.min_g0_over_l_sq, q * q);
  }
  c.kappa_max0 = std::max(c.kappa_max0, 1.0);
  return c;
}

PLConstants pl_constants(const PLProblem& p, const Vec& x0) {
  const InitConstants ic = init_constants(p, x0);
  PLConstants c;
  c.l_min = p.l_min();
  c.l_max = p.l_max();
  c.mu_tilde = p.mu_tilde;
  c.kappa_max0 = ic.kappa_max0;
  c.delta0 = ic.delta0;
  c.min_g0_over_l_sq = ic.min_g0_over_l_sq;
  return c;
}

Objective objective_from(const PLProblem& p) {
  Objective obj;
  obj.dim = p.dim;
  obj.eval = p.eval;
  obj.f_star = p.f_star;
  obj.scale = p.l_coords;
  obj.pl_target = true;
  return obj;
}

std::string check_to_json(const CheckReport& r) {
  Json j;
  j["check"] = r.check;
  j["n_samples"] = r.n_samples;
  j["max_violation"] = r.max_violation;
  j["violations"] = r.violations;
  j["passed"] = r.passed();
  Json c = Json::object();
  for (const auto& [k, v] : r.certified_constants) c[k] = v;
  j["certified_constants"] = c;
  return dump_json(j);
}

}  // namespace adamprecond
