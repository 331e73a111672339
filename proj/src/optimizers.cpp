#include "adamprecond/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "adamprecond/io.hpp"

namespace adamprecond {

void AdamHyperParams::validate() const {
  require(alpha > 0.0, ErrorKind::InvalidArgument, "alpha must be positive");
  require(beta1 >= 0.0 && beta1 < 1.0, ErrorKind::InvalidArgument, "beta1 must lie in [0, 1)");
  require(beta2 > 0.0 && beta2 < 1.0, ErrorKind::InvalidArgument, "beta2 must lie in (0, 1)");
  require(phi > 0.0, ErrorKind::InvalidArgument, "phi must be positive");
  require(delta.kind == DeltaSchedule::Kind::Decaying || delta.value >= 0.0, ErrorKind::InvalidArgument,
          "constant delta must be non-negative");
}

double AdamHyperParams::delta_at(std::size_t k) const {
  if (delta.kind == DeltaSchedule::Kind::Constant) return delta.value;
  return std::exp(0.5 * static_cast<double>(k) * std::log(beta2)) / std::sqrt(2.0 * (1.0 - beta2));
}

AdamState AdamState::start(const Vec& x0) {
  AdamState s;
  s.x = x0;
  s.m.assign(x0.size(), 0.0);
  s.v.assign(x0.size(), 0.0);
  return s;
}

Vec gd_step(const Vec& x, const Vec& grad, double alpha) {
  require(alpha > 0.0, ErrorKind::InvalidArgument, "alpha must be positive");
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - alpha * grad[i];
  return out;
}

namespace {

void check_sizes(const AdamState& s, const Vec& grad) {
  require(grad.size() == s.x.size() && s.m.size() == s.x.size() && s.v.size() == s.x.size(),
          ErrorKind::InvalidArgument, "state and gradient sizes differ");
}

void variant_update(AdamState& s, const Vec& grad, const AdamHyperParams& hp, Vec* denom_sq) {
  const std::size_t d = grad.size();
  if (s.k == 0 && s.g0_sq.empty()) {
    s.g0_sq.resize(d);
    for (std::size_t i = 0; i < d; ++i) s.g0_sq[i] = grad[i] * grad[i];
  }
  const double delta = hp.delta_at(s.k);
  const double phi_sq = hp.phi * hp.phi;
  if (denom_sq) denom_sq->resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    s.m[i] = hp.beta1 * s.m[i] + grad[i];
    s.v[i] = hp.beta2 * s.v[i] + grad[i] * grad[i];
    const double w = s.v[i] + std::max(s.g0_sq[i], phi_sq) * delta * delta;
    if (denom_sq) (*denom_sq)[i] = w;
    if (w == 0.0) throw Error(ErrorKind::ZeroDenominator, "coordinate " + std::to_string(i) + " has zero denominator");
    s.x[i] -= hp.alpha * s.m[i] / std::sqrt(w);
  }
  ++s.k;
}

void practical_update(AdamState& s, const Vec& grad, const AdamHyperParams& hp, Vec* denom_sq) {
  const std::size_t d = grad.size();
  if (s.k == 0 && s.g0_sq.empty()) {
    s.g0_sq.resize(d);
    for (std::size_t i = 0; i < d; ++i) s.g0_sq[i] = grad[i] * grad[i];
  }
  const double kp1 = static_cast<double>(s.k + 1);
  const double c1 = 1.0 - std::pow(hp.beta1, kp1);
  const double c2 = 1.0 - std::pow(hp.beta2, kp1);
  if (denom_sq) denom_sq->resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    s.m[i] = hp.beta1 * s.m[i] + (1.0 - hp.beta1) * grad[i];
    s.v[i] = hp.beta2 * s.v[i] + (1.0 - hp.beta2) * grad[i] * grad[i];
    const double den = std::sqrt(s.v[i] / c2) + hp.delta.value;
    if (denom_sq) (*denom_sq)[i] = den * den;
    if (den == 0.0) throw Error(ErrorKind::ZeroDenominator, "coordinate " + std::to_string(i) + " has zero denominator");
    s.x[i] -= hp.alpha * (s.m[i] / c1) / den;
  }
  ++s.k;
}

void check_practical(const AdamHyperParams& hp) {
  require(hp.alpha > 0.0, ErrorKind::InvalidArgument, "alpha must be positive");
  require(hp.delta.kind == DeltaSchedule::Kind::Constant && hp.delta.value >= 0.0, ErrorKind::InvalidArgument,
          "practical Adam takes a constant non-negative delta");
  require(hp.beta1 >= 0.0 && hp.beta1 < 1.0 && hp.beta2 >= 0.0 && hp.beta2 < 1.0, ErrorKind::InvalidArgument,
          "betas must lie in [0, 1)");
}

}  // namespace

AdamState adam_variant_step(const AdamState& state, const Vec& grad, const AdamHyperParams& hp, Vec* denom_sq) {
  check_sizes(state, grad);
  AdamState next = state;
  variant_update(next, grad, hp, denom_sq);
  return next;
}

AdamState adam_practical_step(const AdamState& state, const Vec& grad, const AdamHyperParams& hp, Vec* denom_sq) {
  check_sizes(state, grad);
  check_practical(hp);
  AdamState next = state;
  practical_update(next, grad, hp, denom_sq);
  return next;
}

Vec gbar_recursion_step(const Vec& gbar, const Vec& vhat_diag, const Matrix& qbar, double alpha) {
  Vec t = qbar * gbar;
  for (std::size_t i = 0; i < t.size(); ++i) t[i] *= vhat_diag[i];
  const Vec back = qbar.transpose() * t;
  Vec out(gbar.size());
  for (std::size_t i = 0; i < gbar.size(); ++i) out[i] = gbar[i] - alpha * back[i];
  return out;
}

Objective make_objective(const QuadraticProblem& prob) {
  Objective obj;
  obj.dim = prob.dim();
  obj.eval = [&prob](const Vec& x, Vec& g) {
    auto [f, grad] = value_and_grad(prob, x);
    g = std::move(grad);
    return f;
  };
  obj.f_star = 0.0;
  obj.scale = prob.q.diag();
  return obj;
}

const char* to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::GD: return "gd";
    case OptimizerKind::AdamVariant: return "adam_variant";
    case OptimizerKind::AdamPractical: return "adam_practical";
  }
  return "unknown";
}

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "gd") return OptimizerKind::GD;
  if (name == "adam_variant" || name == "adam") return OptimizerKind::AdamVariant;
  if (name == "adam_practical") return OptimizerKind::AdamPractical;
  throw Error(ErrorKind::InvalidArgument, "unknown optimizer '" + name + "'");
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::BudgetExhausted: return "BudgetExhausted";
    case RunStatus::Plateau: return "Plateau";
  }
  return "Unknown";
}

namespace {

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

// Denominators the next step would use, without advancing state.
void peek_denominators(OptimizerKind kind, const AdamState& s, const Vec& g, const AdamHyperParams& hp, Vec& out) {
  const std::size_t d = g.size();
  out.resize(d);
  if (kind == OptimizerKind::AdamVariant) {
    const double delta = hp.delta_at(s.k);
    const double phi_sq = hp.phi * hp.phi;
    for (std::size_t i = 0; i < d; ++i) {
      const double g0 = s.k == 0 && s.g0_sq.empty() ? g[i] * g[i] : s.g0_sq[i];
      out[i] = hp.beta2 * s.v[i] + g[i] * g[i] + std::max(g0, phi_sq) * delta * delta;
    }
  } else {
    const double c2 = 1.0 - std::pow(hp.beta2, static_cast<double>(s.k + 1));
    for (std::size_t i = 0; i < d; ++i) {
      const double v = (hp.beta2 * s.v[i] + (1.0 - hp.beta2) * g[i] * g[i]) / c2;
      const double den = std::sqrt(v) + hp.delta.value;
      out[i] = den * den;
    }
  }
}

}  // namespace

RunTrace run(const Objective& obj, const OptimizerSpec& opt, const Vec& x0, const StopRule& stop,
             const Observer& observer) {
  require(x0.size() == obj.dim, ErrorKind::InvalidArgument, "x0 has wrong length");
  require(stop.eps > 0.0 || stop.max_iter > 0, ErrorKind::InvalidArgument, "need eps or max_iter");
  require(stop.trace_stride >= 1, ErrorKind::InvalidArgument, "trace stride must be positive");
  if (opt.kind == OptimizerKind::GD) require(opt.gd_alpha > 0.0, ErrorKind::InvalidArgument, "alpha must be positive");
  if (opt.kind == OptimizerKind::AdamVariant) opt.hp.validate();
  if (opt.kind == OptimizerKind::AdamPractical) check_practical(opt.hp);

  RunTrace trace;
  AdamState state = AdamState::start(x0);
  Vec g;
  double f = obj.eval(state.x, g);
  Vec denom;
  std::vector<double> window(std::max<std::size_t>(stop.plateau_window, 1), 0.0);
  const std::size_t w = window.size();
  const double target = obj.pl_target ? stop.eps : 0.5 * stop.eps * stop.eps;

  bool last_kept = false;
  for (std::size_t k = 0;; ++k) {
    if (!std::isfinite(f) || !all_finite(g)) {
      trace.iterations = k;
      throw RunAborted("non-finite value at iteration " + std::to_string(k), std::move(trace));
    }
    TraceRecord rec;
    rec.k = k;
    rec.f = f;
    rec.grad_inf = norm_inf(g);
    rec.grad_l2 = norm2(g);
    if (opt.kind == OptimizerKind::GD) {
      denom.clear();
      rec.min_denom = std::numeric_limits<double>::quiet_NaN();
    } else {
      peek_denominators(opt.kind, state, g, opt.hp, denom);
      double mn = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < denom.size(); ++i) mn = std::min(mn, denom[i] / (obj.scale[i] * obj.scale[i]));
      rec.min_denom = mn;
    }

    bool done = false;
    if (stop.eps > 0.0 && f - obj.f_star <= target) {
      trace.status = RunStatus::Converged;
      done = true;
    } else if (stop.detect_plateau && k >= w &&
               std::abs(f - window[k % w]) <= stop.plateau_rtol * std::abs(window[k % w])) {
      trace.status = RunStatus::Plateau;
      done = true;
    } else if (k >= stop.max_iter) {
      trace.status = RunStatus::BudgetExhausted;
      done = true;
    }
    window[k % w] = f;

    last_kept = done || k % stop.trace_stride == 0;
    if (last_kept) trace.records.push_back(rec);
    if (done) {
      trace.iterations = k;
      break;
    }

    if (observer) observer(StepView{k, state.x, g, f, denom});

    switch (opt.kind) {
      case OptimizerKind::GD:
        for (std::size_t i = 0; i < g.size(); ++i) state.x[i] -= opt.gd_alpha * g[i];
        ++state.k;
        break;
      case OptimizerKind::AdamVariant:
        variant_update(state, g, opt.hp, nullptr);
        break;
      case OptimizerKind::AdamPractical:
        practical_update(state, g, opt.hp, nullptr);
        break;
    }
    const double f_next = obj.eval(state.x, g);
    if (last_kept) trace.records.back().descent = f_next <= f;
    f = f_next;
  }
  trace.x_final = state.x;
  trace.g_final = g;
  trace.f_final = f;
  return trace;
}

RunTrace run(const QuadraticProblem& prob, const OptimizerSpec& opt, const Vec& x0, const StopRule& stop,
             const Observer& observer) {
  return run(make_objective(prob), opt, x0, stop, observer);
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  CsvWriter csv(os);
  csv.row({"k", "f", "grad_inf", "grad_l2", "min_denom", "descent_flag"});
  for (const auto& r : trace.records)
    csv.row({std::to_string(r.k), csv_field(r.f), csv_field(r.grad_inf), csv_field(r.grad_l2),
             csv_field(r.min_denom), r.descent ? "1" : "0"});
}

}  // namespace adamprecond
