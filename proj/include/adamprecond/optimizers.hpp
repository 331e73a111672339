#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "adamprecond/errors.hpp"
#include "adamprecond/linalg.hpp"
#include "adamprecond/quadratics.hpp"

namespace adamprecond {

struct DeltaSchedule {
  enum class Kind { Decaying, Constant };
  Kind kind = Kind::Decaying;
  double value = 0.0;  // constant delta; unused when decaying

  static DeltaSchedule decaying() { return {Kind::Decaying, 0.0}; }
  static DeltaSchedule constant(double d) { return {Kind::Constant, d}; }
};

struct AdamHyperParams {
  double alpha = 1e-3;
  double beta1 = 0.0;
  double beta2 = 0.999;
  double phi = 1.0;
  DeltaSchedule delta;

  void validate() const;
  // delta_k at the pre-step index k
  double delta_at(std::size_t k) const;
};

struct AdamState {
  std::size_t k = 0;
  Vec x, m, v, g0_sq;

  static AdamState start(const Vec& x0);
};

Vec gd_step(const Vec& x, const Vec& grad, double alpha);

// Analyzed variant. denom_sq, when given, receives v + max(g0^2, phi^2) delta_k^2 per coordinate.
AdamState adam_variant_step(const AdamState& state, const Vec& grad, const AdamHyperParams& hp,
                            Vec* denom_sq = nullptr);

// Bias-corrected rule with delta outside the square root; hp.delta must be constant.
// denom_sq, when given, receives (sqrt(v_tilde) + delta)^2.
AdamState adam_practical_step(const AdamState& state, const Vec& grad, const AdamHyperParams& hp,
                              Vec* denom_sq = nullptr);

// (I - alpha Qbar^T diag(vhat) Qbar) gbar
Vec gbar_recursion_step(const Vec& gbar, const Vec& vhat_diag, const Matrix& qbar, double alpha);

// Anything run() can minimise.
struct Objective {
  std::size_t dim = 0;
  std::function<double(const Vec&, Vec&)> eval;  // returns f, writes gradient
  double f_star = 0.0;
  Vec scale;               // per-coordinate scale used for the hat-space denominators
  bool pl_target = false;  // stop on f - f* <= eps instead of f <= eps^2 / 2
};

Objective make_objective(const QuadraticProblem& prob);

enum class OptimizerKind { GD, AdamVariant, AdamPractical };

const char* to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::GD;
  double gd_alpha = 1.0;
  AdamHyperParams hp;
};

struct StopRule {
  double eps = 0.0;  // <= 0 disables the target test
  std::size_t max_iter = 100000;
  std::size_t plateau_window = 1000;
  double plateau_rtol = 1e-12;
  bool detect_plateau = true;
  std::size_t trace_stride = 1;  // keep every stride-th record plus the last
};

enum class RunStatus { Converged, BudgetExhausted, Plateau };

const char* to_string(RunStatus s);

struct TraceRecord {
  std::size_t k = 0;
  double f = 0.0;
  double grad_inf = 0.0;
  double grad_l2 = 0.0;
  double min_denom = 0.0;  // min_j of the hat-space denominator; NaN for GD
  bool descent = true;     // f_{k+1} <= f_k; true on the final record
};

struct RunTrace {
  std::vector<TraceRecord> records;
  RunStatus status = RunStatus::BudgetExhausted;
  std::size_t iterations = 0;
  Vec x_final;
  Vec g_final;
  double f_final = 0.0;
};

// Per-iteration view handed to observers before the step from k to k+1.
struct StepView {
  std::size_t k;
  const Vec& x;
  const Vec& g;
  double f;
  const Vec& denom_sq;  // raw denominators (empty for GD)
};

using Observer = std::function<void(const StepView&)>;

class RunAborted : public Error {
 public:
  RunAborted(const std::string& what, RunTrace partial)
      : Error(ErrorKind::NonFinite, what), partial_(std::move(partial)) {}
  const RunTrace& partial() const { return partial_; }

 private:
  RunTrace partial_;
};

RunTrace run(const Objective& obj, const OptimizerSpec& opt, const Vec& x0, const StopRule& stop,
             const Observer& observer = nullptr);

RunTrace run(const QuadraticProblem& prob, const OptimizerSpec& opt, const Vec& x0, const StopRule& stop,
             const Observer& observer = nullptr);

void write_trace_csv(std::ostream& os, const RunTrace& trace);

}  // namespace adamprecond
