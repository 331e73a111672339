#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adamprecond/io.hpp"
#include "adamprecond/optimizers.hpp"
#include "adamprecond/quadratics.hpp"
#include "adamprecond/schedules.hpp"

namespace adamprecond {

// Worker count: ADAMPRECOND_THREADS when set and positive, else hardware concurrency.
std::size_t worker_count();

// Runs fn(0..n-1) on worker_count() threads. The first exception is rethrown after joining.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// FNV-1a over the raw bytes, 16 hex digits.
std::string hash_vector(const Vec& x);

// Problem families addressable by name:
//   diagonal          log-spaced spectrum from 1 to kappa
//   diagonal_random   log-uniform spectrum in [1, kappa], endpoints pinned, drawn from the seed
//   dominant          nu-dominant with log-uniform diagonal in [1, diag_kappa]
//   wishart           A A^T / d, A ~ Normal(mean, 1)
//   wishart_spectrum  diagonal matrix holding the wishart eigenvalues
//   adversarial       [[b, b-1], [b-1, b]]
struct GeneratorSpec {
  std::string name = "diagonal";
  std::size_t d = 10;
  double kappa = 1e4;
  double mean = 5.0;
  double nu = 0.3;
  double diag_kappa = 100.0;
  double b = 1e3;

  void validate() const;
};

QuadraticProblem build_problem(const GeneratorSpec& g, std::uint64_t seed);

Json generator_to_json(const GeneratorSpec& g);
GeneratorSpec generator_from_json(const Json& j);

// Problem-appropriate init: uniform box for diagonal Q, T x0 uniform otherwise.
InitMode default_init_mode(const QuadraticProblem& prob);

struct ExperimentConfig {
  std::string experiment = "run";
  GeneratorSpec generator;
  std::vector<std::string> optimizers{"adam_variant"};
  std::string hyper_source = "schedule";  // "schedule" or "explicit"
  AdamHyperParams hp;                     // used when hyper_source is explicit
  double gd_alpha = 0.0;                  // <= 0 selects 1 / lambda_max
  InitSpec init;
  std::string init_mode = "auto";  // auto, uniform_box or assumption_general
  std::vector<std::uint64_t> seeds{1};
  double eps = 1e-6;
  std::size_t max_iter = 100000;
  std::size_t plateau_window = 1000;
  double plateau_rtol = 1e-12;
  bool detect_plateau = true;
  std::size_t trace_stride = 1;
  double c_alpha = 1.0;
  std::string out;

  void validate() const;
};

std::string config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const std::string& text);

struct RunResult {
  std::uint64_t seed = 0;
  std::string optimizer;
  std::string x0_hash;
  OptimizerSpec spec;
  std::optional<ScheduleReport> schedule;
  RunTrace trace;
  std::string error;  // non-empty when the run failed
};

// Hyper-parameters for one optimizer on one (problem, x0).
OptimizerSpec resolve_optimizer(const ExperimentConfig& c, const std::string& name, const QuadraticProblem& prob,
                                const Vec& x0, std::optional<ScheduleReport>* schedule = nullptr);

std::vector<RunResult> run_experiment(const ExperimentConfig& c);
void write_runs_csv(std::ostream& os, const std::vector<RunResult>& runs);
std::string runs_to_json(const std::vector<RunResult>& runs);

// ---- convergence race ----

struct RaceConfig {
  GeneratorSpec generator{"wishart", 50};
  std::vector<std::uint64_t> seeds{1};
  InitSpec init;
  InitMode init_mode = InitMode::UniformBox;
  double eps_rel = 0.0;  // target f <= (eps_rel |gbar0|)^2 / 2; <= 0 disables the target
  std::size_t max_iter = 100000;
  std::size_t gd_max_iter = 0;  // 0 means max_iter
  std::vector<double> alpha_grid{1e-1, 1e-2, 1e-3, 1e-4};  // multiplied by init.b
  double beta1 = 0.9;
  double beta2 = 0.999;
  double delta = 1e-8;
  double gd_scale = 1.99;  // GD step gd_scale / lambda_max
  bool include_practical = true;
  bool include_variant = false;  // analysed schedule, diagonal or general by Q
  double c_alpha = 1.0;
  bool detect_plateau = true;
  std::size_t trace_stride = 100;
};

struct RaceRow {
  std::uint64_t seed = 0;
  std::string optimizer;
  double alpha = 0.0;
  std::string x0_hash;
  long iterations_to_eps = -1;
  double final_f = 0.0;
  bool plateaued = false;
  std::string status;
  std::string error;
};

struct RaceResult {
  std::vector<RaceRow> rows;
  std::vector<RunTrace> traces;  // parallel to rows
};

RaceResult race(const RaceConfig& c);
void write_race_csv(std::ostream& os, const std::vector<RaceRow>& rows);
void write_race_dat(std::ostream& os, const RaceRow& row, const RunTrace& trace);

// ---- d-vs-kappa scaling sweep ----

struct SweepConfig {
  std::vector<std::size_t> d_grid{10};
  std::vector<double> kappa_grid{1e2, 1e3, 1e4};
  double p = 0.75;
  double b = 1.0;
  double eps = 1e-4;
  std::vector<std::uint64_t> seeds{1};
  std::size_t max_iter = 10000000;
  double c_alpha = 1.0;
  bool run_gd = true;
  bool run_adam = true;
};

struct SweepRow {
  std::size_t d = 0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  std::string optimizer;
  long iterations = -1;
  std::string status;
  double predicted = 0.0;  // kappa_Adam for Adam, kappa for GD
  double ratio = 0.0;      // iterations / predicted
};

std::vector<SweepRow> sweep_scaling(const SweepConfig& c);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// ---- Jacobi-scaling statistics on wishart draws ----

struct Table1Row {
  std::uint64_t seed = 0;
  double kappa = 0.0;
  double kappa_bar = 0.0;
  double ratio = 0.0;
};

std::vector<Table1Row> table1(const std::vector<std::uint64_t>& seeds, std::size_t d = 50, double mean = 5.0);
void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows);

// ---- fixed points with constant delta ----

enum class FixedPointClass { Trivial, NonTrivial, NotPlateaued };
const char* to_string(FixedPointClass c);

struct FixedPointReport {
  FixedPointClass classification = FixedPointClass::NotPlateaued;
  std::size_t iterations = 0;
  double f_final = 0.0;
  Vec g_final;
  double g_l1 = 0.0, g_linf = 0.0;
  // mean of |g_i| over the final window, the estimate of lim |g_k^(i)|
  Vec g_limit;
  double limit_l1 = 0.0, limit_linf = 0.0;
  double tol_zero = 0.0;
  double alpha = 0.0, beta2 = 0.0, delta = 0.0, kappa = 0.0;
  double r_max = 0.0, r_min = 0.0;
  std::string delta_case;  // zero, small, large or intermediate
  bool bound_applicable = false;
  double bound_value = 0.0;
  double measured = 0.0;  // the norm compared against bound_value
  bool satisfied = true;
};

FixedPointReport fixed_point_probe(const QuadraticProblem& prob, const AdamHyperParams& hp, const Vec& x0,
                                   std::size_t budget, std::size_t window = 1000, double rtol = 1e-12);
std::string fixed_point_to_json(const FixedPointReport& r);

// ---- Omega(d) lower bound with delta = 0 ----

struct LowerBoundConfig {
  std::vector<std::size_t> d_grid{100};
  std::vector<std::uint64_t> seeds{1};
  double b = 1.0;
  double beta2 = 0.999;
  double kappa = 1.0;  // diagonal spectrum log-spaced from 1 to kappa
  std::size_t budget_factor = 100;  // iteration cap budget_factor * d
};

struct LowerBoundRow {
  std::size_t d = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double spread = 0.0;  // |z0|_inf / min_j |z0_j|
  long iterations = -1;  // K'; budget when not reached
  std::string status;    // reached, budget or skipped
  bool at_least_quarter_d = false;
};

struct LowerBoundSummary {
  std::size_t d = 0;
  std::size_t seeds = 0;
  std::size_t skipped = 0;
  std::size_t at_least_quarter_d = 0;
  double fraction = 0.0;
};

std::vector<LowerBoundRow> lower_bound_probe(const LowerBoundConfig& c);
std::vector<LowerBoundSummary> summarize_lower_bound(const std::vector<LowerBoundRow>& rows);
void write_lower_bound_csv(std::ostream& os, const std::vector<LowerBoundRow>& rows);

// ---- schedule bound audit ----

struct AuditConfig {
  GeneratorSpec generator{"diagonal_random", 10};
  double p = 0.75;
  double b = 1.0;
  double eps = 1e-6;
  std::vector<std::uint64_t> seeds{1};
  double c_alpha = 1.0;
};

struct AuditFailure {
  std::uint64_t seed = 0;
  std::string predicate;
  long k = -1;
  std::string detail;
};

struct AuditRun {
  std::uint64_t seed = 0;
  ScheduleReport schedule;
  long k_tilde = 0;  // horizon at the realised x0
  long k_star = 0;
  double f_k_star = 0.0;
  double target = 0.0;
  std::size_t failures = 0;
};

struct AuditReport {
  std::vector<AuditRun> runs;
  std::vector<AuditFailure> failures;
  bool passed() const { return failures.empty(); }
};

AuditReport bound_audit(const AuditConfig& c);
std::string audit_to_json(const AuditReport& r);

// Seed lists: "1,2,5", "1..50" and mixtures such as "1..3,7".
std::vector<std::uint64_t> parse_seeds(const std::string& text);

}  // namespace adamprecond
