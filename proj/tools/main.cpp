#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "adamprecond/bench.hpp"
#include "adamprecond/errors.hpp"
#include "adamprecond/io.hpp"
#include "adamprecond/plfuncs.hpp"
#include "adamprecond/quadratics.hpp"
#include "adamprecond/schedules.hpp"

using namespace adamprecond;

namespace {

// Thrown when an acceptance predicate fails; maps to exit code 3.
struct PredicateFailure {
  std::string message;
};

struct Common {
  std::string seed = "1";
  std::string out;
  std::string format;
};

void add_common(CLI::App* sub, Common& c, const std::string& seed_default, const std::string& format_default) {
  c.seed = seed_default;
  c.format = format_default;
  sub->add_option("--seed,--seeds", c.seed, "seed, list a,b,c or range a..b");
  sub->add_option("--out", c.out, "output file (standard output when empty)");
  sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_file(c.out, text);
  }
}

std::size_t to_count(double v, const char* name) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> to_counts(const std::vector<double>& v, const char* name) {
  std::vector<std::size_t> out;
  for (double x : v) out.push_back(to_count(x, name));
  return out;
}

// generator flags shared by several subcommands; integer sizes are read as doubles so 1e2 works
struct GenFlags {
  GeneratorSpec spec;
  double d = 10;
};

void add_generator(CLI::App* sub, GenFlags& g, const std::string& name, double d) {
  g.spec.name = name;
  g.d = d;
  sub->add_option("--gen", g.spec.name, "problem generator")
      ->check(CLI::IsMember({"diagonal", "diagonal_random", "dominant", "wishart", "wishart_spectrum", "adversarial"}));
  sub->add_option("--d", g.d, "dimension");
  sub->add_option("--kappa", g.spec.kappa, "condition number of diagonal spectra");
  sub->add_option("--mean", g.spec.mean, "entry mean for wishart draws");
  sub->add_option("--nu", g.spec.nu, "dominance level for dominant");
  sub->add_option("--diag-kappa", g.spec.diag_kappa, "diagonal spread for dominant");
  sub->add_option("--adv-b", g.spec.b, "entry b of the adversarial 2x2 matrix");
}

GeneratorSpec resolve(const GenFlags& g) {
  GeneratorSpec s = g.spec;
  s.d = to_count(g.d, "--d");
  if (s.name == "adversarial") s.d = 2;
  return s;
}

std::string csv_of_kv(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ostringstream os;
  CsvWriter csv(os);
  std::vector<std::string> keys, vals;
  for (const auto& [k, v] : kv) {
    keys.push_back(k);
    vals.push_back(v);
  }
  csv.row(keys);
  csv.row(vals);
  return os.str();
}

// ---- spectral ----

void cmd_spectral(const Common& c, const GenFlags& g) {
  const auto seeds = parse_seeds(c.seed);
  const GeneratorSpec spec = resolve(g);
  std::vector<SpectralSummary> sums;
  for (auto s : seeds) sums.push_back(spectral_summary(build_problem(spec, s)));
  if (c.format == "csv") {
    std::ostringstream os;
    CsvWriter csv(os);
    csv.row({"seed", "dim", "kappa", "kappa_diag", "kappa_bar", "kappa_hat", "mu1", "mu2", "rho1", "rho2", "q_min",
             "q_max"});
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const auto& s = sums[i];
      csv.row({std::to_string(seeds[i]), std::to_string(s.dim), csv_field(s.kappa), csv_field(s.kappa_diag),
               csv_field(s.kappa_bar), csv_field(s.kappa_hat), csv_field(s.mu1), csv_field(s.mu2), csv_field(s.rho1),
               csv_field(s.rho2), csv_field(s.q_min), csv_field(s.q_max)});
    }
    emit(c, os.str());
    return;
  }
  if (sums.size() == 1) {
    emit(c, summary_to_json(sums[0]));
    return;
  }
  Json arr = Json::array();
  for (const auto& s : sums) arr.push_back(Json::parse(summary_to_json(s)));
  emit(c, dump_json(arr));
}

// ---- schedule ----

struct ScheduleFlags {
  std::string kind = "diagonal";
  double b = 1.0, p = 0.75, theta = 1.0, zeta = 1.0, eps = 1e-6, c_alpha = 1.0;
  PLConstants pl;
};

void cmd_schedule(const Common& c, const GenFlags& g, const ScheduleFlags& f) {
  ScheduleReport r;
  const GeneratorSpec spec = resolve(g);
  if (f.kind == "diagonal") {
    r = schedule_diagonal(spec.d, spec.kappa, f.b, f.p, f.eps, f.c_alpha);
  } else if (f.kind == "general") {
    const QuadraticProblem prob = build_problem(spec, parse_seeds(c.seed).front());
    r = schedule_general(spectral_summary(prob), prob.dim(), f.b, f.p, f.theta, f.zeta, f.eps, f.c_alpha);
  } else {
    r = schedule_pl(f.pl, f.eps, f.c_alpha);
  }
  if (c.format == "json") {
    emit(c, schedule_to_json(r));
    return;
  }
  emit(c, csv_of_kv({{"kind", to_string(r.kind)},
                     {"alpha", csv_field(r.hp.alpha)},
                     {"beta2", csv_field(r.hp.beta2)},
                     {"phi", csv_field(r.hp.phi)},
                     {"k_tilde", std::to_string(r.k_tilde)},
                     {"k_star", std::to_string(r.k_star)},
                     {"kappa_adam", csv_field(r.kappa_adam)},
                     {"alpha_branch", r.alpha_branch},
                     {"gamma", csv_field(r.gamma)}}));
}

// ---- run ----

struct RunFlags {
  std::string optimizers = "adam_variant";
  std::string hyper = "schedule";
  double alpha = 1e-3, beta1 = 0.0, beta2 = 0.999, phi = 1.0;
  double delta = -1.0;  // negative selects the decaying schedule
  double gd_alpha = 0.0;
  double b = 1.0, p = 0.75, theta = 1.0, zeta = 1.0;
  std::string init_mode = "auto";
  double eps = 1e-6;
  double max_iter = 100000;
  double plateau_window = 1000;
  double plateau_rtol = 1e-12;
  bool no_plateau = false;
  double trace_stride = 1;
  double c_alpha = 1.0;
  bool emit_config = false;
  std::string config;
};

ExperimentConfig config_of(const Common& c, const GenFlags& g, const RunFlags& f) {
  ExperimentConfig cfg;
  cfg.experiment = "run";
  cfg.generator = resolve(g);
  cfg.optimizers.clear();
  std::stringstream ss(f.optimizers);
  std::string part;
  while (std::getline(ss, part, ',')) cfg.optimizers.push_back(part);
  cfg.hyper_source = f.hyper;
  cfg.hp.alpha = f.alpha;
  cfg.hp.beta1 = f.beta1;
  cfg.hp.beta2 = f.beta2;
  cfg.hp.phi = f.phi;
  cfg.hp.delta = f.delta < 0.0 ? DeltaSchedule::decaying() : DeltaSchedule::constant(f.delta);
  cfg.gd_alpha = f.gd_alpha;
  cfg.init.b = f.b;
  cfg.init.p = f.p;
  cfg.init.theta = f.theta;
  cfg.init.zeta = f.zeta;
  cfg.init_mode = f.init_mode;
  cfg.seeds = parse_seeds(c.seed);
  cfg.eps = f.eps;
  cfg.max_iter = to_count(f.max_iter, "--max-iter");
  cfg.plateau_window = to_count(f.plateau_window, "--plateau-window");
  cfg.plateau_rtol = f.plateau_rtol;
  cfg.detect_plateau = !f.no_plateau;
  cfg.trace_stride = to_count(f.trace_stride, "--trace-stride");
  cfg.c_alpha = f.c_alpha;
  cfg.out = c.out;
  cfg.validate();
  return cfg;
}

void cmd_run(const Common& c, const GenFlags& g, const RunFlags& f) {
  ExperimentConfig cfg = f.config.empty() ? config_of(c, g, f) : config_from_json(read_file(f.config));
  if (f.emit_config) {
    // --out names the config file here, so it is not stored as the results path
    cfg.out.clear();
    emit(c, config_to_json(cfg));
    return;
  }
  Common out = c;
  if (out.out.empty()) out.out = cfg.out;
  const auto runs = run_experiment(cfg);
  if (c.format == "json") {
    emit(out, runs_to_json(runs));
  } else {
    std::ostringstream os;
    write_runs_csv(os, runs);
    emit(out, os.str());
  }
  for (const auto& r : runs)
    if (!r.error.empty()) throw Error(ErrorKind::NonFinite, "seed " + std::to_string(r.seed) + ": " + r.error);
}

// ---- race ----

struct RaceFlags {
  double eps_rel = 0.0;
  double max_iter = 100000, gd_max_iter = 0;
  std::vector<double> alpha_grid{1e-1, 1e-2, 1e-3, 1e-4};
  double beta1 = 0.9, beta2 = 0.999, delta = 1e-8, gd_scale = 1.99;
  bool variant = false, no_practical = false;
  double b = 1.0, p = 0.75, c_alpha = 1.0;
  double trace_stride = 100;
  std::string dat_dir;
};

void cmd_race(const Common& c, const GenFlags& g, const RaceFlags& f) {
  RaceConfig rc;
  rc.generator = resolve(g);
  rc.seeds = parse_seeds(c.seed);
  rc.init.b = f.b;
  rc.init.p = f.p;
  rc.eps_rel = f.eps_rel;
  rc.max_iter = to_count(f.max_iter, "--max-iter");
  rc.gd_max_iter = to_count(f.gd_max_iter, "--gd-max-iter");
  rc.alpha_grid = f.alpha_grid;
  rc.beta1 = f.beta1;
  rc.beta2 = f.beta2;
  rc.delta = f.delta;
  rc.gd_scale = f.gd_scale;
  rc.include_variant = f.variant;
  rc.include_practical = !f.no_practical;
  rc.c_alpha = f.c_alpha;
  rc.trace_stride = std::max<std::size_t>(1, to_count(f.trace_stride, "--trace-stride"));
  const RaceResult res = race(rc);
  if (!f.dat_dir.empty()) {
    std::filesystem::create_directories(f.dat_dir);
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      std::string name = res.rows[i].optimizer;
      for (char& ch : name)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
      std::ostringstream os;
      write_race_dat(os, res.rows[i], res.traces[i]);
      write_file(f.dat_dir + "/" + name + "_seed" + std::to_string(res.rows[i].seed) + ".dat", os.str());
    }
  }
  if (c.format == "json") {
    Json arr = Json::array();
    for (const auto& r : res.rows) {
      Json j;
      j["optimizer"] = r.optimizer;
      j["seed"] = r.seed;
      j["alpha"] = r.alpha;
      j["x0_hash"] = r.x0_hash;
      j["iterations_to_eps"] = r.iterations_to_eps;
      j["final_f"] = r.final_f;
      j["plateaued"] = r.plateaued;
      j["status"] = r.status;
      if (!r.error.empty()) j["error"] = r.error;
      arr.push_back(j);
    }
    emit(c, dump_json(arr));
  } else {
    std::ostringstream os;
    write_race_csv(os, res.rows);
    emit(c, os.str());
  }
}

// ---- sweep ----

struct SweepFlags {
  std::vector<double> d_grid{10};
  std::vector<double> kappa_grid{1e2, 1e3, 1e4};
  double p = 0.75, b = 1.0, eps = 1e-4, max_iter = 1e7, c_alpha = 1.0;
};

void cmd_sweep(const Common& c, const SweepFlags& f) {
  SweepConfig sc;
  sc.d_grid = to_counts(f.d_grid, "--d-grid");
  sc.kappa_grid = f.kappa_grid;
  sc.p = f.p;
  sc.b = f.b;
  sc.eps = f.eps;
  sc.seeds = parse_seeds(c.seed);
  sc.max_iter = to_count(f.max_iter, "--max-iter");
  sc.c_alpha = f.c_alpha;
  const auto rows = sweep_scaling(sc);
  if (c.format == "json") {
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json j;
      j["d"] = r.d;
      j["kappa"] = r.kappa;
      j["seed"] = r.seed;
      j["optimizer"] = r.optimizer;
      j["iterations"] = r.iterations;
      j["status"] = r.status;
      j["predicted"] = r.predicted;
      j["ratio"] = r.ratio;
      arr.push_back(j);
    }
    emit(c, dump_json(arr));
  } else {
    std::ostringstream os;
    write_sweep_csv(os, rows);
    emit(c, os.str());
  }
}

// ---- table1 ----

void cmd_table1(const Common& c, double d, double mean) {
  const auto rows = table1(parse_seeds(c.seed), to_count(d, "--d"), mean);
  if (c.format == "json") {
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json j;
      j["seed"] = r.seed;
      j["kappa"] = r.kappa;
      j["kappa_bar"] = r.kappa_bar;
      j["ratio"] = r.ratio;
      arr.push_back(j);
    }
    emit(c, dump_json(arr));
  } else {
    std::ostringstream os;
    write_table1_csv(os, rows);
    emit(c, os.str());
  }
}

// ---- fixedpoint ----

struct FixedFlags {
  double alpha = 0.01, beta2 = 0.999, phi = 1.0, delta = 0.0;
  double budget = 200000, window = 1000;
  double b = 1.0;
};

void cmd_fixedpoint(const Common& c, const GenFlags& g, const FixedFlags& f) {
  const GeneratorSpec spec = resolve(g);
  AdamHyperParams hp;
  hp.alpha = f.alpha;
  hp.beta2 = f.beta2;
  hp.phi = f.phi;
  hp.delta = DeltaSchedule::constant(f.delta);
  std::vector<std::pair<std::uint64_t, FixedPointReport>> reps;
  for (auto seed : parse_seeds(c.seed)) {
    const QuadraticProblem prob = build_problem(spec, seed);
    InitSpec init;
    init.b = f.b;
    init.seed = seed;
    const Vec x0 = sample_init(prob, init, InitMode::UniformBox);
    reps.emplace_back(seed, fixed_point_probe(prob, hp, x0, to_count(f.budget, "--budget"),
                                              to_count(f.window, "--window")));
  }
  if (c.format == "json") {
    Json arr = Json::array();
    for (const auto& [seed, r] : reps) {
      Json j;
      j["seed"] = seed;
      j["report"] = Json::parse(fixed_point_to_json(r));
      arr.push_back(j);
    }
    emit(c, dump_json(arr));
  } else {
    std::ostringstream os;
    CsvWriter csv(os);
    csv.row({"seed", "classification", "iterations", "f_final", "g_l1", "g_linf", "delta_case", "bound_value",
             "measured", "satisfied"});
    for (const auto& [seed, r] : reps)
      csv.row({std::to_string(seed), to_string(r.classification), std::to_string(r.iterations), csv_field(r.f_final),
               csv_field(r.g_l1), csv_field(r.g_linf), r.delta_case, csv_field(r.bound_value), csv_field(r.measured),
               r.satisfied ? "1" : "0"});
    emit(c, os.str());
  }
  for (const auto& [seed, r] : reps)
    if (!r.satisfied) throw PredicateFailure{"fixed-point bound fails for seed " + std::to_string(seed)};
}

// ---- lowerbound ----

struct LowerFlags {
  std::vector<double> d_grid{100};
  double b = 1.0, beta2 = 0.999, kappa = 1.0, budget_factor = 100;
};

void cmd_lowerbound(const Common& c, const LowerFlags& f) {
  LowerBoundConfig lc;
  lc.d_grid = to_counts(f.d_grid, "--d-grid");
  lc.seeds = parse_seeds(c.seed);
  lc.b = f.b;
  lc.beta2 = f.beta2;
  lc.kappa = f.kappa;
  lc.budget_factor = to_count(f.budget_factor, "--budget-factor");
  const auto rows = lower_bound_probe(lc);
  if (c.format == "json") {
    Json j;
    Json sums = Json::array();
    for (const auto& s : summarize_lower_bound(rows)) {
      Json x;
      x["d"] = s.d;
      x["seeds"] = s.seeds;
      x["skipped"] = s.skipped;
      x["at_least_quarter_d"] = s.at_least_quarter_d;
      x["fraction"] = s.fraction;
      sums.push_back(x);
    }
    j["summary"] = sums;
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json x;
      x["d"] = r.d;
      x["seed"] = r.seed;
      x["alpha"] = r.alpha;
      x["spread"] = r.spread;
      x["iterations"] = r.iterations;
      x["status"] = r.status;
      arr.push_back(x);
    }
    j["rows"] = arr;
    emit(c, dump_json(j));
  } else {
    std::ostringstream os;
    write_lower_bound_csv(os, rows);
    emit(c, os.str());
  }
}

// ---- audit ----

struct AuditFlags {
  double p = 0.75, b = 1.0, eps = 1e-6, c_alpha = 1.0;
};

void cmd_audit(const Common& c, const GenFlags& g, const AuditFlags& f) {
  AuditConfig ac;
  ac.generator = resolve(g);
  ac.p = f.p;
  ac.b = f.b;
  ac.eps = f.eps;
  ac.c_alpha = f.c_alpha;
  ac.seeds = parse_seeds(c.seed);
  const AuditReport rep = bound_audit(ac);
  if (c.format == "json") {
    emit(c, audit_to_json(rep));
  } else {
    std::ostringstream os;
    CsvWriter csv(os);
    csv.row({"seed", "alpha", "beta2", "k_star", "k_tilde", "f_k_star", "target", "failures"});
    for (const auto& r : rep.runs)
      csv.row({std::to_string(r.seed), csv_field(r.schedule.hp.alpha), csv_field(r.schedule.hp.beta2),
               std::to_string(r.k_star), std::to_string(r.k_tilde), csv_field(r.f_k_star), csv_field(r.target),
               std::to_string(r.failures)});
    emit(c, os.str());
  }
  if (!rep.passed()) {
    const auto& f0 = rep.failures.front();
    throw PredicateFailure{std::to_string(rep.failures.size()) + " predicate failures, first: seed " +
                           std::to_string(f0.seed) + " " + f0.predicate + " at k=" + std::to_string(f0.k)};
  }
}

// ---- plcheck ----

struct PLFlags {
  std::string instance = "quadratic";
  double d = 10, kappa = 1e4, box = 2.0, samples = 10000;
  bool converge = false;
  double eps = 1e-6;
};

void cmd_plcheck(const Common& c, const PLFlags& f) {
  const std::size_t d = to_count(f.d, "--d");
  PLProblem p = f.instance == "quadratic" ? pl_from_quadratic(make_diagonal(d, log_spectrum(d, f.kappa), Vec(d, 0.0)))
                                          : pl_separable_logcosh(d, log_spectrum(d, f.kappa), f.box);
  p.box_radius = f.box;
  const std::uint64_t seed = parse_seeds(c.seed).front();
  const std::size_t n = to_count(f.samples, "--samples");
  std::vector<CheckReport> reps{check_descent_lemma(p, n, seed), check_grad_bound(p, n, seed), check_plc(p, n, seed),
                                check_consequences(p, n, seed), check_gradient_fd(p, std::max<std::size_t>(1, n / 10), seed)};
  if (f.converge) {
    InitSpec init;
    init.seed = seed;
    init.b = f.box / 2.0;
    Vec x0(d);
    Rng rng(derive_seed(seed, 0x1417));
    for (double& v : x0) v = rng.uniform(-f.box, f.box);
    const PLConstants pc = pl_constants(p, x0);
    const ScheduleReport sched = schedule_pl(pc, f.eps);
    OptimizerSpec spec;
    spec.kind = OptimizerKind::AdamVariant;
    spec.hp = sched.hp;
    StopRule stop;
    stop.eps = f.eps;
    stop.max_iter = static_cast<std::size_t>(sched.k_star);
    stop.detect_plateau = false;
    stop.trace_stride = stop.max_iter + 1;
    const RunTrace t = run(objective_from(p), spec, x0, stop);
    CheckReport conv;
    conv.check = "pl_convergence";
    conv.n_samples = 1;
    conv.max_violation = t.f_final - p.f_star - f.eps;
    conv.violations = t.status == RunStatus::Converged ? 0 : 1;
    conv.certified_constants = {{"iterations", static_cast<double>(t.iterations)},
                                {"k_star", static_cast<double>(sched.k_star)},
                                {"kappa_max0", pc.kappa_max0},
                                {"budget_factor", sched.budget_factor}};
    reps.push_back(conv);
  }
  if (c.format == "json") {
    Json arr = Json::array();
    for (const auto& r : reps) arr.push_back(Json::parse(check_to_json(r)));
    emit(c, dump_json(arr));
  } else {
    std::ostringstream os;
    CsvWriter csv(os);
    csv.row({"check", "n_samples", "violations", "max_violation"});
    for (const auto& r : reps)
      csv.row({r.check, std::to_string(r.n_samples), std::to_string(r.violations), csv_field(r.max_violation)});
    emit(c, os.str());
  }
  for (const auto& r : reps)
    if (!r.passed()) throw PredicateFailure{r.check + " has " + std::to_string(r.violations) + " violations"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adam preconditioning experiments on quadratics and PL objectives"};
  app.name("adamprecond");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Common c_spec, c_sched, c_run, c_race, c_sweep, c_table, c_fixed, c_lower, c_audit, c_pl;
  GenFlags g_spec, g_sched, g_run, g_race, g_fixed, g_audit;

  auto* spectral = app.add_subcommand("spectral", "spectral summary of a generated Hessian");
  add_common(spectral, c_spec, "1", "json");
  add_generator(spectral, g_spec, "wishart", 50);

  ScheduleFlags sf;
  auto* schedule = app.add_subcommand("schedule", "hyper-parameters and iteration budgets for the Adam variant");
  add_common(schedule, c_sched, "1", "json");
  add_generator(schedule, g_sched, "dominant", 10);
  schedule->add_option("--kind", sf.kind, "schedule family")->check(CLI::IsMember({"diagonal", "general", "pl"}));
  schedule->add_option("--b", sf.b, "init box half-width B");
  schedule->add_option("--p", sf.p, "success probability p");
  schedule->add_option("--theta", sf.theta, "init density exponent theta");
  schedule->add_option("--zeta", sf.zeta, "init density constant zeta");
  schedule->add_option("--eps", sf.eps, "target accuracy");
  schedule->add_option("--c-alpha", sf.c_alpha, "step-size constant");
  schedule->add_option("--l-min", sf.pl.l_min, "smallest per-coordinate smoothness");
  schedule->add_option("--l-max", sf.pl.l_max, "largest per-coordinate smoothness");
  schedule->add_option("--mu-tilde", sf.pl.mu_tilde, "PL constant");
  schedule->add_option("--kappa-max0", sf.pl.kappa_max0, "max_i L_i / mu_i0 at the init");
  schedule->add_option("--delta0", sf.pl.delta0, "initial gap f(x0) - f*");

  RunFlags rf;
  auto* runc = app.add_subcommand("run", "run optimizers on generated problems and emit traces");
  add_common(runc, c_run, "1", "csv");
  add_generator(runc, g_run, "diagonal", 10);
  runc->add_option("--optimizer", rf.optimizers, "comma list of gd, adam_variant, adam_practical");
  runc->add_option("--hyper", rf.hyper, "hyper-parameter source for adam_variant")
      ->check(CLI::IsMember({"schedule", "explicit"}));
  runc->add_option("--alpha", rf.alpha, "Adam step size (explicit)");
  runc->add_option("--beta1", rf.beta1, "first-moment decay (explicit)");
  runc->add_option("--beta2", rf.beta2, "second-moment decay (explicit)");
  runc->add_option("--phi", rf.phi, "denominator floor phi (explicit)");
  runc->add_option("--delta", rf.delta, "constant delta; negative selects the decaying schedule");
  runc->add_option("--gd-alpha", rf.gd_alpha, "GD step; <= 0 uses 1/lambda_max");
  runc->add_option("--b", rf.b, "init box half-width B");
  runc->add_option("--p", rf.p, "success probability p");
  runc->add_option("--theta", rf.theta, "init density exponent theta");
  runc->add_option("--zeta", rf.zeta, "init density constant zeta");
  runc->add_option("--init-mode", rf.init_mode, "init distribution")
      ->check(CLI::IsMember({"auto", "uniform_box", "assumption_general"}));
  runc->add_option("--eps", rf.eps, "stop when f <= eps^2/2");
  runc->add_option("--max-iter", rf.max_iter, "iteration cap");
  runc->add_option("--plateau-window", rf.plateau_window, "plateau window W");
  runc->add_option("--plateau-rtol", rf.plateau_rtol, "plateau relative tolerance");
  runc->add_flag("--no-plateau", rf.no_plateau, "disable plateau stopping");
  runc->add_option("--trace-stride", rf.trace_stride, "keep every n-th trace record");
  runc->add_option("--c-alpha", rf.c_alpha, "step-size constant for schedules");
  runc->add_flag("--emit-config", rf.emit_config, "print the resolved config as JSON and exit");
  runc->add_option("--config", rf.config, "read the run config from a JSON file");

  RaceFlags raf;
  auto* racec = app.add_subcommand("race", "GD against Adam on identical problems and inits");
  add_common(racec, c_race, "1", "csv");
  add_generator(racec, g_race, "wishart", 50);
  racec->add_option("--eps-rel", raf.eps_rel, "target f <= (eps_rel |gbar0|)^2/2; 0 disables");
  racec->add_option("--max-iter", raf.max_iter, "iteration cap for Adam");
  racec->add_option("--gd-max-iter", raf.gd_max_iter, "iteration cap for GD; 0 uses --max-iter");
  racec->add_option("--alpha-grid", raf.alpha_grid, "practical Adam step sizes, times B")->delimiter(',');
  racec->add_option("--beta1", raf.beta1, "practical Adam beta1");
  racec->add_option("--beta2", raf.beta2, "practical Adam beta2");
  racec->add_option("--delta", raf.delta, "practical Adam delta");
  racec->add_option("--gd-scale", raf.gd_scale, "GD step gd_scale / lambda_max");
  racec->add_flag("--variant", raf.variant, "add adam_variant with its schedule");
  racec->add_flag("--no-practical", raf.no_practical, "skip the practical Adam grid");
  racec->add_option("--b", raf.b, "init box half-width B");
  racec->add_option("--p", raf.p, "success probability p");
  racec->add_option("--c-alpha", raf.c_alpha, "step-size constant for schedules");
  racec->add_option("--trace-stride", raf.trace_stride, "keep every n-th trace record");
  racec->add_option("--dat-dir", raf.dat_dir, "write gnuplot .dat curves here");

  SweepFlags swf;
  auto* sweep = app.add_subcommand("sweep", "iterations against d and kappa on diagonal problems");
  add_common(sweep, c_sweep, "1", "csv");
  sweep->add_option("--d-grid", swf.d_grid, "dimensions")->delimiter(',');
  sweep->add_option("--kappa-grid", swf.kappa_grid, "condition numbers")->delimiter(',');
  sweep->add_option("--p", swf.p, "success probability p");
  sweep->add_option("--b", swf.b, "init box half-width B");
  sweep->add_option("--eps", swf.eps, "stop when f <= eps^2/2");
  sweep->add_option("--max-iter", swf.max_iter, "iteration cap");
  sweep->add_option("--c-alpha", swf.c_alpha, "step-size constant");

  double t1_d = 50, t1_mean = 5.0;
  auto* tab = app.add_subcommand("table1", "kappa and Jacobi-scaled kappa of wishart draws");
  add_common(tab, c_table, "1..5", "csv");
  tab->add_option("--d", t1_d, "dimension");
  tab->add_option("--mean", t1_mean, "entry mean");

  FixedFlags ff;
  auto* fixed = app.add_subcommand("fixedpoint", "classify where constant-delta Adam settles");
  add_common(fixed, c_fixed, "1", "json");
  add_generator(fixed, g_fixed, "diagonal", 10);
  fixed->add_option("--alpha", ff.alpha, "step size");
  fixed->add_option("--beta2", ff.beta2, "second-moment decay");
  fixed->add_option("--phi", ff.phi, "denominator floor phi");
  fixed->add_option("--delta", ff.delta, "constant delta");
  fixed->add_option("--budget", ff.budget, "iteration cap");
  fixed->add_option("--window", ff.window, "plateau window");
  fixed->add_option("--b", ff.b, "init box half-width B");

  LowerFlags lf;
  auto* lower = app.add_subcommand("lowerbound", "iterations needed with delta = 0 and the best-case step");
  add_common(lower, c_lower, "1..100", "csv");
  lower->add_option("--d-grid", lf.d_grid, "dimensions")->delimiter(',');
  lower->add_option("--b", lf.b, "init box half-width B");
  lower->add_option("--beta2", lf.beta2, "second-moment decay");
  lower->add_option("--kappa", lf.kappa, "condition number of the diagonal spectrum");
  lower->add_option("--budget-factor", lf.budget_factor, "iteration cap per dimension");

  AuditFlags af;
  auto* audit = app.add_subcommand("audit", "check the descent and decay predicates along scheduled runs");
  add_common(audit, c_audit, "1..50", "json");
  add_generator(audit, g_audit, "diagonal_random", 10);
  audit->add_option("--p", af.p, "success probability p");
  audit->add_option("--b", af.b, "init box half-width B");
  audit->add_option("--eps", af.eps, "target accuracy");
  audit->add_option("--c-alpha", af.c_alpha, "step-size constant");

  PLFlags pf;
  auto* plc = app.add_subcommand("plcheck", "sampling checks on per-coordinate smooth PL objectives");
  add_common(plc, c_pl, "1", "json");
  plc->add_option("--instance", pf.instance, "objective")->check(CLI::IsMember({"quadratic", "logcosh"}));
  plc->add_option("--d", pf.d, "dimension");
  plc->add_option("--kappa", pf.kappa, "L_max / L_min");
  plc->add_option("--box", pf.box, "sampling box half-width");
  plc->add_option("--samples", pf.samples, "samples per check");
  plc->add_flag("--converge", pf.converge, "also run Adam with the PL schedule");
  plc->add_option("--eps", pf.eps, "target gap for --converge");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*spectral) cmd_spectral(c_spec, g_spec);
    else if (*schedule) cmd_schedule(c_sched, g_sched, sf);
    else if (*runc) cmd_run(c_run, g_run, rf);
    else if (*racec) cmd_race(c_race, g_race, raf);
    else if (*sweep) cmd_sweep(c_sweep, swf);
    else if (*tab) cmd_table1(c_table, t1_d, t1_mean);
    else if (*fixed) cmd_fixedpoint(c_fixed, g_fixed, ff);
    else if (*lower) cmd_lowerbound(c_lower, lf);
    else if (*audit) cmd_audit(c_audit, g_audit, af);
    else if (*plc) cmd_plcheck(c_pl, pf);
  } catch (const PredicateFailure& e) {
    std::cerr << "adamprecond: " << e.message << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "adamprecond: " << e.what() << "\n";
    return e.numerical() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "adamprecond: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
