#include "adamprecond/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "adamprecond/errors.hpp"
#include "adamprecond/rng.hpp"

namespace adamprecond {

std::size_t worker_count() {
  if (const char* env = std::getenv("ADAMPRECOND_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

std::string hash_vector(const Vec& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : x) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- generators ----

void GeneratorSpec::validate() const {
  static const char* names[] = {"diagonal", "diagonal_random", "dominant", "wishart", "wishart_spectrum", "adversarial"};
  require(std::find(std::begin(names), std::end(names), name) != std::end(names), ErrorKind::InvalidArgument,
          "unknown generator '" + name + "'");
  require(d >= 1, ErrorKind::InvalidArgument, "d must be positive");
  require(kappa >= 1.0 && diag_kappa >= 1.0, ErrorKind::InvalidArgument, "kappa must be at least 1");
}

namespace {

constexpr std::uint64_t kSpectrumStream = 0x5ec7;

Vec random_log_spectrum(std::size_t d, double kappa, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kSpectrumStream));
  Vec s(d);
  const double top = std::log(kappa);
  for (double& v : s) v = std::exp(rng.uniform(0.0, top));
  std::sort(s.begin(), s.end());
  s.front() = 1.0;
  if (d > 1) s.back() = kappa;
  return s;
}

}  // namespace

QuadraticProblem build_problem(const GeneratorSpec& g, std::uint64_t seed) {
  g.validate();
  QuadraticProblem prob;
  if (g.name == "diagonal") {
    prob = make_diagonal(g.d, log_spectrum(g.d, g.kappa), Vec(g.d, 0.0));
  } else if (g.name == "diagonal_random") {
    prob = make_diagonal(g.d, random_log_spectrum(g.d, g.kappa, seed), Vec(g.d, 0.0));
  } else if (g.name == "dominant") {
    prob = make_diag_dominant(g.d, g.nu, random_log_spectrum(g.d, g.diag_kappa, seed), seed);
  } else if (g.name == "wishart") {
    prob = make_wishart(g.d, g.mean, seed);
  } else if (g.name == "wishart_spectrum") {
    Vec ev = make_wishart(g.d, g.mean, seed).eig.eigenvalues;
    const double lo = *std::min_element(ev.begin(), ev.end());
    for (double& v : ev) v /= lo;
    prob = make_diagonal(g.d, ev, Vec(g.d, 0.0));
  } else {
    prob = make_adversarial_2x2(g.b);
  }
  prob.generator = g.name;
  prob.seed = seed;
  return prob;
}

Json generator_to_json(const GeneratorSpec& g) {
  Json j;
  j["name"] = g.name;
  j["d"] = g.d;
  j["kappa"] = g.kappa;
  j["mean"] = g.mean;
  j["nu"] = g.nu;
  j["diag_kappa"] = g.diag_kappa;
  j["b"] = g.b;
  return j;
}

GeneratorSpec generator_from_json(const Json& j) {
  GeneratorSpec g;
  g.name = j.at("name").get<std::string>();
  g.d = j.at("d").get<std::size_t>();
  g.kappa = j.at("kappa").get<double>();
  g.mean = j.at("mean").get<double>();
  g.nu = j.at("nu").get<double>();
  g.diag_kappa = j.at("diag_kappa").get<double>();
  g.b = j.at("b").get<double>();
  g.validate();
  return g;
}

InitMode default_init_mode(const QuadraticProblem& prob) {
  return prob.diagonal ? InitMode::UniformBox : InitMode::AssumptionGeneral;
}

// ---- experiment config ----

void ExperimentConfig::validate() const {
  generator.validate();
  init.validate();
  require(!seeds.empty(), ErrorKind::InvalidArgument, "need at least one seed");
  require(!optimizers.empty(), ErrorKind::InvalidArgument, "need at least one optimizer");
  for (const auto& o : optimizers) optimizer_from_string(o);
  require(hyper_source == "schedule" || hyper_source == "explicit", ErrorKind::InvalidArgument,
          "hyper_source must be schedule or explicit");
  require(init_mode == "auto" || init_mode == "uniform_box" || init_mode == "assumption_general",
          ErrorKind::InvalidArgument, "unknown init mode '" + init_mode + "'");
  require(eps > 0.0 || max_iter > 0, ErrorKind::InvalidArgument, "need eps > 0 or max_iter");
  require(trace_stride >= 1 && plateau_window >= 1, ErrorKind::InvalidArgument, "stride and window must be positive");
  require(c_alpha > 0.0, ErrorKind::InvalidArgument, "c_alpha must be positive");
}

std::string config_to_json(const ExperimentConfig& c) {
  Json j;
  j["experiment"] = c.experiment;
  j["generator"] = generator_to_json(c.generator);
  j["optimizers"] = c.optimizers;
  j["hyper_source"] = c.hyper_source;
  Json hp;
  hp["alpha"] = c.hp.alpha;
  hp["beta1"] = c.hp.beta1;
  hp["beta2"] = c.hp.beta2;
  hp["phi"] = c.hp.phi;
  hp["delta_schedule"] = c.hp.delta.kind == DeltaSchedule::Kind::Decaying ? "decaying" : "constant";
  hp["delta"] = c.hp.delta.value;
  j["hyper"] = hp;
  j["gd_alpha"] = c.gd_alpha;
  Json init;
  init["b"] = c.init.b;
  init["p"] = c.init.p;
  init["theta"] = c.init.theta;
  init["zeta"] = c.init.zeta;
  init["mode"] = c.init_mode;
  j["init"] = init;
  j["seeds"] = c.seeds;
  j["eps"] = c.eps;
  j["max_iter"] = c.max_iter;
  j["plateau_window"] = c.plateau_window;
  j["plateau_rtol"] = c.plateau_rtol;
  j["detect_plateau"] = c.detect_plateau;
  j["trace_stride"] = c.trace_stride;
  j["c_alpha"] = c.c_alpha;
  j["out"] = c.out;
  return dump_json(j);
}

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig c;
  try {
    const Json j = Json::parse(text);
    c.experiment = j.at("experiment").get<std::string>();
    c.generator = generator_from_json(j.at("generator"));
    c.optimizers = j.at("optimizers").get<std::vector<std::string>>();
    c.hyper_source = j.at("hyper_source").get<std::string>();
    const Json& hp = j.at("hyper");
    c.hp.alpha = hp.at("alpha").get<double>();
    c.hp.beta1 = hp.at("beta1").get<double>();
    c.hp.beta2 = hp.at("beta2").get<double>();
    c.hp.phi = hp.at("phi").get<double>();
    const std::string kind = hp.at("delta_schedule").get<std::string>();
    require(kind == "decaying" || kind == "constant", ErrorKind::InvalidArgument, "unknown delta schedule");
    c.hp.delta = kind == "decaying" ? DeltaSchedule::decaying() : DeltaSchedule::constant(hp.at("delta").get<double>());
    c.gd_alpha = j.at("gd_alpha").get<double>();
    const Json& init = j.at("init");
    c.init.b = init.at("b").get<double>();
    c.init.p = init.at("p").get<double>();
    c.init.theta = init.at("theta").get<double>();
    c.init.zeta = init.at("zeta").get<double>();
    c.init_mode = init.at("mode").get<std::string>();
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.eps = j.at("eps").get<double>();
    c.max_iter = j.at("max_iter").get<std::size_t>();
    c.plateau_window = j.at("plateau_window").get<std::size_t>();
    c.plateau_rtol = j.at("plateau_rtol").get<double>();
    c.detect_plateau = j.at("detect_plateau").get<bool>();
    c.trace_stride = j.at("trace_stride").get<std::size_t>();
    c.c_alpha = j.at("c_alpha").get<double>();
    c.out = j.at("out").get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

InitMode resolve_init_mode(const ExperimentConfig& c, const QuadraticProblem& prob) {
  if (c.init_mode == "uniform_box") return InitMode::UniformBox;
  if (c.init_mode == "assumption_general") return InitMode::AssumptionGeneral;
  return default_init_mode(prob);
}

ScheduleReport problem_schedule(const QuadraticProblem& prob, const Vec& x0, double b, double p, double theta,
                                double zeta, double eps, double c_alpha) {
  if (prob.diagonal) {
    Vec z(x0.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = x0[i] - prob.x_star[i];
    return schedule_diagonal(prob.dim(), prob.lambda_max() / prob.lambda_min(), b, p, eps, c_alpha, norm_inf(z));
  }
  return schedule_general(spectral_summary(prob), prob.dim(), b, p, theta, zeta, eps, c_alpha,
                          norm2(gbar_of(prob, x0)));
}

}  // namespace

OptimizerSpec resolve_optimizer(const ExperimentConfig& c, const std::string& name, const QuadraticProblem& prob,
                                const Vec& x0, std::optional<ScheduleReport>* schedule) {
  OptimizerSpec spec;
  spec.kind = optimizer_from_string(name);
  spec.gd_alpha = c.gd_alpha > 0.0 ? c.gd_alpha : 1.0 / prob.lambda_max();
  spec.hp = c.hp;
  if (spec.kind == OptimizerKind::AdamVariant && c.hyper_source == "schedule") {
    ScheduleReport r = problem_schedule(prob, x0, c.init.b, c.init.p, c.init.theta, c.init.zeta, c.eps, c.c_alpha);
    spec.hp = r.hp;
    if (schedule) *schedule = std::move(r);
  }
  return spec;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& c) {
  c.validate();
  std::vector<std::pair<std::uint64_t, std::string>> jobs;
  for (auto seed : c.seeds)
    for (const auto& o : c.optimizers) jobs.emplace_back(seed, o);
  std::vector<RunResult> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    RunResult& r = out[i];
    r.seed = jobs[i].first;
    r.optimizer = jobs[i].second;
    const QuadraticProblem prob = build_problem(c.generator, r.seed);
    InitSpec init = c.init;
    init.seed = r.seed;
    const Vec x0 = sample_init(prob, init, resolve_init_mode(c, prob));
    r.x0_hash = hash_vector(x0);
    StopRule stop;
    stop.eps = c.eps;
    stop.max_iter = c.max_iter;
    stop.plateau_window = c.plateau_window;
    stop.plateau_rtol = c.plateau_rtol;
    stop.detect_plateau = c.detect_plateau;
    stop.trace_stride = c.trace_stride;
    try {
      r.spec = resolve_optimizer(c, r.optimizer, prob, x0, &r.schedule);
      r.trace = run(prob, r.spec, x0, stop);
    } catch (const RunAborted& e) {
      r.trace = e.partial();
      r.error = e.what();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidArgument) throw;
      r.error = e.what();
    }
  });
  std::sort(out.begin(), out.end(), [](const RunResult& a, const RunResult& b) {
    return std::tie(a.seed, a.optimizer) < std::tie(b.seed, b.optimizer);
  });
  return out;
}

void write_runs_csv(std::ostream& os, const std::vector<RunResult>& runs) {
  CsvWriter csv(os);
  csv.row({"seed", "optimizer", "k", "f", "grad_inf", "grad_l2", "min_denom", "descent_flag"});
  for (const auto& r : runs)
    for (const auto& t : r.trace.records)
      csv.row({std::to_string(r.seed), r.optimizer, std::to_string(t.k), csv_field(t.f), csv_field(t.grad_inf),
               csv_field(t.grad_l2), csv_field(t.min_denom), t.descent ? "1" : "0"});
}

std::string runs_to_json(const std::vector<RunResult>& runs) {
  Json arr = Json::array();
  for (const auto& r : runs) {
    Json j;
    j["seed"] = r.seed;
    j["optimizer"] = r.optimizer;
    j["x0_hash"] = r.x0_hash;
    j["status"] = r.error.empty() ? to_string(r.trace.status) : "Error";
    j["iterations"] = r.trace.iterations;
    j["f_final"] = r.trace.f_final;
    if (r.spec.kind == OptimizerKind::GD) {
      j["alpha"] = r.spec.gd_alpha;
    } else {
      j["alpha"] = r.spec.hp.alpha;
      j["beta1"] = r.spec.hp.beta1;
      j["beta2"] = r.spec.hp.beta2;
      j["phi"] = r.spec.hp.phi;
    }
    if (r.schedule) {
      j["k_star"] = r.schedule->k_star;
      j["k_tilde"] = r.schedule->k_tilde;
    }
    if (!r.error.empty()) j["error"] = r.error;
    arr.push_back(j);
  }
  Json top;
  top["runs"] = arr;
  return dump_json(top);
}

// ---- race ----

namespace {

struct RaceJob {
  std::uint64_t seed;
  std::string name;
  OptimizerSpec spec;
  double alpha;
  std::size_t max_iter;
};

std::string alpha_label(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", a);
  return buf;
}

}  // namespace

RaceResult race(const RaceConfig& c) {
  c.generator.validate();
  require(!c.seeds.empty(), ErrorKind::InvalidArgument, "need at least one seed");
  struct Setup {
    QuadraticProblem prob;
    Vec x0;
    double target;
  };
  std::vector<Setup> setups(c.seeds.size());
  std::vector<RaceJob> jobs;
  for (std::size_t s = 0; s < c.seeds.size(); ++s) {
    Setup& st = setups[s];
    st.prob = build_problem(c.generator, c.seeds[s]);
    InitSpec init = c.init;
    init.seed = c.seeds[s];
    st.x0 = sample_init(st.prob, init, c.init_mode);
    const double f0 = value(st.prob, st.x0);
    const double eps = c.eps_rel > 0.0 ? c.eps_rel * std::sqrt(2.0 * f0) : 0.0;
    st.target = eps;

    OptimizerSpec gd;
    gd.kind = OptimizerKind::GD;
    gd.gd_alpha = c.gd_scale / st.prob.lambda_max();
    jobs.push_back({c.seeds[s], "gd", gd, gd.gd_alpha, c.gd_max_iter ? c.gd_max_iter : c.max_iter});
    if (c.include_practical) {
      for (double a : c.alpha_grid) {
        OptimizerSpec ad;
        ad.kind = OptimizerKind::AdamPractical;
        ad.hp.alpha = a * c.init.b;
        ad.hp.beta1 = c.beta1;
        ad.hp.beta2 = c.beta2;
        ad.hp.delta = DeltaSchedule::constant(c.delta);
        jobs.push_back({c.seeds[s], "adam_practical[alpha=" + alpha_label(ad.hp.alpha) + "]", ad, ad.hp.alpha,
                        c.max_iter});
      }
    }
    if (c.include_variant) {
      require(eps > 0.0, ErrorKind::InvalidArgument, "the variant schedule needs eps_rel > 0");
      OptimizerSpec ad;
      ad.kind = OptimizerKind::AdamVariant;
      ad.hp = problem_schedule(st.prob, st.x0, c.init.b, c.init.p, c.init.theta, c.init.zeta, eps, c.c_alpha).hp;
      jobs.push_back({c.seeds[s], "adam_variant", ad, ad.hp.alpha, c.max_iter});
    }
  }

  RaceResult res;
  res.rows.resize(jobs.size());
  res.traces.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const RaceJob& job = jobs[i];
    const std::size_t s = static_cast<std::size_t>(
        std::find(c.seeds.begin(), c.seeds.end(), job.seed) - c.seeds.begin());
    const Setup& st = setups[s];
    RaceRow& row = res.rows[i];
    row.seed = job.seed;
    row.optimizer = job.name;
    row.alpha = job.alpha;
    row.x0_hash = hash_vector(st.x0);
    StopRule stop;
    stop.eps = st.target;
    stop.max_iter = job.max_iter;
    stop.detect_plateau = c.detect_plateau;
    stop.trace_stride = c.trace_stride;
    try {
      RunTrace t = run(st.prob, job.spec, st.x0, stop);
      row.final_f = t.f_final;
      row.plateaued = t.status == RunStatus::Plateau;
      row.status = to_string(t.status);
      if (t.status == RunStatus::Converged) row.iterations_to_eps = static_cast<long>(t.iterations);
      res.traces[i] = std::move(t);
    } catch (const RunAborted& e) {
      row.status = "Error";
      row.error = e.what();
      row.final_f = std::numeric_limits<double>::quiet_NaN();
      res.traces[i] = e.partial();
    } catch (const Error& e) {
      row.status = "Error";
      row.error = e.what();
      row.final_f = std::numeric_limits<double>::quiet_NaN();
    }
  });
  // rows are generated in (seed, optimizer) order already; keep a stable sort as the contract
  std::vector<std::size_t> order(jobs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(res.rows[a].seed, res.rows[a].optimizer) < std::tie(res.rows[b].seed, res.rows[b].optimizer);
  });
  RaceResult sorted;
  for (auto i : order) {
    sorted.rows.push_back(std::move(res.rows[i]));
    sorted.traces.push_back(std::move(res.traces[i]));
  }
  return sorted;
}

void write_race_csv(std::ostream& os, const std::vector<RaceRow>& rows) {
  CsvWriter csv(os);
  csv.row({"optimizer", "seed", "alpha", "x0_hash", "iterations_to_eps", "final_f", "plateaued", "status", "error"});
  for (const auto& r : rows)
    csv.row({r.optimizer, std::to_string(r.seed), csv_field(r.alpha), r.x0_hash, std::to_string(r.iterations_to_eps),
             csv_field(r.final_f), r.plateaued ? "1" : "0", r.status, r.error});
}

void write_race_dat(std::ostream& os, const RaceRow& row, const RunTrace& trace) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(trace.records.size());
  for (const auto& t : trace.records) pts.emplace_back(static_cast<double>(t.k), t.f);
  write_dat(os, pts, row.optimizer + " seed " + std::to_string(row.seed) + ": iteration f");
}

// ---- sweep ----

std::vector<SweepRow> sweep_scaling(const SweepConfig& c) {
  require(!c.d_grid.empty() && !c.kappa_grid.empty() && !c.seeds.empty(), ErrorKind::InvalidArgument,
          "grids and seeds must be non-empty");
  struct Job {
    std::size_t d;
    double kappa;
    std::uint64_t seed;
    bool gd;
  };
  std::vector<Job> jobs;
  for (auto d : c.d_grid)
    for (double k : c.kappa_grid)
      for (auto s : c.seeds) {
        if (c.run_adam) jobs.push_back({d, k, s, false});
        if (c.run_gd) jobs.push_back({d, k, s, true});
      }
  std::vector<SweepRow> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    const QuadraticProblem prob = make_diagonal(job.d, log_spectrum(job.d, job.kappa), Vec(job.d, 0.0));
    InitSpec init;
    init.b = c.b;
    init.p = c.p;
    init.seed = job.seed;
    const Vec x0 = sample_init(prob, init, InitMode::UniformBox);
    SweepRow& row = rows[i];
    row.d = job.d;
    row.kappa = job.kappa;
    row.seed = job.seed;
    OptimizerSpec spec;
    if (job.gd) {
      spec.kind = OptimizerKind::GD;
      spec.gd_alpha = 1.0 / job.kappa;
      row.optimizer = "gd";
      row.predicted = job.kappa;
    } else {
      const ScheduleReport r =
          schedule_diagonal(job.d, job.kappa, c.b, c.p, c.eps, c.c_alpha, norm_inf(x0));
      spec.kind = OptimizerKind::AdamVariant;
      spec.hp = r.hp;
      row.optimizer = "adam_variant";
      row.predicted = r.kappa_adam;
    }
    StopRule stop;
    stop.eps = c.eps;
    stop.max_iter = c.max_iter;
    stop.detect_plateau = false;
    stop.trace_stride = c.max_iter + 1;
    try {
      const RunTrace t = run(prob, spec, x0, stop);
      row.status = to_string(t.status);
      row.iterations = static_cast<long>(t.iterations);
    } catch (const Error& e) {
      row.status = "Error";
    }
    row.ratio = row.iterations >= 0 ? static_cast<double>(row.iterations) / row.predicted : 0.0;
  });
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.d, a.kappa, a.seed, a.optimizer) < std::tie(b.d, b.kappa, b.seed, b.optimizer);
  });
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  CsvWriter csv(os);
  csv.row({"d", "kappa", "seed", "optimizer", "iterations", "status", "predicted", "ratio"});
  for (const auto& r : rows)
    csv.row({std::to_string(r.d), csv_field(r.kappa), std::to_string(r.seed), r.optimizer,
             std::to_string(r.iterations), r.status, csv_field(r.predicted), csv_field(r.ratio)});
}

// ---- table 1 ----

std::vector<Table1Row> table1(const std::vector<std::uint64_t>& seeds, std::size_t d, double mean) {
  std::vector<Table1Row> rows(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    const QuadraticProblem prob = make_wishart(d, mean, seeds[i]);
    const SpectralSummary s = spectral_summary(prob);
    rows[i] = {seeds[i], s.kappa, s.kappa_bar, s.kappa_bar / s.kappa};
  });
  return rows;
}

void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows) {
  CsvWriter csv(os);
  csv.row({"seed", "kappa", "kappa_bar", "ratio"});
  for (const auto& r : rows)
    csv.row({std::to_string(r.seed), csv_field(r.kappa), csv_field(r.kappa_bar), csv_field(r.ratio)});
}

// ---- fixed points ----

const char* to_string(FixedPointClass c) {
  switch (c) {
    case FixedPointClass::Trivial: return "Trivial";
    case FixedPointClass::NonTrivial: return "NonTrivial";
    case FixedPointClass::NotPlateaued: return "NotPlateaued";
  }
  return "Unknown";
}

FixedPointReport fixed_point_probe(const QuadraticProblem& prob, const AdamHyperParams& hp, const Vec& x0,
                                   std::size_t budget, std::size_t window, double rtol) {
  require(hp.delta.kind == DeltaSchedule::Kind::Constant, ErrorKind::MismatchedSchedule,
          "fixed-point probe needs a constant delta");
  hp.validate();
  require(window >= 1, ErrorKind::InvalidArgument, "window must be positive");
  const std::size_t d = prob.dim();
  FixedPointReport rep;
  rep.alpha = hp.alpha;
  rep.beta2 = hp.beta2;
  rep.delta = hp.delta.value;
  rep.kappa = prob.lambda_max() / prob.lambda_min();

  const auto [f0, g0] = value_and_grad(prob, x0);
  rep.r_max = 0.0;
  rep.r_min = std::numeric_limits<double>::infinity();
  for (double g : g0) {
    const double r = std::max(std::abs(g), hp.phi);
    rep.r_max = std::max(rep.r_max, r);
    rep.r_min = std::min(rep.r_min, r);
  }
  const double dl = rep.delta;
  if (dl == 0.0) {
    rep.delta_case = "zero";
  } else if (dl < hp.alpha / (2.0 * rep.r_max)) {
    rep.delta_case = "small";
  } else if (dl > rep.kappa * hp.alpha / (2.0 * rep.r_min)) {
    rep.delta_case = "large";
  } else {
    rep.delta_case = "intermediate";
  }
  rep.tol_zero = 1e-9 * norm_inf(g0);
  rep.g_limit.assign(d, 0.0);

  if (norm_inf(g0) == 0.0) {
    rep.classification = FixedPointClass::Trivial;
    rep.f_final = f0;
    rep.g_final = g0;
    rep.satisfied = true;
    return rep;
  }

  // ring buffer of |g| over the last `window` observed iterations
  std::vector<Vec> ring(window, Vec(d, 0.0));
  Vec sums(d, 0.0);
  std::size_t seen = 0;
  auto observer = [&](const StepView& v) {
    Vec& slot = ring[seen % window];
    for (std::size_t i = 0; i < d; ++i) {
      const double a = std::abs(v.g[i]);
      sums[i] += a - slot[i];
      slot[i] = a;
    }
    ++seen;
  };
  OptimizerSpec spec;
  spec.kind = OptimizerKind::AdamVariant;
  spec.hp = hp;
  StopRule stop;
  stop.eps = 0.0;
  stop.max_iter = budget;
  stop.plateau_window = window;
  stop.plateau_rtol = rtol;
  stop.detect_plateau = true;
  stop.trace_stride = budget + 1;
  const RunTrace t = run(prob, spec, x0, stop, observer);

  rep.iterations = t.iterations;
  rep.f_final = t.f_final;
  rep.g_final = t.g_final;
  rep.g_l1 = norm1(t.g_final);
  rep.g_linf = norm_inf(t.g_final);
  const double n = static_cast<double>(std::min(seen, window));
  // recompute the window sums directly to shed drift from the running updates
  std::fill(sums.begin(), sums.end(), 0.0);
  for (std::size_t w = 0; w < std::min(seen, window); ++w)
    for (std::size_t i = 0; i < d; ++i) sums[i] += ring[w][i];
  for (std::size_t i = 0; i < d; ++i) rep.g_limit[i] = n > 0 ? sums[i] / n : std::abs(t.g_final[i]);
  rep.limit_l1 = norm1(rep.g_limit);
  rep.limit_linf = norm_inf(rep.g_limit);

  if (rep.g_linf < rep.tol_zero) {
    rep.classification = FixedPointClass::Trivial;
  } else if (t.status == RunStatus::Plateau) {
    rep.classification = FixedPointClass::NonTrivial;
  } else {
    rep.classification = FixedPointClass::NotPlateaued;
  }

  const double slack = 1.0 - 1e-6;
  const double one_m = 1.0 - hp.beta2;
  if (rep.delta_case == "large") {
    rep.bound_applicable = true;
    rep.satisfied = rep.classification == FixedPointClass::Trivial;
  } else if (rep.classification == FixedPointClass::NonTrivial && rep.delta_case == "zero") {
    rep.bound_applicable = true;
    rep.bound_value = hp.alpha * static_cast<double>(d) * std::sqrt(one_m) / 2.0;
    rep.measured = rep.limit_l1;
    rep.satisfied = rep.measured >= rep.bound_value * slack;
  } else if (rep.classification == FixedPointClass::NonTrivial && rep.delta_case == "small") {
    rep.bound_applicable = true;
    rep.bound_value = std::sqrt(one_m * (hp.alpha * hp.alpha / 4.0 - rep.r_max * rep.r_max * dl * dl));
    rep.measured = rep.limit_linf;
    rep.satisfied = rep.measured >= rep.bound_value * slack;
  }
  return rep;
}

std::string fixed_point_to_json(const FixedPointReport& r) {
  Json j;
  j["classification"] = to_string(r.classification);
  j["iterations"] = r.iterations;
  j["f_final"] = r.f_final;
  j["g_final"] = r.g_final;
  j["g_l1"] = r.g_l1;
  j["g_linf"] = r.g_linf;
  j["g_limit_l1"] = r.limit_l1;
  j["g_limit_linf"] = r.limit_linf;
  j["tol_zero"] = r.tol_zero;
  j["alpha"] = r.alpha;
  j["beta2"] = r.beta2;
  j["delta"] = r.delta;
  j["kappa"] = r.kappa;
  j["r_max"] = r.r_max;
  j["r_min"] = r.r_min;
  Json b;
  b["delta_case"] = r.delta_case;
  b["applicable"] = r.bound_applicable;
  b["bound_value"] = r.bound_value;
  b["measured"] = r.measured;
  b["satisfied"] = r.satisfied;
  j["bound"] = b;
  return dump_json(j);
}

// ---- lower bound ----

std::vector<LowerBoundRow> lower_bound_probe(const LowerBoundConfig& c) {
  require(!c.d_grid.empty() && !c.seeds.empty(), ErrorKind::InvalidArgument, "grids and seeds must be non-empty");
  require(c.b > 0.0 && c.beta2 > 0.0 && c.beta2 < 1.0 && c.kappa >= 1.0 && c.budget_factor >= 1,
          ErrorKind::InvalidArgument, "invalid lower-bound configuration");
  std::vector<std::pair<std::size_t, std::uint64_t>> jobs;
  for (auto d : c.d_grid)
    for (auto s : c.seeds) jobs.emplace_back(d, s);
  std::vector<LowerBoundRow> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto [d, seed] = jobs[i];
    LowerBoundRow& row = rows[i];
    row.d = d;
    row.seed = seed;
    const QuadraticProblem prob = make_diagonal(d, log_spectrum(d, c.kappa), Vec(d, 0.0));
    InitSpec init;
    init.b = c.b;
    init.seed = seed;
    const Vec x0 = sample_init(prob, init, InitMode::UniformBox);
    double zmin = std::numeric_limits<double>::infinity();
    for (double z : x0) zmin = std::min(zmin, std::abs(z));
    row.alpha = zmin;
    row.spread = zmin > 0.0 ? norm_inf(x0) / zmin : std::numeric_limits<double>::infinity();
    const std::size_t budget = c.budget_factor * d;
    if (zmin == 0.0) {
      row.status = "skipped";
      return;
    }
    OptimizerSpec spec;
    spec.kind = OptimizerKind::AdamVariant;
    spec.hp.alpha = zmin;
    spec.hp.beta2 = c.beta2;
    spec.hp.delta = DeltaSchedule::constant(0.0);
    StopRule stop;
    stop.eps = zmin;  // f <= zmin^2 / 2
    stop.max_iter = budget;
    stop.detect_plateau = false;
    stop.trace_stride = budget + 1;
    try {
      const RunTrace t = run(prob, spec, x0, stop);
      row.iterations = static_cast<long>(t.iterations);
      row.status = t.status == RunStatus::Converged ? "reached" : "budget";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroDenominator) throw;
      row.status = "skipped";
      return;
    }
    row.at_least_quarter_d = 4 * row.iterations >= static_cast<long>(d);
  });
  std::sort(rows.begin(), rows.end(),
            [](const LowerBoundRow& a, const LowerBoundRow& b) { return std::tie(a.d, a.seed) < std::tie(b.d, b.seed); });
  return rows;
}

std::vector<LowerBoundSummary> summarize_lower_bound(const std::vector<LowerBoundRow>& rows) {
  std::vector<LowerBoundSummary> out;
  for (const auto& r : rows) {
    if (out.empty() || out.back().d != r.d) out.push_back({r.d});
    LowerBoundSummary& s = out.back();
    ++s.seeds;
    if (r.status == "skipped") {
      ++s.skipped;
    } else if (r.at_least_quarter_d) {
      ++s.at_least_quarter_d;
    }
  }
  for (auto& s : out) {
    const std::size_t used = s.seeds - s.skipped;
    s.fraction = used ? static_cast<double>(s.at_least_quarter_d) / static_cast<double>(used) : 0.0;
  }
  return out;
}

void write_lower_bound_csv(std::ostream& os, const std::vector<LowerBoundRow>& rows) {
  CsvWriter csv(os);
  csv.row({"d", "seed", "alpha", "spread", "iterations", "status", "at_least_quarter_d"});
  for (const auto& r : rows)
    csv.row({std::to_string(r.d), std::to_string(r.seed), csv_field(r.alpha), csv_field(r.spread),
             std::to_string(r.iterations), r.status, r.at_least_quarter_d ? "1" : "0"});
}

// ---- audit ----

AuditReport bound_audit(const AuditConfig& c) {
  c.generator.validate();
  require(!c.seeds.empty(), ErrorKind::InvalidArgument, "need at least one seed");
  struct Outcome {
    AuditRun run;
    std::vector<AuditFailure> failures;
  };
  std::vector<Outcome> outcomes(c.seeds.size());
  parallel_for(c.seeds.size(), [&](std::size_t i) {
    Outcome& out = outcomes[i];
    const std::uint64_t seed = c.seeds[i];
    auto fail = [&](const std::string& what, long k, const std::string& detail) {
      out.failures.push_back({seed, what, k, detail});
    };
    const QuadraticProblem prob = build_problem(c.generator, seed);
    const SpectralSummary s = spectral_summary(prob);
    InitSpec init;
    init.b = c.b;
    init.p = c.p;
    init.seed = seed;
    const Vec x0 = sample_init(prob, init, default_init_mode(prob));
    const ScheduleReport sched = problem_schedule(prob, x0, c.b, c.p, 1.0, 1.0, c.eps, c.c_alpha);
    out.run.seed = seed;
    out.run.schedule = sched;
    out.run.k_star = sched.k_star;
    out.run.target = 0.5 * c.eps * c.eps;

    const Vec qdiag = prob.q.diag();
    const Vec ghat0 = ghat_of(prob, x0);
    const long k_tilde = descent_horizon(s, qdiag, sched.hp, ghat0, prob.diagonal);
    out.run.k_tilde = k_tilde;
    if (sched.k_star > k_tilde)
      fail("k_star_le_k_tilde", sched.k_star,
           "K* = " + std::to_string(sched.k_star) + " exceeds K~ = " + std::to_string(k_tilde));

    OptimizerSpec spec;
    spec.kind = OptimizerKind::AdamVariant;
    spec.hp = sched.hp;
    StopRule stop;
    stop.eps = 0.0;
    stop.max_iter = static_cast<std::size_t>(sched.k_star);
    stop.detect_plateau = false;
    RunTrace trace;
    try {
      trace = run(prob, spec, x0, stop);
    } catch (const Error& e) {
      fail("run", -1, e.what());
      return;
    }
    out.run.f_k_star = trace.f_final;
    if (!(trace.f_final <= out.run.target))
      fail("final_error", sched.k_star, "f = " + format_double(trace.f_final) + " above eps^2/2");

    const double floor = s.mu2 * sched.hp.alpha;
    const double need = floor * floor * (1.0 - 1e-12);
    for (const auto& r : trace.records) {
      if (static_cast<long>(r.k) > k_tilde) break;
      if (!(r.min_denom >= need)) {
        fail("continuous_descent", static_cast<long>(r.k), "min denominator " + format_double(r.min_denom));
        break;
      }
      if (!r.descent) {
        fail("monotone_descent", static_cast<long>(r.k), "f increased");
        break;
      }
    }
    const DecayPredicates pred = decay_bound_predicates(trace, sched, s, qdiag, ghat0, prob.diagonal);
    for (std::size_t k = 0; k < pred.loose.size(); ++k) {
      if (!pred.loose[k]) {
        fail("loose_decay", static_cast<long>(k), "gamma^k bound violated");
        break;
      }
    }
    for (std::size_t k = 0; k < pred.tight.size(); ++k) {
      if (!pred.tight[k]) {
        fail("tight_decay", static_cast<long>(k), "exp(-2(beta2^{-k/2} - 1)) bound violated");
        break;
      }
    }
    out.run.failures = out.failures.size();
  });
  AuditReport rep;
  for (auto& o : outcomes) {
    rep.runs.push_back(o.run);
    for (auto& f : o.failures) rep.failures.push_back(f);
  }
  return rep;
}

std::string audit_to_json(const AuditReport& r) {
  Json j;
  j["passed"] = r.passed();
  j["n_runs"] = r.runs.size();
  Json runs = Json::array();
  for (const auto& a : r.runs) {
    Json x;
    x["seed"] = a.seed;
    x["alpha"] = a.schedule.hp.alpha;
    x["beta2"] = a.schedule.hp.beta2;
    x["phi"] = a.schedule.hp.phi;
    x["k_star"] = a.k_star;
    x["k_tilde"] = a.k_tilde;
    x["f_k_star"] = a.f_k_star;
    x["target"] = a.target;
    x["failures"] = a.failures;
    runs.push_back(x);
  }
  j["runs"] = runs;
  Json fails = Json::array();
  for (const auto& f : r.failures) {
    Json x;
    x["seed"] = f.seed;
    x["predicate"] = f.predicate;
    x["k"] = f.k;
    x["detail"] = f.detail;
    fails.push_back(x);
  }
  j["failures"] = fails;
  return dump_json(j);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  auto parse_one = [&](const std::string& s) -> std::uint64_t {
    require(!s.empty() && s.find_first_not_of("0123456789") == std::string::npos, ErrorKind::InvalidArgument,
            "bad seed '" + s + "'");
    return std::stoull(s);
  };
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_one(part));
      continue;
    }
    const std::uint64_t a = parse_one(part.substr(0, dots));
    const std::uint64_t b = parse_one(part.substr(dots + 2));
    require(a <= b, ErrorKind::InvalidArgument, "seed range '" + part + "' is empty");
    for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
  }
  require(!out.empty(), ErrorKind::InvalidArgument, "no seeds given");
  return out;
}

}  // namespace adamprecond
