#include "tailcs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tailcs/phpp.hpp"
#include "tailcs/reference_solvers.hpp"
#include "tailcs/rng.hpp"

namespace tailcs {

namespace {

using nlohmann::json;

std::string fmt_double(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned workers = std::min<std::size_t>(jobs, count);
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(count);  // drain remaining work
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::sweep_k: return "sweep_k";
    case ExperimentKind::sweep_m: return "sweep_m";
    case ExperimentKind::noisy_sweep: return "noisy_sweep";
    case ExperimentKind::timing: return "timing";
    case ExperimentKind::rip_curve: return "rip_curve";
    default: return "convergence_trace";
  }
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "sweep_k") return ExperimentKind::sweep_k;
  if (s == "sweep_m") return ExperimentKind::sweep_m;
  if (s == "noisy_sweep") return ExperimentKind::noisy_sweep;
  if (s == "timing") return ExperimentKind::timing;
  if (s == "rip_curve") return ExperimentKind::rip_curve;
  if (s == "convergence_trace") return ExperimentKind::convergence_trace;
  throw std::invalid_argument("unknown experiment kind: " + s);
}

void ExperimentConfig::validate() const {
  const bool timing = kind == ExperimentKind::timing;
  if (timing) {
    if (n_grid.empty()) throw std::invalid_argument("config: timing requires n_grid");
  } else {
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (m_grid.empty()) throw std::invalid_argument("config: m grid must be non-empty");
    if (k_grid.empty() && kind != ExperimentKind::rip_curve)
      throw std::invalid_argument("config: k grid must be non-empty");
  }
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (!(success_threshold > 0.0))
    throw std::invalid_argument("config: success threshold must be > 0");
  if (kind != ExperimentKind::rip_curve && kind != ExperimentKind::convergence_trace &&
      solvers.empty())
    throw std::invalid_argument("config: solver list must be non-empty");
  for (const auto& s : solvers) {
    static const char* known[] = {"phpp", "hpp",  "tail_hpp", "omp",       "cosamp",
                                  "sp",   "htp", "tail_l1",  "tail_lasso"};
    bool ok = false;
    for (const char* name : known) ok = ok || s.name == name;
    if (!ok) throw std::invalid_argument("config: unknown solver " + s.name);
  }
}

namespace {

NoiseModel noise_from_json(const json& j) {
  NoiseModel nm;
  const std::string kind = j.value("kind", "none");
  if (kind == "none")
    nm.kind = NoiseModel::Kind::none;
  else if (kind == "gaussian")
    nm.kind = NoiseModel::Kind::gaussian;
  else if (kind == "student_t")
    nm.kind = NoiseModel::Kind::student_t;
  else
    throw std::invalid_argument("config: unknown noise kind " + kind);
  nm.sigma = j.value("sigma", 0.0);
  nm.dof = j.value("dof", 5.0);
  return nm;
}

std::vector<Index> grid_from_json(const json& j, const char* scalar_key,
                                  const char* grid_key) {
  std::vector<Index> grid;
  if (j.contains(grid_key)) {
    for (const auto& v : j.at(grid_key)) grid.push_back(v.get<Index>());
  } else if (j.contains(scalar_key)) {
    grid.push_back(j.at(scalar_key).get<Index>());
  }
  return grid;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig cfg;
  cfg.kind = experiment_kind_from_string(j.value("kind", "sweep_k"));
  const std::string ens = j.value("ensemble", "gaussian");
  if (ens == "gaussian")
    cfg.ensemble = Ensemble::gaussian;
  else if (ens == "partial_dct")
    cfg.ensemble = Ensemble::partial_dct;
  else
    throw std::invalid_argument("config: unknown ensemble " + ens);

  cfg.n = j.value("n", Index{0});
  cfg.m_grid = grid_from_json(j, "m", "m_grid");
  cfg.k_grid = grid_from_json(j, "k", "k_grid");
  cfg.n_grid = grid_from_json(j, "n_scalar_unused", "n_grid");
  cfg.trials = j.value("trials", Index{1});
  if (j.contains("noise")) cfg.noise = noise_from_json(j.at("noise"));
  cfg.success_threshold = j.value("success_threshold", 1e-4);
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.measure_time = j.value("measure_time", false);
  cfg.dump_solutions = j.value("dump_solutions", false);
  cfg.rip_exact_budget = j.value("rip_exact_budget", 1e6);
  cfg.rip_mc_trials = j.value("rip_mc_trials", std::uint64_t{20000});
  cfg.trace_step_tol = j.value("trace_step_tol", 1e-13);
  cfg.trace_max_iters = j.value("trace_max_iters", Index{20000});

  if (j.contains("solvers")) {
    for (const auto& js : j.at("solvers")) {
      SolverSpec spec;
      spec.name = js.at("name").get<std::string>();
      if (js.contains("params")) {
        const json& p = js.at("params");
        spec.params.lambda = p.value("lambda", -1.0);
        spec.params.alpha = p.value("alpha", -1.0);
        spec.params.tau = p.value("tau", -1.0);
        spec.params.k0 = p.value("k0", Index{1});
        spec.params.kp = p.value("kp", Index{1});
        spec.params.max_iters = p.value("max_iters", Index{-1});
        spec.params.k = p.value("k", Index{-1});
        spec.params.kt = p.value("kt", Index{-1});
        spec.params.epsilon = p.value("epsilon", 0.0);
        spec.params.tol = p.value("tol", 1e-8);
        spec.params.t_mode = p.value("t_mode", "true");
      }
      cfg.solvers.push_back(std::move(spec));
    }
  }
  if (cfg.kind == ExperimentKind::timing) cfg.measure_time = true;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::uint64_t trial_seed(std::uint64_t master, Index grid_id, Index trial) {
  return derive_seed(master, {0xB1, static_cast<std::uint64_t>(grid_id),
                              static_cast<std::uint64_t>(trial)});
}

namespace {

std::vector<GridPoint> build_grid(const ExperimentConfig& cfg) {
  std::vector<GridPoint> grid;
  if (cfg.kind == ExperimentKind::timing) {
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
      GridPoint g;
      g.id = static_cast<Index>(grid.size());
      g.n = cfg.n_grid[i];
      g.m = i < cfg.m_grid.size() ? cfg.m_grid[i] : std::max<Index>(1, g.n / 4);
      g.k = i < cfg.k_grid.size() ? cfg.k_grid[i] : std::max<Index>(1, g.n / 100);
      grid.push_back(g);
    }
    return grid;
  }
  for (Index m : cfg.m_grid) {
    for (Index k : cfg.k_grid) {
      GridPoint g;
      g.id = static_cast<Index>(grid.size());
      g.n = cfg.n;
      g.m = m;
      g.k = k;
      grid.push_back(g);
    }
  }
  return grid;
}

struct ResolvedParams {
  double lambda = 0.0;
  double alpha = 0.0;
  double tau = 0.0;
  Index max_iters = 500;
};

ResolvedParams resolve_params(const SolverParams& p, const ExperimentConfig& cfg,
                              const GridPoint& g) {
  ResolvedParams r;
  const bool noisy = cfg.noise.kind != NoiseModel::Kind::none && cfg.noise.sigma > 0.0;
  r.lambda = p.lambda > 0.0 ? p.lambda
             : noisy ? cfg.noise.sigma * std::sqrt(std::log(static_cast<double>(g.n)) /
                                                   static_cast<double>(g.m))
                     : 0.1 / static_cast<double>(g.m);
  r.alpha = p.alpha > 0.0 ? p.alpha : 10.0 / r.lambda;
  r.tau = p.tau > 0.0 ? p.tau : 1e-5;
  r.max_iters = p.max_iters > 0 ? p.max_iters : 500;
  return r;
}

struct SolveOutput {
  Vector z;
  Index iters = 0;
};

SolveOutput dispatch_solver(const SolverSpec& spec, const ProblemInstance& inst,
                            const ExperimentConfig& cfg, const GridPoint& g) {
  const Matrix& A = inst.A;
  const Vector& y = inst.y;
  const ResolvedParams rp = resolve_params(spec.params, cfg, g);

  PhppConfig pc;
  pc.lambda = rp.lambda;
  pc.alpha = rp.alpha;
  pc.tau = rp.tau;
  pc.k0 = spec.params.k0;
  pc.kp = spec.params.kp;
  pc.max_iters = rp.max_iters;

  const Index greedy_k = spec.params.k > 0 ? spec.params.k : g.k;
  BaselineConfig bc;
  bc.k = std::min<Index>(greedy_k, g.m);
  bc.max_iters = rp.max_iters;

  SolveOutput out;
  if (spec.name == "phpp") {
    const FactorPair w0 = default_init(A, y, derive_seed(inst.seed, {stream::init}));
    auto [z, trace] = solve_phpp_improved(A, y, pc, w0);
    out.z = std::move(z);
    out.iters = trace.iterations();
  } else if (spec.name == "hpp" || spec.name == "tail_hpp") {
    SupportSet T;
    if (spec.name == "tail_hpp") {
      const Index kt = std::min<Index>(spec.params.kt > 0 ? spec.params.kt : g.k, g.n);
      T = hard_threshold_support(A.transpose() * y, kt);
    }
    const TailProblem p(A, y, pc.lambda, T);
    const FactorPair w0 = default_init(A, y, derive_seed(inst.seed, {stream::init}));
    auto [w, trace] = solve_phpp(p, pc, w0);
    out.z = w.product();
    out.iters = trace.iterations();
  } else if (spec.name == "omp") {
    out.z = omp(A, y, bc);
    out.iters = bc.k;
  } else if (spec.name == "cosamp") {
    out.z = cosamp(A, y, bc);
    out.iters = bc.max_iters;
  } else if (spec.name == "sp") {
    out.z = sp(A, y, bc);
    out.iters = bc.max_iters;
  } else if (spec.name == "htp") {
    out.z = htp(A, y, bc);
    out.iters = bc.max_iters;
  } else if (spec.name == "tail_l1" || spec.name == "tail_lasso") {
    SupportSet T;
    if (spec.params.t_mode == "true")
      T = inst.truth.support;
    else if (spec.params.t_mode != "empty")
      throw std::invalid_argument("solver t_mode must be 'true' or 'empty'");
    if (spec.name == "tail_l1") {
      out.z = tail_l1_constrained(A, y, T, spec.params.epsilon, spec.params.tol);
    } else {
      const TailProblem p(A, y, rp.lambda, T);
      out.z = tail_lasso_oracle(p, spec.params.tol);
    }
    out.iters = 0;
  } else {
    throw std::invalid_argument("unknown solver: " + spec.name);
  }
  return out;
}

void dump_solution(const std::string& out_dir, const TrialRecord& rec, const Vector& z) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "solutions");
  std::ostringstream name;
  name << "g" << rec.grid_id << "_t" << rec.trial << "_" << rec.solver << ".txt";
  std::ofstream out(fs::path(out_dir) / "solutions" / name.str());
  for (Index j = 0; j < z.size(); ++j) out << fmt_double(z[j]) << "\n";
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, unsigned jobs, const std::string& out_dir) {
  cfg.validate();
  SweepResult result;
  result.grid = build_grid(cfg);
  const std::size_t n_solvers = cfg.solvers.size();
  const std::size_t n_tasks = result.grid.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<std::optional<TrialRecord>> slots(n_tasks * n_solvers);

  const auto run_task = [&](std::size_t task) {
    const std::size_t gi = task / static_cast<std::size_t>(cfg.trials);
    const Index trial = static_cast<Index>(task % static_cast<std::size_t>(cfg.trials));
    const GridPoint& g = result.grid[gi];
    const std::uint64_t seed = trial_seed(cfg.seed, g.id, trial);
    const ProblemInstance inst =
        make_instance(cfg.ensemble, g.m, g.n, g.k, cfg.noise, seed);
    const Vector x_true = inst.truth.dense();

    for (std::size_t si = 0; si < n_solvers; ++si) {
      const SolverSpec& spec = cfg.solvers[si];
      TrialRecord rec;
      rec.grid_id = g.id;
      rec.n = g.n;
      rec.m = g.m;
      rec.k = g.k;
      rec.trial = trial;
      rec.solver = spec.name;
      rec.seed = seed;

      const auto t0 = std::chrono::steady_clock::now();
      const SolveOutput out = dispatch_solver(spec, inst, cfg, g);
      const auto t1 = std::chrono::steady_clock::now();
      rec.wall_time_s =
          cfg.measure_time ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
      rec.error = (out.z - x_true).norm();
      rec.success = rec.error <= cfg.success_threshold;
      rec.iters = out.iters;
      if (cfg.dump_solutions && !out_dir.empty()) dump_solution(out_dir, rec, out.z);
      slots[task * n_solvers + si] = std::move(rec);
    }
  };

  try {
    parallel_for(n_tasks, jobs, run_task);
  } catch (...) {
    // Flush whatever finished before rethrowing so partial runs are kept.
    for (auto& s : slots)
      if (s.has_value()) result.records.push_back(std::move(*s));
    if (!out_dir.empty())
      write_text_file(out_dir + "/records.partial.csv", records_csv(result));
    throw;
  }

  result.records.reserve(slots.size());
  for (auto& s : slots) result.records.push_back(std::move(*s));
  std::sort(result.records.begin(), result.records.end(),
            [](const TrialRecord& a, const TrialRecord& b) {
              if (a.grid_id != b.grid_id) return a.grid_id < b.grid_id;
              if (a.trial != b.trial) return a.trial < b.trial;
              return a.solver < b.solver;
            });
  return result;
}

Summary summarize(const std::vector<TrialRecord>& records, Index grid_id,
                  const std::string& solver) {
  Summary s;
  Index count = 0;
  for (const TrialRecord& r : records) {
    if (r.grid_id != grid_id || r.solver != solver) continue;
    ++count;
    s.success_rate += r.success ? 1.0 : 0.0;
    s.mean_error += r.error;
    s.mean_time_s += r.wall_time_s;
  }
  if (count > 0) {
    s.success_rate /= static_cast<double>(count);
    s.mean_error /= static_cast<double>(count);
    s.mean_time_s /= static_cast<double>(count);
  }
  return s;
}

std::string records_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "grid_id,n,m,k,trial,solver,seed,error,success,wall_time_s,iters\n";
  for (const TrialRecord& r : result.records) {
    out << r.grid_id << ',' << r.n << ',' << r.m << ',' << r.k << ',' << r.trial << ','
        << r.solver << ',' << r.seed << ',' << fmt_double(r.error) << ','
        << (r.success ? 1 : 0) << ',' << fmt_double(r.wall_time_s, "%.6f") << ','
        << r.iters << '\n';
  }
  return out.str();
}

std::string summary_json(const SweepResult& result) {
  json grid = json::array();
  for (const GridPoint& g : result.grid)
    grid.push_back({{"id", g.id}, {"n", g.n}, {"m", g.m}, {"k", g.k}});

  json results = json::object();
  for (const GridPoint& g : result.grid) {
    json per_solver = json::object();
    std::vector<std::string> names;
    for (const TrialRecord& r : result.records)
      if (r.grid_id == g.id &&
          std::find(names.begin(), names.end(), r.solver) == names.end())
        names.push_back(r.solver);
    std::sort(names.begin(), names.end());
    for (const std::string& name : names) {
      const Summary s = summarize(result.records, g.id, name);
      per_solver[name] = {{"success_rate", s.success_rate},
                          {"mean_error", s.mean_error},
                          {"mean_time_s", s.mean_time_s}};
    }
    results[std::to_string(g.id)] = std::move(per_solver);
  }
  const json j = {{"grid", grid}, {"results", results}};
  return j.dump(2) + "\n";
}

std::vector<TimingRow> timing_table(const SweepResult& result) {
  std::vector<TimingRow> table;
  for (const GridPoint& g : result.grid) {
    std::vector<std::string> names;
    for (const TrialRecord& r : result.records)
      if (r.grid_id == g.id &&
          std::find(names.begin(), names.end(), r.solver) == names.end())
        names.push_back(r.solver);
    std::sort(names.begin(), names.end());
    for (const std::string& name : names) {
      const Summary s = summarize(result.records, g.id, name);
      table.push_back({g.n, name, s.mean_time_s, s.mean_error});
    }
  }
  return table;
}

std::vector<RipCurvePoint> run_rip_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.k_grid.empty())
    throw std::invalid_argument("rip_curve: k grid must be non-empty");
  const Index m = cfg.m_grid.front();
  const Matrix A = cfg.ensemble == Ensemble::gaussian
                       ? gen_gaussian_matrix(m, cfg.n, cfg.seed)
                       : gen_partial_dct(m, cfg.n, cfg.seed);
  std::vector<RipCurvePoint> curve;
  for (Index k : cfg.k_grid) {
    RipCurvePoint pt;
    pt.k = k;
    if (binomial_capped(cfg.n, k, cfg.rip_exact_budget) <= cfg.rip_exact_budget)
      pt.estimate = rip_exact(A, k);
    else
      pt.estimate = rip_monte_carlo(A, k, cfg.rip_mc_trials,
                                    derive_seed(cfg.seed, {stream::rip_mc, static_cast<std::uint64_t>(k)}));
    curve.push_back(pt);
  }
  return curve;
}

std::string rip_curve_csv(const std::vector<RipCurvePoint>& curve) {
  std::ostringstream out;
  out << "k,delta_lower,delta_upper,method,samples\n";
  for (const RipCurvePoint& p : curve) {
    out << p.k << ',' << fmt_double(p.estimate.lower) << ','
        << fmt_double(p.estimate.upper) << ','
        << (p.estimate.method == RipEstimate::Method::exact ? "exact" : "monte_carlo")
        << ',' << p.estimate.samples << '\n';
  }
  return out.str();
}

ConvergenceReport run_convergence_trace(const ExperimentConfig& cfg) {
  cfg.validate();
  const GridPoint g = build_grid(cfg).front();
  const std::uint64_t seed = trial_seed(cfg.seed, g.id, 0);
  const ProblemInstance inst = make_instance(cfg.ensemble, g.m, g.n, g.k, cfg.noise, seed);

  const SolverParams params =
      cfg.solvers.empty() ? SolverParams{} : cfg.solvers.front().params;
  const ResolvedParams rp = resolve_params(params, cfg, g);
  PhppConfig pc;
  pc.lambda = rp.lambda;
  pc.alpha = rp.alpha;
  pc.max_iters = cfg.trace_max_iters;
  pc.step_tol = cfg.trace_step_tol;
  pc.kkt_tol = 0.0;  // run the deep trace down to the step tolerance
  pc.record_iterates = true;

  // Well-posed deep run: the estimated support is the true one.
  const TailProblem p(inst.A, inst.y, pc.lambda, inst.truth.support);
  const FactorPair w0 = default_init(inst.A, inst.y, derive_seed(seed, {stream::init}));
  auto [w_final, trace] = solve_phpp(p, pc, w0);

  ConvergenceReport report;
  report.final_error = (w_final.product() - inst.truth.dense()).norm();
  for (const FactorPair& w : trace.iterates)
    report.distance_to_final.push_back((w - w_final).norm());
  try {
    report.rate = rate_estimate(trace, w_final);
  } catch (const std::invalid_argument&) {
    report.rate = std::nullopt;  // trace too short for a rate
  }
  report.trace = std::move(trace);
  return report;
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "iter,g,f,step,kkt,r_k\n";
  for (std::size_t i = 0; i < report.trace.entries.size(); ++i) {
    const TraceEntry& e = report.trace.entries[i];
    const double r = i < report.distance_to_final.size() ? report.distance_to_final[i] : 0.0;
    out << e.iter << ',' << fmt_double(e.g_value) << ',' << fmt_double(e.f_value) << ','
        << fmt_double(e.step_norm) << ',' << fmt_double(e.kkt_overall) << ','
        << fmt_double(r) << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace tailcs
