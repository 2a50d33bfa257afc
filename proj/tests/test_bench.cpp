#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tailcs/bench.hpp"
#include "tailcs/problem_gen.hpp"

using namespace tailcs;

namespace {

ExperimentConfig small_sweep_config() {
  return config_from_json_text(R"({
    "kind": "sweep_k",
    "ensemble": "gaussian",
    "n": 32, "m": 16, "k_grid": [2, 3],
    "trials": 4,
    "noise": {"kind": "none"},
    "solvers": [
      {"name": "phpp", "params": {"max_iters": 300}},
      {"name": "omp"},
      {"name": "sp"}
    ],
    "success_threshold": 1e-4,
    "seed": 20240917
  })");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const ExperimentConfig cfg = small_sweep_config();
  CHECK(cfg.kind == ExperimentKind::sweep_k);
  CHECK(cfg.n == 32);
  CHECK(cfg.m_grid == std::vector<Index>{16});
  CHECK(cfg.k_grid == std::vector<Index>{2, 3});
  CHECK(cfg.solvers.size() == 3);
  CHECK(cfg.solvers[0].params.max_iters == 300);

  CHECK_THROWS_AS(config_from_json_text(R"({"kind": "sweep_k"})"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json_text(R"({
    "kind": "sweep_k", "n": 8, "m": 4, "k": 1, "trials": 0,
    "solvers": [{"name": "omp"}]
  })"),
                  std::invalid_argument);
  CHECK_THROWS_AS(config_from_json_text(R"({
    "kind": "sweep_k", "n": 8, "m": 4, "k": 1, "trials": 1,
    "solvers": [{"name": "bogus"}]
  })"),
                  std::invalid_argument);
}

TEST_CASE("sweep output is byte-identical across worker counts") {
  const ExperimentConfig cfg = small_sweep_config();
  const SweepResult serial = run_sweep(cfg, 1);
  const SweepResult parallel = run_sweep(cfg, 3);
  CHECK(records_csv(serial) == records_csv(parallel));
  CHECK(summary_json(serial) == summary_json(parallel));

  SUBCASE("rerun with the same seed is identical, a new seed is not") {
    const SweepResult again = run_sweep(cfg, 2);
    CHECK(records_csv(again) == records_csv(serial));
    ExperimentConfig other = cfg;
    other.seed += 1;
    CHECK(records_csv(run_sweep(other, 1)) != records_csv(serial));
  }
}

TEST_CASE("records carry the documented header and sorted order") {
  const SweepResult result = run_sweep(small_sweep_config(), 2);
  const std::string csv = records_csv(result);
  CHECK(csv.rfind("grid_id,n,m,k,trial,solver,seed,error,success,wall_time_s,iters\n", 0) == 0);
  REQUIRE(result.records.size() == 2 * 4 * 3);  // grid x trials x solvers
  for (std::size_t i = 1; i < result.records.size(); ++i) {
    const TrialRecord& a = result.records[i - 1];
    const TrialRecord& b = result.records[i];
    const bool sorted = a.grid_id < b.grid_id ||
                        (a.grid_id == b.grid_id &&
                         (a.trial < b.trial || (a.trial == b.trial && a.solver <= b.solver)));
    CHECK(sorted);
  }
  for (const TrialRecord& r : result.records)
    CHECK(r.success == (r.error <= 1e-4));
}

TEST_CASE("overdetermined single-trial sweep succeeds for every solver") {
  const ExperimentConfig cfg = config_from_json_text(R"({
    "kind": "sweep_k",
    "ensemble": "gaussian",
    "n": 12, "m": 12, "k": 1,
    "trials": 1,
    "solvers": [{"name": "phpp"}, {"name": "omp"}, {"name": "cosamp"},
                {"name": "sp"}, {"name": "htp"}, {"name": "hpp", "params": {"lambda": 1e-7}}],
    "success_threshold": 1e-4,
    "seed": 7
  })");
  const SweepResult result = run_sweep(cfg, 1);
  for (const TrialRecord& r : result.records) {
    CAPTURE(r.solver);
    CHECK(r.success);
  }
}

TEST_CASE("aggregates equal the mean of the per-trial records") {
  const SweepResult result = run_sweep(small_sweep_config(), 2);
  for (const GridPoint& g : result.grid) {
    for (const char* solver : {"phpp", "omp", "sp"}) {
      double sum_err = 0.0, sum_succ = 0.0;
      int count = 0;
      for (const TrialRecord& r : result.records) {
        if (r.grid_id != g.id || r.solver != solver) continue;
        sum_err += r.error;
        sum_succ += r.success ? 1.0 : 0.0;
        ++count;
      }
      REQUIRE(count == 4);
      const Summary s = summarize(result.records, g.id, solver);
      CHECK(std::abs(s.mean_error - sum_err / count) <= 1e-12);
      CHECK(std::abs(s.success_rate - sum_succ / count) <= 1e-12);
    }
  }
}

TEST_CASE("dumped solutions reproduce the recorded error and flag") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tailcs_dump_test";
  fs::remove_all(dir);
  ExperimentConfig cfg = small_sweep_config();
  cfg.dump_solutions = true;
  const SweepResult result = run_sweep(cfg, 1, dir.string());

  for (const TrialRecord& r : result.records) {
    std::ostringstream name;
    name << "g" << r.grid_id << "_t" << r.trial << "_" << r.solver << ".txt";
    std::ifstream in(dir / "solutions" / name.str());
    REQUIRE(in);
    Vector z(r.n);
    for (Index j = 0; j < r.n; ++j) in >> z[j];
    const ProblemInstance inst =
        make_instance(Ensemble::gaussian, r.m, r.n, r.k, NoiseModel::noiseless(), r.seed);
    const double err = (z - inst.truth.dense()).norm();
    CHECK(std::abs(err - r.error) <= 1e-12 * (1.0 + r.error));
    CHECK((err <= 1e-4) == r.success);
  }
  fs::remove_all(dir);
}

TEST_CASE("partial dct ensemble runs through the bench") {
  const ExperimentConfig cfg = config_from_json_text(R"({
    "kind": "sweep_k", "ensemble": "partial_dct",
    "n": 32, "m": 16, "k": 2, "trials": 3,
    "solvers": [{"name": "phpp"}],
    "success_threshold": 1e-4, "seed": 5
  })");
  const SweepResult result = run_sweep(cfg, 1);
  CHECK(result.records.size() == 3);
  const Summary s = summarize(result.records, 0, "phpp");
  CHECK(s.success_rate > 0.5);
}

TEST_CASE("timing table") {
  const ExperimentConfig cfg = config_from_json_text(R"({
    "kind": "timing",
    "n_grid": [64],
    "trials": 1,
    "solvers": [{"name": "omp"}],
    "success_threshold": 1e-4,
    "seed": 3
  })");
  CHECK(cfg.measure_time);
  const SweepResult result = run_sweep(cfg, 1);
  const auto table = timing_table(result);
  REQUIRE(table.size() == 1);  // one solver, one n
  CHECK(table[0].n == 64);
  CHECK(table[0].solver == "omp");
  CHECK(table[0].mean_time_s > 0.0);
  CHECK(std::isfinite(table[0].mean_time_s));

  SUBCASE("grid defaults follow m = n/4 and k = n/100 with a floor of 1") {
    REQUIRE(result.grid.size() == 1);
    CHECK(result.grid[0].m == 16);
    CHECK(result.grid[0].k == 1);
  }
}

TEST_CASE("rip curve mixes exact and monte carlo methods") {
  const ExperimentConfig cfg = config_from_json_text(R"({
    "kind": "rip_curve", "ensemble": "gaussian",
    "n": 24, "m": 12, "k_grid": [1, 2, 3, 9],
    "rip_exact_budget": 3000, "rip_mc_trials": 400,
    "success_threshold": 1e-4, "seed": 11
  })");
  const auto curve = run_rip_curve(cfg);
  REQUIRE(curve.size() == 4);
  // C(24,1)=24, C(24,2)=276, C(24,3)=2024 fit the budget; C(24,9) does not.
  CHECK(curve[0].estimate.method == RipEstimate::Method::exact);
  CHECK(curve[2].estimate.method == RipEstimate::Method::exact);
  CHECK(curve[3].estimate.method == RipEstimate::Method::monte_carlo);
  CHECK(curve[0].estimate.lower <= curve[1].estimate.lower);
  CHECK(curve[1].estimate.lower <= curve[2].estimate.lower);
  const std::string csv = rip_curve_csv(curve);
  CHECK(csv.rfind("k,delta_lower,delta_upper,method,samples\n", 0) == 0);

  SUBCASE("exact and MC agree within sampling slack at small k") {
    const Matrix A = gen_gaussian_matrix(12, 24, 11);
    const RipEstimate exact = rip_exact(A, 2);
    const RipEstimate mc = rip_monte_carlo(A, 2, 2000, 99);
    CHECK(mc.lower <= exact.lower);
    CHECK(mc.lower >= 0.5 * exact.lower);  // 2000 of 276 subsets: generous slack
  }
}

TEST_CASE("convergence trace emits a monotone descent column and a rate") {
  const ExperimentConfig cfg = config_from_json_text(R"({
    "kind": "convergence_trace", "ensemble": "gaussian",
    "n": 32, "m": 16, "k": 3, "trials": 1,
    "solvers": [{"name": "phpp"}],
    "success_threshold": 1e-4, "seed": 21
  })");
  const ConvergenceReport report = run_convergence_trace(cfg);
  REQUIRE(report.trace.entries.size() > 10);
  for (std::size_t i = 1; i < report.trace.entries.size(); ++i)
    CHECK(report.trace.entries[i].g_value <= report.trace.entries[i - 1].g_value + 1e-12);
  REQUIRE(report.rate.has_value());
  CHECK(report.rate->tau_rate < 1.0);
  const std::string csv = convergence_csv(report);
  CHECK(csv.rfind("iter,g,f,step,kkt,r_k\n", 0) == 0);
}
