#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tailcs/analysis.hpp"
#include "tailcs/problem_gen.hpp"
#include "tailcs/types.hpp"

namespace tailcs {

enum class ExperimentKind { sweep_k, sweep_m, noisy_sweep, timing, rip_curve, convergence_trace };

const char* to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

// Per-solver overrides; negative values mean "derive from the grid point"
// (lambda = 0.1/m noiseless or sigma*sqrt(log n/m) noisy, alpha = 10/lambda,
// tau = 1e-5, greedy k = true sparsity).
struct SolverParams {
  double lambda = -1.0;
  double alpha = -1.0;
  double tau = -1.0;
  Index k0 = 1;
  Index kp = 1;
  Index max_iters = -1;
  Index k = -1;              // greedy target sparsity
  Index kt = -1;             // tail_hpp: size of the fixed support estimate
  double epsilon = 0.0;      // tail_l1 residual budget
  double tol = 1e-8;         // oracle KKT tolerance
  std::string t_mode = "true";  // tail_l1 / tail_lasso: "true" or "empty" T
};

struct SolverSpec {
  std::string name;  // phpp | hpp | tail_hpp | omp | cosamp | sp | htp | tail_l1 | tail_lasso
  SolverParams params;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::sweep_k;
  Ensemble ensemble = Ensemble::gaussian;
  Index n = 0;
  std::vector<Index> m_grid;
  std::vector<Index> k_grid;
  std::vector<Index> n_grid;  // timing runs
  Index trials = 1;
  NoiseModel noise;
  std::vector<SolverSpec> solvers;
  double success_threshold = 1e-4;
  std::uint64_t seed = 0;
  bool measure_time = false;     // forced on for timing runs
  bool dump_solutions = false;
  double rip_exact_budget = 1e6;  // enumeration cap before falling back to MC
  std::uint64_t rip_mc_trials = 20000;
  double trace_step_tol = 1e-13;
  Index trace_max_iters = 20000;

  void validate() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

struct GridPoint {
  Index id = 0;
  Index n = 0, m = 0, k = 0;
};

struct TrialRecord {
  Index grid_id = 0;
  Index n = 0, m = 0, k = 0;
  Index trial = 0;
  std::string solver;
  std::uint64_t seed = 0;
  double error = 0.0;
  bool success = false;
  double wall_time_s = 0.0;
  Index iters = 0;
};

struct SweepResult {
  std::vector<GridPoint> grid;
  std::vector<TrialRecord> records;  // sorted by (grid_id, trial, solver)
};

struct Summary {
  double success_rate = 0.0;
  double mean_error = 0.0;
  double mean_time_s = 0.0;
};

std::uint64_t trial_seed(std::uint64_t master, Index grid_id, Index trial);

/// Runs every (grid point, trial, solver) combination. Trials are distributed
/// over `jobs` workers; records land in deterministic slots regardless of
/// scheduling. With dump_solutions set, recovered vectors go to out_dir.
SweepResult run_sweep(const ExperimentConfig& cfg, unsigned jobs = 1,
                      const std::string& out_dir = "");

Summary summarize(const std::vector<TrialRecord>& records, Index grid_id,
                  const std::string& solver);

std::string records_csv(const SweepResult& result);
std::string summary_json(const SweepResult& result);

/// Timing experiment: grid over n with m = n/4 and k = n/100 unless given
/// explicitly; reports mean wall-clock seconds per solver and problem size.
struct TimingRow {
  Index n = 0;
  std::string solver;
  double mean_time_s = 0.0;
  double mean_error = 0.0;
};
std::vector<TimingRow> timing_table(const SweepResult& result);

struct RipCurvePoint {
  Index k = 0;
  RipEstimate estimate;
};
std::vector<RipCurvePoint> run_rip_curve(const ExperimentConfig& cfg);
std::string rip_curve_csv(const std::vector<RipCurvePoint>& curve);

struct ConvergenceReport {
  SolverTrace trace;
  std::vector<double> distance_to_final;  // r_k = ||w_k - w*||
  std::optional<RateEstimate> rate;
  double final_error = 0.0;  // ||z - x||
};
ConvergenceReport run_convergence_trace(const ExperimentConfig& cfg);
std::string convergence_csv(const ConvergenceReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace tailcs
