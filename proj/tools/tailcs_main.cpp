// tailcs: benchmark driver for the tail-minimization solvers.
//
//   tailcs sweep  --config cfg.json [--seed N] [--out DIR] [--jobs J] [--dump-solutions]
//   tailcs timing --config cfg.json ...
//   tailcs rip    --config cfg.json ...
//   tailcs trace  --config cfg.json ...
//
// Outputs records.csv and summary.json (plot-ready, no rendering here).

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tailcs/bench.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  unsigned jobs = 1;
  bool dump_solutions = false;
  bool has_seed = false;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--jobs", args.jobs, "worker threads");
  cmd->add_flag("--dump-solutions", args.dump_solutions, "persist recovered vectors");
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&args](std::uint64_t s) {
        args.seed = s;
        args.has_seed = true;
      },
      "master seed override");
}

tailcs::ExperimentConfig load(const CommonArgs& args) {
  tailcs::ExperimentConfig cfg = tailcs::load_config(args.config_path);
  if (args.has_seed) cfg.seed = args.seed;
  if (args.dump_solutions) cfg.dump_solutions = true;
  return cfg;
}

void run_sweep_like(const CommonArgs& args, bool timing) {
  tailcs::ExperimentConfig cfg = load(args);
  if (timing && cfg.kind != tailcs::ExperimentKind::timing)
    throw std::runtime_error("timing subcommand needs a config with kind=timing");
  if (!timing && cfg.kind != tailcs::ExperimentKind::sweep_k &&
      cfg.kind != tailcs::ExperimentKind::sweep_m &&
      cfg.kind != tailcs::ExperimentKind::noisy_sweep)
    throw std::runtime_error("sweep subcommand needs a sweep_k/sweep_m/noisy_sweep config");

  const tailcs::SweepResult result = tailcs::run_sweep(cfg, args.jobs, args.out_dir);
  tailcs::write_text_file(args.out_dir + "/records.csv", tailcs::records_csv(result));
  tailcs::write_text_file(args.out_dir + "/summary.json", tailcs::summary_json(result));

  for (const tailcs::GridPoint& g : result.grid) {
    for (const tailcs::SolverSpec& s : cfg.solvers) {
      const tailcs::Summary sum = tailcs::summarize(result.records, g.id, s.name);
      std::printf("grid %lld (n=%lld m=%lld k=%lld) %-10s success %.3f mean_err %.3e",
                  static_cast<long long>(g.id), static_cast<long long>(g.n),
                  static_cast<long long>(g.m), static_cast<long long>(g.k),
                  s.name.c_str(), sum.success_rate, sum.mean_error);
      if (cfg.measure_time) std::printf(" mean_time %.4fs", sum.mean_time_s);
      std::printf("\n");
    }
  }
  std::printf("wrote %s/records.csv and summary.json\n", args.out_dir.c_str());
}

void run_rip(const CommonArgs& args) {
  tailcs::ExperimentConfig cfg = load(args);
  if (cfg.kind != tailcs::ExperimentKind::rip_curve)
    throw std::runtime_error("rip subcommand needs a config with kind=rip_curve");
  const auto curve = tailcs::run_rip_curve(cfg);
  tailcs::write_text_file(args.out_dir + "/rip_curve.csv", tailcs::rip_curve_csv(curve));
  for (const auto& p : curve)
    std::printf("k=%-4lld delta_l=%.4f delta_u=%.4f (%s)\n", static_cast<long long>(p.k),
                p.estimate.lower, p.estimate.upper,
                p.estimate.method == tailcs::RipEstimate::Method::exact ? "exact" : "mc");
  std::printf("wrote %s/rip_curve.csv\n", args.out_dir.c_str());
}

void run_trace(const CommonArgs& args) {
  tailcs::ExperimentConfig cfg = load(args);
  if (cfg.kind != tailcs::ExperimentKind::convergence_trace)
    throw std::runtime_error("trace subcommand needs a config with kind=convergence_trace");
  const tailcs::ConvergenceReport report = tailcs::run_convergence_trace(cfg);
  tailcs::write_text_file(args.out_dir + "/trace.csv", tailcs::convergence_csv(report));
  std::printf("iterations=%lld status=%s final_error=%.3e\n",
              static_cast<long long>(report.trace.iterations()),
              tailcs::to_string(report.trace.status), report.final_error);
  if (report.rate)
    std::printf("tau_rate=%.6f over window of %lld ratios\n", report.rate->tau_rate,
                static_cast<long long>(report.rate->window));
  else
    std::printf("trace too short for a rate estimate\n");
  std::printf("wrote %s/trace.csv\n", args.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tail-minimization compressed sensing benchmarks"};
  app.require_subcommand(1);

  CommonArgs sweep_args, timing_args, rip_args, trace_args;
  CLI::App* sweep = app.add_subcommand("sweep", "success-rate sweeps");
  CLI::App* timing = app.add_subcommand("timing", "solver timing comparison");
  CLI::App* rip = app.add_subcommand("rip", "RIP-constant curve");
  CLI::App* trace = app.add_subcommand("trace", "single-instance convergence trace");
  add_common(sweep, sweep_args);
  add_common(timing, timing_args);
  add_common(rip, rip_args);
  add_common(trace, trace_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) run_sweep_like(sweep_args, false);
    if (timing->parsed()) run_sweep_like(timing_args, true);
    if (rip->parsed()) run_rip(rip_args);
    if (trace->parsed()) run_trace(trace_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
