// Copyright 2026 The QCL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fstream>

#include "qcl/fields.hpp"
#include "qcl/harness.hpp"
#include "qcl/hessian.hpp"
#include "qcl/io.hpp"
#include "qcl/rng.hpp"
#include "qcl/version.hpp"

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using namespace qcl;

int cmd_catalog() {
  std::cout << catalog_json() << std::endl;
  return 0;
}

struct RunArgs {
  std::string problem = "A";
  double sigma0 = -1.0;
  std::uint64_t seed = 0;
  double tau = 1e-8;
  std::optional<double> eta;
  long max_iter = 100000;
  double jitter = 0.0;
  std::optional<double> t_final;
  std::optional<int> l_slices;
  std::string trace_path;
  std::string dump_field_path;
  std::string draw_log_path;
};


int cmd_run(const RunArgs& args) {
  RunSpec spec;
  spec.problem = problem_label_from_string(args.problem);
  if (args.sigma0 > 0.0) spec.sigma0 = args.sigma0;
  spec.seed = args.seed;
  spec.opts.tau = args.tau;
  spec.opts.eta_override = args.eta;
  spec.opts.max_iterations = args.max_iter;
  spec.opts.monotone_jitter = args.jitter;
  spec.t_final = args.t_final;
  spec.l_slices = args.l_slices;

  std::vector<TraceRow> trace;
  RunOutput out =
      run_single(spec, args.trace_path.empty() ? nullptr : &trace);
  if (!args.trace_path.empty()) write_trace_csv(trace, args.trace_path);
  if (!args.draw_log_path.empty()) {
    write_draw_log(spec, args.draw_log_path);
  }
  if (!args.dump_field_path.empty()) {
    save_field(out.result.final_field, args.dump_field_path);
  }

  nlohmann::json report;
  report["run_id"] = out.record.run_id;
  report["problem"] = to_string(out.record.problem);
  report["seed"] = out.record.seed;
  if (out.record.sigma0) report["sigma0"] = *out.record.sigma0;
  report["tau"] = out.record.tau;
  report["eta"] = out.record.eta;
  report["T"] = out.record.t_final;
  report["L"] = out.record.l_slices;
  report["status"] = to_string(out.record.status);
  report["iterations"] = out.record.iterations;
  report["rejected_steps"] = out.result.rejected_steps;
  report["j_initial"] = out.record.j_initial;
  report["j_final"] = out.record.j_final;
  if (out.record.sigma_opt) report["sigma_opt"] = *out.record.sigma_opt;
  report["max_unitarity_defect"] = out.result.max_unitarity_defect;
  report["wall_ms"] = out.record.wall_ms;
  report["software_version"] = kVersion;
  report["rng"] = "splitmix64";
  std::cout << report.dump(2) << std::endl;
  return out.record.status == FlowStatus::Converged ? 0 : 1;
}

void print_summary(const SweepConfig& cfg, const SweepStats& stats) {
  std::cout << "problem " << to_string(cfg.problem) << ", "
            << stats.points.size() << " sweep points, "
            << cfg.runs_per_point << " runs each\n";
  for (const SweepPointStats& st : stats.points) {
    std::cout << "  point " << fmt_double(st.axis_value) << ": converged "
              << st.n_converged << "/" << st.n_runs << ", failed "
              << st.n_failed;
    if (st.n_maxiter > 0) std::cout << ", max-iter " << st.n_maxiter;
    if (st.mse) std::cout << ", MSE " << fmt_double(*st.mse);
    if (st.mean_sigma_opt) {
      std::cout << ", mean sigma_opt " << fmt_double(*st.mean_sigma_opt);
    }
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcl: gradient-flow optimal control for closed N-level "
               "quantum systems"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  app.add_subcommand("catalog", "List the built-in control problems");

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "One optimization run");
  run->add_option("--problem", run_args.problem, "Problem label A..G")
      ->required();
  run->add_option("--sigma0", run_args.sigma0,
                  "Initial relative field strength (omit for problem G)");
  run->add_option("--seed", run_args.seed, "Run seed");
  run->add_option("--tau", run_args.tau, "Absolute error tolerance");
  double run_eta = -1.0;
  run->add_option("--eta", run_eta, "Convergence threshold override");
  run->add_option("--max-iter", run_args.max_iter, "Accepted-step cap");
  run->add_option("--jitter", run_args.jitter,
                  "Round-off tolerance for the monotonicity check");
  double run_T = -1.0;
  run->add_option("--T", run_T, "Control period (problem G)");
  int run_L = -1;
  run->add_option("--L", run_L, "Time slices override");
  run->add_option("--trace", run_args.trace_path,
                  "Write per-step trace CSV here");
  run->add_option("--dump-field", run_args.dump_field_path,
                  "Write the optimized field CSV here");
  run->add_option("--draw-log", run_args.draw_log_path,
                  "Write the initial-field draw audit CSV here");

  // sweep
  std::string sw_problem = "A";
  std::vector<double> sw_sigma0, sw_tau, sw_T;
  int sw_runs = 20;
  std::uint64_t sw_seed = 0;
  bool sw_seed_given = false;
  std::string sw_out;
  int sw_workers = 1;
  double sw_fixed_sigma0 = -1.0;
  double sw_base_tau = 1e-8;
  long sw_max_iter = 100000;
  double sw_jitter = 0.0;
  bool sw_full = false;
  std::string sw_config;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Batch of seeded runs over one axis (sigma0 or T)");
  sweep->add_option("--config", sw_config, "JSON config file");
  sweep->add_option("--problem", sw_problem, "Problem label A..G");
  sweep->add_option("--sigma0", sw_sigma0, "sigma0 sweep values")
      ->delimiter(',');
  sweep->add_option("--tau-list", sw_tau, "tau sweep values")
      ->delimiter(',');
  sweep->add_option("--T", sw_T, "Control-period sweep values (problem G)")
      ->delimiter(',');
  sweep->add_option("--runs", sw_runs, "Runs per sweep point");
  sweep->add_option("--seed", sw_seed, "Master seed")
      ->each([&](const std::string&) { sw_seed_given = true; });
  sweep->add_option("--out", sw_out, "Output directory");
  sweep->add_option("--workers", sw_workers, "Parallel workers");
  sweep->add_option("--fixed-sigma0", sw_fixed_sigma0,
                    "sigma0 held fixed for tau/T sweeps");
  sweep->add_option("--tau", sw_base_tau, "Base error tolerance");
  sweep->add_option("--max-iter", sw_max_iter, "Accepted-step cap");
  sweep->add_option("--jitter", sw_jitter,
                    "Round-off tolerance for the monotonicity check");
  sweep->add_flag("--full", sw_full,
                  "Production-scale counts (100 runs per point)");

  // taugrid
  std::string tg_problem = "A";
  std::vector<double> tg_sigma0, tg_tau;
  int tg_runs = 20;
  std::uint64_t tg_seed = 0;
  bool tg_seed_given = false;
  std::string tg_out;
  int tg_workers = 1;
  long tg_max_iter = 100000;
  bool tg_full = false;
  CLI::App* taugrid = app.add_subcommand(
      "taugrid", "Failure counts over a sigma0 x tau grid");
  taugrid->add_option("--problem", tg_problem, "Problem label")->required();
  taugrid->add_option("--sigma0", tg_sigma0, "sigma0 values")
      ->delimiter(',')
      ->required();
  taugrid->add_option("--tau", tg_tau, "tau values")
      ->delimiter(',')
      ->required();
  taugrid->add_option("--runs", tg_runs, "Runs per cell");
  taugrid->add_option("--seed", tg_seed, "Master seed")
      ->each([&](const std::string&) { tg_seed_given = true; });
  taugrid->add_option("--out", tg_out, "Output directory");
  taugrid->add_option("--workers", tg_workers, "Parallel workers");
  taugrid->add_option("--max-iter", tg_max_iter, "Accepted-step cap");
  taugrid->add_flag("--full", tg_full,
                    "Production-scale counts (100 runs per cell)");

  // hessian
  std::string hs_problem = "A";
  std::string hs_field = "zero";
  double hs_step = 1e-4;
  std::string hs_out;
  int hs_workers = 1;
  bool hs_force = false;
  std::uint64_t hs_seed = 0;
  double hs_T = -1.0;
  CLI::App* hess = app.add_subcommand(
      "hessian", "Finite-difference Hessian at a field");
  hess->add_option("--problem", hs_problem, "Problem label")->required();
  hess->add_option("--field", hs_field,
                   "'zero' or a field CSV path (with JSON sidecar)");
  hess->add_option("--step", hs_step, "Finite-difference step");
  hess->add_option("--out", hs_out, "Output directory");
  hess->add_option("--workers", hs_workers, "Parallel workers");
  hess->add_flag("--force", hs_force, "Allow dimensions above 1024");
  hess->add_option("--seed", hs_seed, "Instance seed (problem F)");
  hess->add_option("--T", hs_T, "Control period (problem G)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("catalog")) return cmd_catalog();

    if (app.got_subcommand("run")) {
      if (run_eta > 0.0) run_args.eta = run_eta;
      if (run_T > 0.0) run_args.t_final = run_T;
      if (run_L > 0) run_args.l_slices = run_L;
      return cmd_run(run_args);
    }

    if (app.got_subcommand("sweep")) {
      SweepConfig cfg;
      if (!sw_config.empty()) cfg = load_sweep_config(sw_config);
      if (sweep->count("--problem") || sw_config.empty()) {
        cfg.problem = problem_label_from_string(sw_problem);
      }
      int axes_given = 0;
      if (!sw_sigma0.empty()) {
        cfg.axis = SweepAxis::Sigma0;
        cfg.axis_values = sw_sigma0;
        ++axes_given;
      }
      if (!sw_tau.empty()) {
        cfg.axis = SweepAxis::Tau;
        cfg.axis_values = sw_tau;
        ++axes_given;
      }
      if (!sw_T.empty()) {
        cfg.axis = SweepAxis::ControlPeriod;
        cfg.axis_values = sw_T;
        ++axes_given;
      }
      if (axes_given > 1) {
        throw ConfigInvalid("sweep: give exactly one of --sigma0/--tau-list/--T");
      }
      if (axes_given == 0 && cfg.axis_values.empty()) {
        throw ConfigInvalid("sweep: no sweep axis given");
      }
      if (sweep->count("--runs")) cfg.runs_per_point = sw_runs;
      if (sw_full && !sweep->count("--runs")) cfg.runs_per_point = 100;
      if (sw_seed_given) {
        cfg.master_seed = sw_seed;
      } else if (sw_config.empty()) {
        cfg.master_seed = master_seed_from_env();
      }
      if (!sw_out.empty()) cfg.output_dir = sw_out;
      if (sweep->count("--workers")) cfg.workers = sw_workers;
      if (sw_fixed_sigma0 > 0.0) cfg.fixed_sigma0 = sw_fixed_sigma0;
      if (sweep->count("--tau")) cfg.base.tau = sw_base_tau;
      if (sweep->count("--max-iter")) cfg.base.max_iterations = sw_max_iter;
      if (sweep->count("--jitter")) cfg.base.monotone_jitter = sw_jitter;

      const SweepStats stats = run_sweep(cfg);
      print_summary(cfg, stats);
      return 0;
    }

    if (app.got_subcommand("taugrid")) {
      FlowOptions base;
      base.max_iterations = tg_max_iter;
      if (tg_full && !taugrid->count("--runs")) tg_runs = 100;
      if (!tg_seed_given) tg_seed = master_seed_from_env();
      const TolGridResult grid = run_tolerance_grid(
          problem_label_from_string(tg_problem), tg_sigma0, tg_tau, tg_runs,
          base, tg_seed, tg_workers, tg_out);
      std::cout << "failed runs per cell (rows sigma0, cols tau):\n";
      std::cout << "sigma0";
      for (double tau : grid.tau_values) std::cout << "\t" << fmt_double(tau);
      std::cout << '\n';
      for (size_t i = 0; i < grid.sigma0_values.size(); ++i) {
        std::cout << fmt_double(grid.sigma0_values[i]);
        for (int j = 0; j < grid.failures.cols(); ++j) {
          std::cout << '\t' << grid.failures(static_cast<int>(i), j);
        }
        std::cout << '\n';
      }
      // Diagnostic: failures should not grow as tau tightens.
      for (size_t i = 0; i < grid.sigma0_values.size(); ++i) {
        for (int j = 1; j < grid.failures.cols(); ++j) {
          if (grid.failures(static_cast<int>(i), j) >
              grid.failures(static_cast<int>(i), j - 1)) {
            std::cout << "note: failures increased from tau="
                      << fmt_double(grid.tau_values[j - 1]) << " to "
                      << fmt_double(grid.tau_values[j]) << " at sigma0="
                      << fmt_double(grid.sigma0_values[i]) << '\n';
          }
        }
      }
      return 0;
    }

    if (app.got_subcommand("hessian")) {
      ProblemOptions popts;
      popts.f_seed = hs_seed;
      if (hs_T > 0.0) popts.t_final = hs_T;
      const ControlProblem pb =
          make_problem(problem_label_from_string(hs_problem), popts);
      ControlField field = hs_field == "zero" ? pb.zero()
                                              : load_field(hs_field);
      const HessianReport rep =
          hessian_at(pb, field, hs_step, hs_workers, hs_force);
      std::cout << "classification: " << to_string(rep.classification)
                << "\ntolerance: " << fmt_double(rep.tolerance)
                << "\nstep: " << fmt_double(rep.step)
                << "\nmin eigenvalue: " << fmt_double(rep.eigenvalues(0))
                << "\nmax eigenvalue: "
                << fmt_double(rep.eigenvalues(rep.eigenvalues.size() - 1))
                << std::endl;
      if (!hs_out.empty()) {
        std::filesystem::create_directories(hs_out);
        save_hessian_report(
            rep, (std::filesystem::path(hs_out) / "eigenvalues.csv").string(),
            (std::filesystem::path(hs_out) / "report.json").string());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
