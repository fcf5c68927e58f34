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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcl/flow.hpp"
#include "qcl/problems.hpp"

namespace qcl {

/// Everything one optimization run needs. Problem instance and initial
/// field are derived from `seed` through fixed substreams, so a run is a
/// pure function of this struct.
struct RunSpec {
  ProblemLabel problem = ProblemLabel::A;
  std::optional<double> t_final;  // problem G only
  std::optional<int> l_slices;
  std::optional<double> sigma0;  // required unless the problem lacks an RFS
  std::uint64_t seed = 0;
  FlowOptions opts;
};

/// One row of the per-run CSV.
struct RunRecord {
  std::string run_id;
  ProblemLabel problem = ProblemLabel::A;
  std::uint64_t seed = 0;
  std::optional<double> sigma0;
  double tau = 0.0;
  double eta = 0.0;
  double t_final = 0.0;
  int l_slices = 0;
  FlowStatus status = FlowStatus::MaxIterations;
  long iterations = 0;
  double j_initial = 0.0;
  double j_final = 0.0;
  std::optional<double> sigma_opt;
  long wall_ms = 0;
};

struct RunOutput {
  OptimizationResult result;
  RunRecord record;
};

/// Synthesizes the initial field for the run's seed and optimizes.
RunOutput run_single(const RunSpec& spec,
                     std::vector<TraceRow>* trace = nullptr);

/// Builds the run's initial field without optimizing (inspection hook).
ControlField initial_field_for(const ControlProblem& problem,
                               std::optional<double> sigma0,
                               std::uint64_t seed);

/// Reproduces the run's initial-field draws and writes the audit CSV
/// `channel,mode,omega,amplitude`.
void write_draw_log(const RunSpec& spec, const std::string& path);

enum class SweepAxis { Sigma0, Tau, ControlPeriod };

struct SweepConfig {
  ProblemLabel problem = ProblemLabel::A;
  std::optional<int> l_slices;
  int runs_per_point = 20;
  SweepAxis axis = SweepAxis::Sigma0;
  std::vector<double> axis_values;
  std::optional<double> fixed_sigma0;  // for Tau / ControlPeriod axes
  FlowOptions base;
  std::uint64_t master_seed = 0;
  int workers = 1;
  std::string output_dir;
};

struct SweepPointStats {
  double axis_value = 0.0;
  int n_runs = 0;
  int n_converged = 0;
  int n_failed = 0;   // non-monotone and step-underflow runs
  int n_maxiter = 0;
  std::optional<double> mse;             // mean iterations, converged runs
  std::optional<double> mean_sigma_opt;  // mean RFS, converged runs
  double success_fraction = 0.0;
};

struct SweepStats {
  std::vector<SweepPointStats> points;
  std::vector<RunRecord> runs;
};

/// Per-run seed: substream chain master -> problem label -> point -> run,
/// so results do not depend on worker scheduling or on other points.
std::uint64_t run_seed(std::uint64_t master_seed, ProblemLabel problem,
                       int point_index, int run_index);

/// Executes the sweep. Writes runs.csv (one row per run, flushed in run
/// order, so restarts resume after the completed prefix), summary.csv,
/// plot.csv, plot.svg and meta.json into output_dir.
SweepStats run_sweep(const SweepConfig& config);

/// Aggregates records (already in run order) into per-point stats.
std::vector<SweepPointStats> aggregate(const SweepConfig& config,
                                       const std::vector<RunRecord>& runs);

struct TolGridResult {
  std::vector<double> sigma0_values;
  std::vector<double> tau_values;
  // failures(i, j): failed runs at sigma0_values[i], tau_values[j]
  Eigen::MatrixXi failures;
  std::vector<RunRecord> runs;
};

/// Failure-count grid over sigma0 x tau (scaled Table III experiment).
TolGridResult run_tolerance_grid(ProblemLabel problem,
                                 const std::vector<double>& sigma0_list,
                                 const std::vector<double>& tau_list,
                                 int runs_per_cell, const FlowOptions& base,
                                 std::uint64_t master_seed, int workers,
                                 const std::string& output_dir);

std::string run_csv_header();
std::string run_csv_row(const RunRecord& r);
RunRecord parse_run_csv_row(const std::string& line);

/// Reads a sweep config from a JSON document mirroring SweepConfig.
SweepConfig load_sweep_config(const std::string& path);

/// Master seed fallback: QCL_SEED environment variable, else 0.
std::uint64_t master_seed_from_env();

}  // namespace qcl
