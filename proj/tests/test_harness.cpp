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
#include <fstream>

#include "doctest.h"
#include "qcl/harness.hpp"
#include "qcl/io.hpp"

using namespace qcl;
namespace fs = std::filesystem;

namespace {

// runs.csv with the timing column blanked; everything else must be
// byte-stable across reruns and worker counts.
std::string stable_runs_csv(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "runs.csv");
  REQUIRE(in.good());
  std::string line, out;
  while (std::getline(in, line)) {
    const size_t cut = line.rfind(',');
    out += line.substr(0, cut);
    out += '\n';
  }
  return out;
}

SweepConfig small_sweep(const std::string& dir, int workers) {
  SweepConfig cfg;
  cfg.problem = ProblemLabel::A;
  cfg.runs_per_point = 3;
  cfg.axis = SweepAxis::Sigma0;
  cfg.axis_values = {1.0, 0.5};
  cfg.master_seed = 424242;
  cfg.workers = workers;
  cfg.output_dir = dir;
  return cfg;
}

}  // namespace

TEST_CASE("run_single: determinism and record fields") {
  RunSpec spec;
  spec.problem = ProblemLabel::A;
  spec.sigma0 = 1.0;
  spec.seed = 31;
  const RunOutput a = run_single(spec);
  const RunOutput b = run_single(spec);

  CHECK(a.record.status == FlowStatus::Converged);
  CHECK(a.record.iterations == b.record.iterations);
  CHECK(a.record.j_final == b.record.j_final);
  CHECK(a.record.run_id == "A-s31");
  CHECK(a.record.eta == doctest::Approx(0.0003));
  CHECK(a.record.l_slices == 255);
  const std::string ra = run_csv_row(a.record);
  const std::string rb = run_csv_row(b.record);
  CHECK(ra.substr(0, ra.rfind(',')) == rb.substr(0, rb.rfind(',')));
}

TEST_CASE("run CSV rows round-trip") {
  RunSpec spec;
  spec.problem = ProblemLabel::A;
  spec.sigma0 = 0.5;
  spec.seed = 77;
  spec.opts.max_iterations = 40;
  const RunOutput out = run_single(spec);
  const RunRecord parsed = parse_run_csv_row(run_csv_row(out.record));
  CHECK(parsed.run_id == out.record.run_id);
  CHECK(parsed.seed == out.record.seed);
  CHECK(parsed.sigma0 == out.record.sigma0);
  CHECK(parsed.tau == out.record.tau);
  CHECK(parsed.status == out.record.status);
  CHECK(parsed.iterations == out.record.iterations);
  CHECK(parsed.j_final == out.record.j_final);
  CHECK(parsed.sigma_opt == out.record.sigma_opt);
}

TEST_CASE("run_seed: scheduling-independent derivation") {
  const std::uint64_t s = run_seed(9, ProblemLabel::C, 2, 5);
  CHECK(s == run_seed(9, ProblemLabel::C, 2, 5));
  CHECK(s != run_seed(9, ProblemLabel::C, 2, 6));
  CHECK(s != run_seed(9, ProblemLabel::C, 3, 5));
  CHECK(s != run_seed(9, ProblemLabel::D, 2, 5));
  CHECK(s != run_seed(10, ProblemLabel::C, 2, 5));
}

TEST_CASE("run_sweep: stats, files, reproducibility across workers") {
  const fs::path base = fs::temp_directory_path() / "qcl_harness_test";
  fs::remove_all(base);

  const SweepStats one = run_sweep(small_sweep((base / "w1").string(), 1));
  const SweepStats two = run_sweep(small_sweep((base / "w2").string(), 2));

  REQUIRE(one.points.size() == 2);
  CHECK(one.points[0].n_runs == 3);
  CHECK(one.points[0].n_converged == 3);
  CHECK(one.points[0].success_fraction == 1.0);
  CHECK(one.points[0].mse.has_value());

  CHECK(stable_runs_csv((base / "w1").string()) ==
        stable_runs_csv((base / "w2").string()));

  for (const char* name : {"runs.csv", "summary.csv", "plot.csv",
                           "plot.svg", "meta.json"}) {
    CHECK(fs::exists(base / "w1" / name));
  }

  // Aggregation is recomputable from the per-run rows alone.
  std::ifstream in(base / "w1" / "runs.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == run_csv_header());
  std::vector<RunRecord> rows;
  while (std::getline(in, line)) rows.push_back(parse_run_csv_row(line));
  const auto points = aggregate(small_sweep("", 1), rows);
  REQUIRE(points.size() == one.points.size());
  for (size_t p = 0; p < points.size(); ++p) {
    CHECK(points[p].n_converged == one.points[p].n_converged);
    CHECK(points[p].mse == one.points[p].mse);
    CHECK(points[p].mean_sigma_opt == one.points[p].mean_sigma_opt);
  }
  fs::remove_all(base);
}

TEST_CASE("run_sweep: interrupted output resumes after the prefix") {
  const fs::path base = fs::temp_directory_path() / "qcl_resume_test";
  fs::remove_all(base);
  const std::string dir = (base / "out").string();

  const SweepStats full = run_sweep(small_sweep(dir, 1));
  const std::string complete = stable_runs_csv(dir);

  // Truncate runs.csv to header + 2 rows, as if interrupted.
  std::ifstream in(fs::path(dir) / "runs.csv");
  std::string line, truncated;
  for (int i = 0; i < 3 && std::getline(in, line); ++i) {
    truncated += line;
    truncated += '\n';
  }
  in.close();
  std::ofstream(fs::path(dir) / "runs.csv", std::ios::trunc) << truncated;

  const SweepStats resumed = run_sweep(small_sweep(dir, 1));
  CHECK(stable_runs_csv(dir) == complete);
  REQUIRE(resumed.points.size() == full.points.size());
  for (size_t p = 0; p < full.points.size(); ++p) {
    CHECK(resumed.points[p].n_converged == full.points[p].n_converged);
    CHECK(resumed.points[p].mse == full.points[p].mse);
  }
  fs::remove_all(base);
}

TEST_CASE("run_sweep: single-run stats equal that run") {
  const fs::path base = fs::temp_directory_path() / "qcl_single_test";
  fs::remove_all(base);
  SweepConfig cfg;
  cfg.problem = ProblemLabel::A;
  cfg.runs_per_point = 1;
  cfg.axis = SweepAxis::Sigma0;
  cfg.axis_values = {1.0};
  cfg.master_seed = 5;
  cfg.output_dir = (base / "out").string();

  const SweepStats stats = run_sweep(cfg);
  REQUIRE(stats.runs.size() == 1);
  const RunRecord& r = stats.runs[0];
  CHECK(stats.points[0].n_runs == 1);
  CHECK(stats.points[0].mse == doctest::Approx(r.iterations));
  CHECK(stats.points[0].mean_sigma_opt == r.sigma_opt);
  fs::remove_all(base);
}

TEST_CASE("tolerance grid: shape and failure counting") {
  FlowOptions base;
  base.max_iterations = 30;  // force MaxIterations, not failures
  const TolGridResult grid = run_tolerance_grid(
      ProblemLabel::A, {1.0, 0.5}, {1e-6, 1e-8}, 2, base, 66, 1, "");
  CHECK(grid.failures.rows() == 2);
  CHECK(grid.failures.cols() == 2);
  CHECK(grid.failures.sum() == 0);  // MaxIterations is not failure
  CHECK(grid.runs.size() == 8);
}

TEST_CASE("sweep config JSON") {
  const fs::path base = fs::temp_directory_path() / "qcl_cfg_test";
  fs::create_directories(base);
  const std::string path = (base / "cfg.json").string();
  std::ofstream(path) << R"({
    "problem": "C",
    "runs_per_point": 4,
    "sigma0_list": [5e-5, 1e-5],
    "tau": 1e-6,
    "max_iterations": 500,
    "master_seed": 12,
    "workers": 2,
    "output_dir": "unused"
  })";
  const SweepConfig cfg = load_sweep_config(path);
  CHECK(cfg.problem == ProblemLabel::C);
  CHECK(cfg.runs_per_point == 4);
  CHECK(cfg.axis == SweepAxis::Sigma0);
  CHECK(cfg.axis_values == std::vector<double>{5e-5, 1e-5});
  CHECK(cfg.base.tau == 1e-6);
  CHECK(cfg.base.max_iterations == 500);
  CHECK(cfg.master_seed == 12);
  CHECK(cfg.workers == 2);

  std::ofstream(path) << R"({"problem": "A"})";
  CHECK_THROWS_AS(load_sweep_config(path), ConfigInvalid);
  fs::remove_all(base);
}
