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

#include "qcl/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "qcl/fields.hpp"
#include "qcl/io.hpp"
#include "qcl/rng.hpp"
#include "qcl/version.hpp"

#include "json.hpp"

namespace qcl {

namespace {

namespace fs = std::filesystem;

// Substream ids for per-run derivations.
constexpr std::uint64_t kProblemStream = 0x51;
constexpr std::uint64_t kFieldStream = 0x52;

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Sigma0: return "sigma0";
    case SweepAxis::Tau: return "tau";
    case SweepAxis::ControlPeriod: return "T";
  }
  return "?";
}

std::string opt_str(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

}  // namespace

ControlField initial_field_for(const ControlProblem& problem,
                               std::optional<double> sigma0,
                               std::uint64_t seed) {
  const std::uint64_t field_seed = substream(seed, kFieldStream);
  const FieldInitSpec spec =
      sigma0 ? rfs_init_spec(problem.system, problem.t_final, *sigma0,
                             field_seed)
             : unit_peak_init_spec(problem.system, problem.t_final,
                                   field_seed);
  return synthesize(spec, problem.system, problem.t_final, problem.l_slices);
}

void write_draw_log(const RunSpec& spec, const std::string& path) {
  ProblemOptions popts;
  popts.t_final = spec.t_final;
  popts.l_slices = spec.l_slices;
  popts.f_seed = substream(spec.seed, kProblemStream);
  const ControlProblem pb = make_problem(spec.problem, popts);
  const std::uint64_t field_seed = substream(spec.seed, kFieldStream);
  const FieldInitSpec fspec =
      spec.sigma0 ? rfs_init_spec(pb.system, pb.t_final, *spec.sigma0,
                                  field_seed)
                  : unit_peak_init_spec(pb.system, pb.t_final, field_seed);
  std::vector<FieldDraw> log;
  synthesize(fspec, pb.system, pb.t_final, pb.l_slices, &log);
  std::ofstream f(path);
  if (!f) throw IoError("write_draw_log: cannot open " + path);
  f << "channel,mode,omega,amplitude\n";
  for (const FieldDraw& d : log) {
    f << d.channel << ',' << d.mode << ',' << fmt_double(d.omega) << ','
      << fmt_double(d.amplitude) << '\n';
  }
}

RunOutput run_single(const RunSpec& spec, std::vector<TraceRow>* trace) {
  ProblemOptions popts;
  popts.t_final = spec.t_final;
  popts.l_slices = spec.l_slices;
  popts.f_seed = substream(spec.seed, kProblemStream);
  const ControlProblem problem = make_problem(spec.problem, popts);

  const ControlField field0 =
      initial_field_for(problem, spec.sigma0, spec.seed);

  const auto start = std::chrono::steady_clock::now();
  OptimizationResult result = optimize(problem, field0, spec.opts, trace);
  const auto stop = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.run_id = to_string(spec.problem) + "-s" + std::to_string(spec.seed);
  rec.problem = spec.problem;
  rec.seed = spec.seed;
  rec.sigma0 = spec.sigma0;
  rec.tau = spec.opts.tau;
  rec.eta = spec.opts.eta_override.value_or(
      kinematic_bounds(problem.objective).eta);
  rec.t_final = problem.t_final;
  rec.l_slices = problem.l_slices;
  rec.status = result.status;
  rec.iterations = result.iterations;
  rec.j_initial = result.j_initial;
  rec.j_final = result.j_final;
  rec.sigma_opt = result.sigma_opt;
  rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    stop - start)
                    .count();
  return RunOutput{std::move(result), std::move(rec)};
}

std::uint64_t run_seed(std::uint64_t master_seed, ProblemLabel problem,
                       int point_index, int run_index) {
  std::uint64_t s = substream(master_seed, 0x100 +
                              static_cast<std::uint64_t>(problem));
  s = substream(s, static_cast<std::uint64_t>(point_index));
  return substream(s, static_cast<std::uint64_t>(run_index));
}

std::string run_csv_header() {
  return "run_id,problem,seed,sigma0,tau,eta,T,L,status,iterations,"
         "j_initial,j_final,sigma_opt,wall_ms";
}

std::string run_csv_row(const RunRecord& r) {
  std::string out;
  out += r.run_id;
  out += ',';
  out += to_string(r.problem);
  out += ',';
  out += std::to_string(r.seed);
  out += ',';
  out += opt_str(r.sigma0);
  out += ',';
  out += fmt_double(r.tau);
  out += ',';
  out += fmt_double(r.eta);
  out += ',';
  out += fmt_double(r.t_final);
  out += ',';
  out += std::to_string(r.l_slices);
  out += ',';
  out += to_string(r.status);
  out += ',';
  out += std::to_string(r.iterations);
  out += ',';
  out += fmt_double(r.j_initial);
  out += ',';
  out += fmt_double(r.j_final);
  out += ',';
  out += opt_str(r.sigma_opt);
  out += ',';
  out += std::to_string(r.wall_ms);
  return out;
}

RunRecord parse_run_csv_row(const std::string& line) {
  const std::vector<std::string> cells = split_csv_row(line);
  if (cells.size() != 14) {
    throw IoError("parse_run_csv_row: expected 14 cells, got " +
                  std::to_string(cells.size()));
  }
  RunRecord r;
  r.run_id = cells[0];
  r.problem = problem_label_from_string(cells[1]);
  r.seed = std::stoull(cells[2]);
  if (!cells[3].empty()) r.sigma0 = parse_double(cells[3]);
  r.tau = parse_double(cells[4]);
  r.eta = parse_double(cells[5]);
  r.t_final = parse_double(cells[6]);
  r.l_slices = std::stoi(cells[7]);
  r.status = flow_status_from_string(cells[8]);
  r.iterations = std::stol(cells[9]);
  r.j_initial = parse_double(cells[10]);
  r.j_final = parse_double(cells[11]);
  if (!cells[12].empty()) r.sigma_opt = parse_double(cells[12]);
  r.wall_ms = std::stol(cells[13]);
  return r;
}

namespace {

struct PlannedRun {
  int point_index = 0;
  int run_index = 0;
  RunSpec spec;
};

// Executes planned runs on a small pool. Rows are flushed to runs.csv in
// plan order as soon as the prefix is contiguous, which keeps interrupted
// sweeps resumable and the file byte-stable across worker counts.
std::vector<RunRecord> execute_plan(const std::vector<PlannedRun>& plan,
                                    int workers,
                                    const std::string& output_dir) {
  std::vector<RunRecord> records(plan.size());
  std::vector<char> done(plan.size(), 0);
  size_t resume_from = 0;

  std::ofstream csv;
  const bool writing = !output_dir.empty();
  if (writing) {
    fs::create_directories(output_dir);
    const fs::path path = fs::path(output_dir) / "runs.csv";
    if (fs::exists(path)) {
      std::ifstream in(path);
      std::string line;
      std::getline(in, line);
      if (line == run_csv_header()) {
        std::vector<RunRecord> prior;
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          prior.push_back(parse_run_csv_row(line));
        }
        // Accept a prefix that matches the plan's seeds and settings.
        size_t ok = 0;
        while (ok < prior.size() && ok < plan.size() &&
               prior[ok].seed == plan[ok].spec.seed &&
               prior[ok].problem == plan[ok].spec.problem &&
               prior[ok].tau == plan[ok].spec.opts.tau &&
               prior[ok].sigma0 == plan[ok].spec.sigma0) {
          records[ok] = prior[ok];
          done[ok] = 1;
          ++ok;
        }
        resume_from = ok;
      }
    }
    if (resume_from == 0) {
      csv.open(path, std::ios::trunc);
      csv << run_csv_header() << '\n';
      csv.flush();
    } else {
      // Rewrite the validated prefix, then append.
      csv.open(path, std::ios::trunc);
      csv << run_csv_header() << '\n';
      for (size_t i = 0; i < resume_from; ++i) {
        csv << run_csv_row(records[i]) << '\n';
      }
      csv.flush();
    }
  }

  std::atomic<size_t> next{resume_from};
  std::mutex mu;
  auto worker_body = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= plan.size()) break;
      RunOutput out = run_single(plan[idx].spec);
      std::lock_guard<std::mutex> lock(mu);
      records[idx] = std::move(out.record);
      done[idx] = 1;
    }
  };

  if (workers <= 1) {
    // Run inline, flushing as we go.
    for (size_t idx = resume_from; idx < plan.size(); ++idx) {
      RunOutput out = run_single(plan[idx].spec);
      records[idx] = std::move(out.record);
      done[idx] = 1;
      if (writing) {
        csv << run_csv_row(records[idx]) << '\n';
        csv.flush();
      }
    }
    return records;
  }

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker_body);
  size_t flushed = resume_from;
  while (flushed < plan.size()) {
    bool advanced = false;
    {
      std::lock_guard<std::mutex> lock(mu);
      while (flushed < plan.size() && done[flushed]) {
        if (writing) csv << run_csv_row(records[flushed]) << '\n';
        ++flushed;
        advanced = true;
      }
    }
    if (writing && advanced) csv.flush();
    if (!advanced) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  for (auto& t : pool) t.join();
  return records;
}

void write_meta(const SweepConfig& config, const std::string& kind) {
  nlohmann::json meta;
  meta["kind"] = kind;
  meta["software_version"] = kVersion;
  meta["rng"] = "splitmix64";
  meta["seed_derivation"] =
      "run seed = substream chain master -> 0x100+problem -> point -> run; "
      "per run: 0x51 -> problem instance, 0x52 -> field (then per channel)";
  meta["iteration_definition"] = "accepted Runge-Kutta steps";
  meta["problem"] = to_string(config.problem);
  meta["axis"] = axis_name(config.axis);
  meta["axis_values"] = config.axis_values;
  meta["runs_per_point"] = config.runs_per_point;
  if (config.fixed_sigma0) meta["fixed_sigma0"] = *config.fixed_sigma0;
  meta["tau"] = config.base.tau;
  if (config.base.eta_override) meta["eta"] = *config.base.eta_override;
  meta["max_iterations"] = config.base.max_iterations;
  meta["initial_step"] = config.base.initial_step;
  meta["monotone_jitter"] = config.base.monotone_jitter;
  meta["master_seed"] = config.master_seed;
  meta["workers"] = config.workers;
  std::ofstream out(fs::path(config.output_dir) / "meta.json");
  out << meta.dump(2) << '\n';
}

}  // namespace

std::vector<SweepPointStats> aggregate(const SweepConfig& config,
                                       const std::vector<RunRecord>& runs) {
  std::vector<SweepPointStats> points;
  const int per = config.runs_per_point;
  for (size_t p = 0; p < config.axis_values.size(); ++p) {
    SweepPointStats st;
    st.axis_value = config.axis_values[p];
    double iter_sum = 0.0;
    double sigma_sum = 0.0;
    int sigma_count = 0;
    for (int r = 0; r < per; ++r) {
      const size_t idx = p * per + r;
      if (idx >= runs.size()) break;
      const RunRecord& rec = runs[idx];
      ++st.n_runs;
      switch (rec.status) {
        case FlowStatus::Converged:
          ++st.n_converged;
          iter_sum += static_cast<double>(rec.iterations);
          if (rec.sigma_opt) {
            sigma_sum += *rec.sigma_opt;
            ++sigma_count;
          }
          break;
        case FlowStatus::MaxIterations:
          ++st.n_maxiter;
          break;
        case FlowStatus::FailedNonMonotone:
        case FlowStatus::StepUnderflow:
          ++st.n_failed;
          break;
      }
    }
    if (st.n_converged > 0) {
      st.mse = iter_sum / st.n_converged;
    }
    if (sigma_count > 0) {
      st.mean_sigma_opt = sigma_sum / sigma_count;
    }
    st.success_fraction =
        st.n_runs > 0 ? static_cast<double>(st.n_converged) / st.n_runs : 0.0;
    points.push_back(st);
  }
  return points;
}

SweepStats run_sweep(const SweepConfig& config) {
  if (config.axis_values.empty()) {
    throw ConfigInvalid("run_sweep: empty sweep axis");
  }
  if (config.runs_per_point < 1) {
    throw ConfigInvalid("run_sweep: runs_per_point must be >= 1");
  }
  if (config.axis == SweepAxis::ControlPeriod &&
      config.problem != ProblemLabel::G) {
    throw ConfigInvalid("run_sweep: control-period axis is for problem G");
  }

  std::vector<PlannedRun> plan;
  plan.reserve(config.axis_values.size() * config.runs_per_point);
  for (size_t p = 0; p < config.axis_values.size(); ++p) {
    for (int r = 0; r < config.runs_per_point; ++r) {
      PlannedRun pr;
      pr.point_index = static_cast<int>(p);
      pr.run_index = r;
      pr.spec.problem = config.problem;
      pr.spec.l_slices = config.l_slices;
      pr.spec.opts = config.base;
      pr.spec.seed = run_seed(config.master_seed, config.problem,
                              static_cast<int>(p), r);
      switch (config.axis) {
        case SweepAxis::Sigma0:
          pr.spec.sigma0 = config.axis_values[p];
          break;
        case SweepAxis::Tau:
          pr.spec.opts.tau = config.axis_values[p];
          pr.spec.sigma0 = config.fixed_sigma0;
          break;
        case SweepAxis::ControlPeriod:
          pr.spec.t_final = config.axis_values[p];
          pr.spec.sigma0 = config.fixed_sigma0;
          break;
      }
      if (config.problem == ProblemLabel::G) pr.spec.sigma0.reset();
      plan.push_back(std::move(pr));
    }
  }

  SweepStats stats;
  stats.runs = execute_plan(plan, config.workers, config.output_dir);
  stats.points = aggregate(config, stats.runs);

  if (!config.output_dir.empty()) {
    const fs::path dir(config.output_dir);
    {
      std::ofstream out(dir / "summary.csv");
      out << "point,"
          << axis_name(config.axis)
          << ",n_runs,n_converged,n_failed,n_maxiter,mse,mean_sigma_opt,"
             "success_fraction\n";
      for (size_t p = 0; p < stats.points.size(); ++p) {
        const SweepPointStats& st = stats.points[p];
        out << p << ',' << fmt_double(st.axis_value) << ',' << st.n_runs
            << ',' << st.n_converged << ',' << st.n_failed << ','
            << st.n_maxiter << ','
            << (st.mse ? fmt_double(*st.mse) : std::string()) << ','
            << (st.mean_sigma_opt ? fmt_double(*st.mean_sigma_opt)
                                  : std::string())
            << ',' << fmt_double(st.success_fraction) << '\n';
      }
    }
    {
      std::ofstream out(dir / "plot.csv");
      out << axis_name(config.axis) << ",success_fraction\n";
      for (const SweepPointStats& st : stats.points) {
        out << fmt_double(st.axis_value) << ','
            << fmt_double(st.success_fraction) << '\n';
      }
    }
    {
      std::vector<double> xs, ys;
      for (const SweepPointStats& st : stats.points) {
        xs.push_back(st.axis_value);
        ys.push_back(st.success_fraction);
      }
      std::ofstream out(dir / "plot.svg");
      out << svg_line_chart(
          xs, ys, config.axis == SweepAxis::Sigma0, axis_name(config.axis),
          "success fraction",
          "problem " + to_string(config.problem) + ": success fraction vs " +
              axis_name(config.axis));
    }
    write_meta(config, "sweep");
  }
  return stats;
}

TolGridResult run_tolerance_grid(ProblemLabel problem,
                                 const std::vector<double>& sigma0_list,
                                 const std::vector<double>& tau_list,
                                 int runs_per_cell, const FlowOptions& base,
                                 std::uint64_t master_seed, int workers,
                                 const std::string& output_dir) {
  if (sigma0_list.empty() || tau_list.empty() || runs_per_cell < 1) {
    throw ConfigInvalid("run_tolerance_grid: empty grid");
  }
  std::vector<PlannedRun> plan;
  const int n_tau = static_cast<int>(tau_list.size());
  for (size_t i = 0; i < sigma0_list.size(); ++i) {
    for (size_t j = 0; j < tau_list.size(); ++j) {
      const int point = static_cast<int>(i) * n_tau + static_cast<int>(j);
      for (int r = 0; r < runs_per_cell; ++r) {
        PlannedRun pr;
        pr.point_index = point;
        pr.run_index = r;
        pr.spec.problem = problem;
        pr.spec.sigma0 = sigma0_list[i];
        pr.spec.opts = base;
        pr.spec.opts.tau = tau_list[j];
        pr.spec.seed = run_seed(master_seed, problem, point, r);
        plan.push_back(std::move(pr));
      }
    }
  }

  TolGridResult grid;
  grid.sigma0_values = sigma0_list;
  grid.tau_values = tau_list;
  grid.runs = execute_plan(plan, workers, output_dir);
  grid.failures = Eigen::MatrixXi::Zero(
      static_cast<int>(sigma0_list.size()), n_tau);
  for (size_t idx = 0; idx < grid.runs.size(); ++idx) {
    const int point = static_cast<int>(idx) / runs_per_cell;
    const int i = point / n_tau;
    const int j = point % n_tau;
    const FlowStatus st = grid.runs[idx].status;
    if (st == FlowStatus::FailedNonMonotone ||
        st == FlowStatus::StepUnderflow) {
      grid.failures(i, j) += 1;
    }
  }

  if (!output_dir.empty()) {
    std::ofstream out(fs::path(output_dir) / "grid.csv");
    out << "sigma0";
    for (double tau : tau_list) out << ",tau=" << fmt_double(tau);
    out << '\n';
    for (size_t i = 0; i < sigma0_list.size(); ++i) {
      out << fmt_double(sigma0_list[i]);
      for (int j = 0; j < n_tau; ++j) {
        out << ',' << grid.failures(static_cast<int>(i), j);
      }
      out << '\n';
    }
  }
  return grid;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config " + path);
  nlohmann::json doc = nlohmann::json::parse(in);

  SweepConfig cfg;
  cfg.problem = problem_label_from_string(doc.at("problem").get<std::string>());
  if (doc.contains("l_slices")) cfg.l_slices = doc["l_slices"].get<int>();
  if (doc.contains("runs_per_point")) {
    cfg.runs_per_point = doc["runs_per_point"].get<int>();
  }
  int axes = 0;
  if (doc.contains("sigma0_list") && !doc["sigma0_list"].empty()) {
    cfg.axis = SweepAxis::Sigma0;
    cfg.axis_values = doc["sigma0_list"].get<std::vector<double>>();
    ++axes;
  }
  if (doc.contains("tau_list") && !doc["tau_list"].empty()) {
    cfg.axis = SweepAxis::Tau;
    cfg.axis_values = doc["tau_list"].get<std::vector<double>>();
    ++axes;
  }
  if (doc.contains("t_list") && !doc["t_list"].empty()) {
    cfg.axis = SweepAxis::ControlPeriod;
    cfg.axis_values = doc["t_list"].get<std::vector<double>>();
    ++axes;
  }
  if (axes != 1) {
    throw ConfigInvalid("config must set exactly one sweep axis");
  }
  if (doc.contains("sigma0")) cfg.fixed_sigma0 = doc["sigma0"].get<double>();
  if (doc.contains("tau")) cfg.base.tau = doc["tau"].get<double>();
  if (doc.contains("eta")) cfg.base.eta_override = doc["eta"].get<double>();
  if (doc.contains("max_iterations")) {
    cfg.base.max_iterations = doc["max_iterations"].get<long>();
  }
  if (doc.contains("initial_step")) {
    cfg.base.initial_step = doc["initial_step"].get<double>();
  }
  if (doc.contains("monotone_jitter")) {
    cfg.base.monotone_jitter = doc["monotone_jitter"].get<double>();
  }
  if (doc.contains("master_seed")) {
    cfg.master_seed = doc["master_seed"].get<std::uint64_t>();
  } else {
    cfg.master_seed = master_seed_from_env();
  }
  if (doc.contains("workers")) cfg.workers = doc["workers"].get<int>();
  if (doc.contains("output_dir")) {
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  return cfg;
}

std::uint64_t master_seed_from_env() {
  const char* env = std::getenv("QCL_SEED");
  if (env == nullptr || *env == '\0') return 0;
  return std::strtoull(env, nullptr, 10);
}

}  // namespace qcl
