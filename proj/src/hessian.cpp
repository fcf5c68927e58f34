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

#include "qcl/hessian.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <fstream>
#include <thread>
#include <vector>

#include "qcl/io.hpp"

#include "json.hpp"

namespace qcl {

std::string to_string(HessianClass c) {
  switch (c) {
    case HessianClass::NegativeSemidefinite: return "NegativeSemidefinite";
    case HessianClass::PositiveSemidefinite: return "PositiveSemidefinite";
    case HessianClass::Indefinite: return "Indefinite";
    case HessianClass::Zero: return "Zero";
  }
  return "Unknown";
}

HessianReport hessian_of(const std::function<double(const RVec&)>& f,
                         const RVec& y0, double step, double grad_norm,
                         int workers, double j_scale) {
  if (!(step > 0.0)) throw ConfigInvalid("hessian: step must be positive");
  const int d = static_cast<int>(y0.size());
  HessianReport rep;
  rep.step = step;
  rep.matrix = RMat::Zero(d, d);

  // Upper triangle including the diagonal; the formula is symmetric in
  // (a, b), so the mirror is exact.
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<size_t>(d) * (d + 1) / 2);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) pairs.emplace_back(a, b);
  }

  const double inv = 1.0 / (4.0 * step * step);
  std::atomic<size_t> next{0};
  auto body = [&]() {
    RVec y = y0;
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= pairs.size()) break;
      const auto [a, b] = pairs[idx];
      y = y0;
      y(a) += step; y(b) += step;
      const double jpp = f(y);
      y = y0;
      y(a) += step; y(b) -= step;
      const double jpm = f(y);
      y = y0;
      y(a) -= step; y(b) += step;
      const double jmp = f(y);
      y = y0;
      y(a) -= step; y(b) -= step;
      const double jmm = f(y);
      rep.matrix(a, b) = (jpp - jpm - jmp + jmm) * inv;
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) rep.matrix(b, a) = rep.matrix(a, b);
  }

  if (rep.matrix.cwiseAbs().maxCoeff() == 0.0 && grad_norm > 1e-10) {
    throw StepTooSmall("hessian: differences vanished at nonzero gradient");
  }

  Eigen::SelfAdjointEigenSolver<RMat> solver(rep.matrix);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("hessian: eigensolver did not converge");
  }
  rep.eigenvalues = solver.eigenvalues();

  const double radius =
      std::max(std::abs(rep.eigenvalues(0)),
               std::abs(rep.eigenvalues(d - 1)));
  const double eps = std::numeric_limits<double>::epsilon();
  const double noise_floor =
      3.0 * std::sqrt(static_cast<double>(d)) * std::max(1.0, j_scale) *
      eps / (step * step);
  rep.tolerance = 1e-6 * std::max(1.0, radius) + noise_floor;
  const double lo = rep.eigenvalues(0);
  const double hi = rep.eigenvalues(d - 1);
  if (std::abs(lo) <= rep.tolerance && std::abs(hi) <= rep.tolerance) {
    rep.classification = HessianClass::Zero;
  } else if (hi <= rep.tolerance) {
    rep.classification = HessianClass::NegativeSemidefinite;
  } else if (lo >= -rep.tolerance) {
    rep.classification = HessianClass::PositiveSemidefinite;
  } else {
    rep.classification = HessianClass::Indefinite;
  }
  return rep;
}

HessianReport hessian_at(const ControlProblem& problem,
                         const ControlField& field, double step, int workers,
                         bool force) {
  const int d = field.channels() * field.slices();
  if (d > 1024 && !force) {
    throw ConfigInvalid(
        "hessian_at: dimension " + std::to_string(d) +
        " exceeds 1024; the cost is quadratic, pass force to proceed");
  }
  const int K = field.channels();
  const int L = field.slices();
  const auto f = [&](const RVec& y) {
    ControlField probe;
    probe.t_final = field.t_final;
    probe.values = Eigen::Map<const RMat>(y.data(), K, L);
    return evaluate(problem.objective,
                    final_propagator(problem.system, probe));
  };
  const RVec y0 =
      Eigen::Map<const RVec>(field.values.data(), field.values.size());

  const PropagationRecord rec = propagate(problem.system, field);
  const RMat g = gradient(problem.objective, problem.system, rec, field.dt());
  const double grad_norm = g.cwiseAbs().maxCoeff();
  const double j_scale =
      std::abs(evaluate(problem.objective, rec.final_u()));

  return hessian_of(f, y0, step, grad_norm, workers, j_scale);
}

void save_hessian_report(const HessianReport& report,
                         const std::string& eigen_csv_path,
                         const std::string& report_json_path) {
  std::ofstream csv(eigen_csv_path);
  if (!csv) throw IoError("save_hessian_report: cannot open " +
                          eigen_csv_path);
  csv << "index,eigenvalue\n";
  for (Eigen::Index j = 0; j < report.eigenvalues.size(); ++j) {
    csv << j << ',' << fmt_double(report.eigenvalues(j)) << '\n';
  }

  nlohmann::json out;
  out["classification"] = to_string(report.classification);
  out["tolerance"] = report.tolerance;
  out["step"] = report.step;
  std::ofstream js(report_json_path);
  if (!js) throw IoError("save_hessian_report: cannot open " +
                         report_json_path);
  js << out.dump(2) << '\n';
}

}  // namespace qcl
