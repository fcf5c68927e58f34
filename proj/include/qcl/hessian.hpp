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

#include <functional>
#include <string>

#include "qcl/problems.hpp"

namespace qcl {

enum class HessianClass {
  NegativeSemidefinite,
  PositiveSemidefinite,
  Indefinite,
  Zero,
};

std::string to_string(HessianClass c);

/// Dense central-difference Hessian of the objective with respect to the
/// flattened field, its spectrum, and a semidefiniteness call.
struct HessianReport {
  RMat matrix;        // (K*L) x (K*L), symmetrized
  RVec eigenvalues;   // ascending
  HessianClass classification = HessianClass::Zero;
  // 1e-6 * max(1, spectral radius) plus the round-off floor of the
  // difference scheme, so a shrinking step cannot turn noise into fake
  // curvature.
  double tolerance = 0.0;
  double step = 0.0;
};

/// Generic second-difference core over an arbitrary scalar function; the
/// classification tolerance scales with the spectral radius and with the
/// round-off floor j_scale * eps / step^2. `grad_norm` is only used to
/// detect difference underflow (all-zero matrix next to a visibly nonzero
/// gradient -> StepTooSmall).
HessianReport hessian_of(const std::function<double(const RVec&)>& f,
                         const RVec& y0, double step, double grad_norm,
                         int workers = 1, double j_scale = 1.0);

/// Hessian of a control problem's objective at a field. Refuses K*L > 1024
/// unless forced (cost grows with the square of the dimension).
HessianReport hessian_at(const ControlProblem& problem,
                         const ControlField& field, double step = 1e-4,
                         int workers = 1, bool force = false);

/// Writes eigenvalues as CSV and {classification, tolerance, step} as JSON.
void save_hessian_report(const HessianReport& report,
                         const std::string& eigen_csv_path,
                         const std::string& report_json_path);

}  // namespace qcl
