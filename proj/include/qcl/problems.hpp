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

#include "qcl/objectives.hpp"

namespace qcl {

enum class ProblemLabel { A, B, C, D, E, F, G };

std::string to_string(ProblemLabel label);
ProblemLabel problem_label_from_string(const std::string& s);

/// Exponent convention for the discrete-Fourier target gate of problem G.
enum class QftIndexing { ZeroBased, OneBased };

/// A catalog control problem: system, objective, time grid, and the
/// objective value at the known zero-field critical point when one exists.
struct ControlProblem {
  ProblemLabel label = ProblemLabel::A;
  QuantumSystem system;
  Objective objective;
  double t_final = 0.0;
  int l_slices = 0;
  std::optional<double> trap_value;
  std::string notes;

  double dt() const { return t_final / l_slices; }
  ControlField zero() const {
    return zero_field(system.channels(), l_slices, t_final);
  }
};

ControlProblem problem_a();
ControlProblem problem_b();
ControlProblem problem_c();
ControlProblem problem_d();
ControlProblem problem_e();
/// Randomized instance; deterministic per seed.
ControlProblem problem_f(std::uint64_t seed);
ControlProblem problem_g(double t_final,
                         QftIndexing indexing = QftIndexing::ZeroBased);

struct ProblemOptions {
  std::optional<double> t_final;
  std::optional<int> l_slices;
  std::uint64_t f_seed = 0;
  QftIndexing qft = QftIndexing::ZeroBased;
};

/// Dispatch by label, applying any time-grid overrides.
ControlProblem make_problem(ProblemLabel label, const ProblemOptions& opts);

/// JSON array of {label, N, K, T, L, objective, trap_value?, notes}.
std::string catalog_json();

}  // namespace qcl
