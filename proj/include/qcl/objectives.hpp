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

#include "qcl/dynamics.hpp"
#include "qcl/linalg.hpp"

namespace qcl {

enum class ObjectiveKind {
  StateTransition,  // J = |<f|U(T)|i>|^2
  Observable,       // J = Tr(U^dag theta U rho0)
  GatePhaseDep,     // J = 1/2 - Re Tr(W^dag U) / (2N)
  GatePhaseIndep,   // J = 1 - |Tr(W^dag U)| / N
};

enum class Direction { Maximize, Minimize };

/// A control objective plus its data. Only the payload matching `kind` is
/// populated; the factories below validate state normalization, rho0
/// positivity/trace, Hermiticity of theta and unitarity of the target gate.
struct Objective {
  ObjectiveKind kind = ObjectiveKind::Observable;
  Direction direction = Direction::Maximize;
  CVec initial_state;  // StateTransition
  CVec final_state;    // StateTransition
  CMat rho0;           // Observable
  CMat theta;          // Observable
  CMat target_gate;    // gate kinds

  int dim() const;
};

Objective make_state_transition(CVec initial, CVec final_state,
                                Direction dir = Direction::Maximize);
Objective make_observable(CMat rho0, CMat theta,
                          Direction dir = Direction::Maximize);
Objective make_gate_phase_dep(CMat w, Direction dir = Direction::Minimize);
Objective make_gate_phase_indep(CMat w, Direction dir = Direction::Minimize);

/// Kinematic range of an objective over the unitary group, and the
/// convergence threshold derived from it.
struct LandscapeBounds {
  double j_min = 0.0;
  double j_max = 1.0;
  double eta = 0.0;  // 0.001 * (j_max - j_min) unless overridden
};

LandscapeBounds kinematic_bounds(const Objective& obj);

/// Objective value at a final-time propagator.
double evaluate(const Objective& obj, const CMat& u_t);

/// Gradient of J with respect to every field value, entry (i, l) being
/// dt * dJ/d eps_i(t_l). Throws PhaseIndepSingularity for the
/// phase-independent gate objective when |Tr(W^dag U)| vanishes.
RMat gradient(const Objective& obj, const QuantumSystem& sys,
              const PropagationRecord& rec, double dt);

}  // namespace qcl
