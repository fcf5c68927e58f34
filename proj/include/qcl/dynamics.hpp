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

#include <string>
#include <vector>

#include "qcl/linalg.hpp"

namespace qcl {

/// Sign with which the control terms enter the Hamiltonian:
///   Minus: H(t) = H0 - sum_i eps_i(t) H_i   (electric dipole convention)
///   Plus:  H(t) = H0 + sum_i eps_i(t) H_i
/// Carried explicitly so gradient formulas pick up the right sign instead
/// of silently negating operators.
enum class CouplingSign { Minus, Plus };

/// One pair of non-degenerate levels: |E_j - E_k| and the magnitude of
/// every coupling operator's (j,k) element. Pairs with (numerically) equal
/// energies are omitted; they have no transition frequency.
struct Transition {
  int j = 0;  // 0-based, j < k
  int k = 0;
  double gap = 0.0;
  std::vector<double> coupling_abs;
};

/// Field-free Hamiltonian plus K Hermitian coupling operators.
/// Atomic units throughout, hbar = 1.
struct QuantumSystem {
  CMat h0;
  std::vector<CMat> couplings;
  CouplingSign sign = CouplingSign::Minus;
  std::vector<Transition> transitions;
  // Some coupling element connects two degenerate levels; the relative
  // field strength is then ill-defined (zero transition frequency).
  bool degenerate_coupled_pair = false;

  int dim() const { return static_cast<int>(h0.rows()); }
  int channels() const { return static_cast<int>(couplings.size()); }
};

/// Rebuilds the transition table from scratch; make_system stores exactly
/// this, so the cached copy can always be checked against a recompute.
/// Optionally reports whether a nonzero coupling element connects two
/// degenerate levels.
std::vector<Transition> build_transition_table(
    const CMat& h0, const std::vector<CMat>& couplings,
    bool* degenerate_coupled_pair = nullptr);

/// Validates operators (square, Hermitian, finite, K >= 1) and fills in
/// the transition table.
QuantumSystem make_system(CMat h0, std::vector<CMat> couplings,
                          CouplingSign sign = CouplingSign::Minus);

/// Piecewise-constant control field: K channels by L slices on [0, T].
/// values(i, l) is eps_i on the interval (t_l, t_{l+1}] with t_l = l*dt.
struct ControlField {
  double t_final = 0.0;
  RMat values;

  int channels() const { return static_cast<int>(values.rows()); }
  int slices() const { return static_cast<int>(values.cols()); }
  double dt() const { return t_final / slices(); }
};

ControlField zero_field(int channels, int slices, double t_final);

/// Where within each slice the Heisenberg-picture couplings are sampled.
/// The continuous-time gradient kernel is exact only in the limit of
/// continuous fields; at finite L, sampling at slice midpoints cancels the
/// leading phase error of the slice integral, while right endpoints keep
/// the sample aligned with the slice boundary t_l.
enum class MuSampling { Midpoint, RightEndpoint };

inline constexpr MuSampling kDefaultMuSampling = MuSampling::Midpoint;

/// Everything the gradient formulas need from one propagation:
/// u[l] = U(t_l) with u[0] = I, and mu_t[i][l-1] = U^dag H_i U evaluated
/// at the chosen sample point of slice l.
struct PropagationRecord {
  std::vector<CMat> u;
  std::vector<std::vector<CMat>> mu_t;

  const CMat& final_u() const { return u.back(); }
};

/// Propagates the Schrodinger equation across all L slices, keeping every
/// intermediate propagator and the Heisenberg-picture couplings.
PropagationRecord propagate(const QuantumSystem& sys,
                            const ControlField& field,
                            MuSampling sampling = kDefaultMuSampling);

/// Memory-lean path returning only U(T); used when just the objective
/// value is needed (finite-difference probes, catalog checks).
CMat final_propagator(const QuantumSystem& sys, const ControlField& field);

/// Writes the field as CSV `t_index,channel,epsilon` plus a JSON sidecar
/// `<path>.json` holding {T, L, K}. Values round-trip bit-exactly.
void save_field(const ControlField& field, const std::string& csv_path);
ControlField load_field(const std::string& csv_path);

}  // namespace qcl
