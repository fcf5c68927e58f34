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
#include <vector>

#include "qcl/dynamics.hpp"

namespace qcl {

/// Parameters for random initial-field synthesis,
///   eps(t) = A(t) sum_m a_m cos(w_m t),  A(t) = A0 exp(-(t-T/2)^2/(2 zeta^2)),
/// with w_m ~ U[omega_min, omega_max) and a_m ~ U[0, 1) per mode.
///
/// When target_sigma0 > 0 the overall amplitude A0 is chosen so the emitted
/// field has exactly that relative field strength; otherwise A0 = a0.
struct FieldInitSpec {
  int m_modes = 20;
  double zeta = 0.0;        // envelope width; factories default to T/10
  double omega_min = 0.0;
  double omega_max = 0.0;
  double target_sigma0 = 0.0;
  double a0 = 1.0;
  std::uint64_t seed = 0;
};

/// One recorded random draw, for audit logs.
struct FieldDraw {
  int channel = 0;
  int mode = 0;
  double omega = 0.0;
  double amplitude = 0.0;
};

/// RFS-targeted spec: envelope width T/10, M = 20 modes, frequencies
/// spanning the smallest and largest transition gaps of the system.
FieldInitSpec rfs_init_spec(const QuantumSystem& sys, double t_final,
                            double sigma0, std::uint64_t seed);

/// Fallback spec for systems without a usable RFS (degenerate gaps under
/// every coupling): unit envelope amplitude, frequencies spanning the
/// spectral width of H0.
FieldInitSpec unit_peak_init_spec(const QuantumSystem& sys, double t_final,
                                  std::uint64_t seed);

/// Draws the random field. Channel `c` consumes the substream
/// substream(seed, c), so channels are independent and reordering them
/// permutes the output. A channel whose mode sum cancels to exactly zero
/// is redrawn, up to 100 times, before ZeroFieldError is raised.
ControlField synthesize(const FieldInitSpec& spec, const QuantumSystem& sys,
                        double t_final, int l_slices,
                        std::vector<FieldDraw>* draw_log = nullptr);

/// Mean amplitude (1/L) sum_l |eps_l| per channel.
RVec mean_amplitude(const ControlField& field);

/// Dimensionless relative field strength: mean over counted transitions of
/// mean_amplitude * |mu_jk| / |E_j - E_k|, each channel contributing
/// through its own coupling operator. Transitions with zero coupling are
/// not counted. Throws NoValidTransitions when nothing can be counted.
double rfs(const ControlField& field, const QuantumSystem& sys);

/// Returns field * (target / rfs(field)); throws ZeroFieldError when the
/// current RFS vanishes.
ControlField rescale_to_rfs(const ControlField& field,
                            const QuantumSystem& sys, double target);

}  // namespace qcl
