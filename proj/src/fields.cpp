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

#include "qcl/fields.hpp"

#include <cmath>
#include <limits>

#include "qcl/rng.hpp"

namespace qcl {

namespace {

void gap_range(const QuantumSystem& sys, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = 0.0;
  for (const Transition& tr : sys.transitions) {
    lo = std::min(lo, tr.gap);
    hi = std::max(hi, tr.gap);
  }
  if (!(lo <= hi) || sys.transitions.empty()) {
    throw NoValidTransitions("system has no non-degenerate level pairs");
  }
}

}  // namespace

FieldInitSpec rfs_init_spec(const QuantumSystem& sys, double t_final,
                            double sigma0, std::uint64_t seed) {
  if (!(sigma0 > 0.0)) {
    throw ConfigInvalid("rfs_init_spec: target sigma0 must be positive");
  }
  FieldInitSpec spec;
  spec.zeta = t_final / 10.0;
  gap_range(sys, spec.omega_min, spec.omega_max);
  spec.target_sigma0 = sigma0;
  spec.seed = seed;
  return spec;
}

FieldInitSpec unit_peak_init_spec(const QuantumSystem& sys, double t_final,
                                  std::uint64_t seed) {
  FieldInitSpec spec;
  spec.zeta = t_final / 10.0;
  const RVec energies = hermitian_eig(sys.h0).values;
  spec.omega_min = 0.0;
  spec.omega_max = energies.maxCoeff() - energies.minCoeff();
  spec.target_sigma0 = 0.0;
  spec.a0 = 1.0;
  spec.seed = seed;
  return spec;
}

ControlField synthesize(const FieldInitSpec& spec, const QuantumSystem& sys,
                        double t_final, int l_slices,
                        std::vector<FieldDraw>* draw_log) {
  if (spec.m_modes < 1) throw ConfigInvalid("synthesize: m_modes < 1");
  if (!(spec.omega_min <= spec.omega_max)) {
    throw ConfigInvalid("synthesize: omega_min > omega_max");
  }
  if (l_slices < 1 || !(t_final > 0.0) || !(spec.zeta > 0.0)) {
    throw ConfigInvalid("synthesize: bad time grid");
  }

  const int K = sys.channels();
  const int L = l_slices;
  const double dt = t_final / L;

  ControlField field;
  field.t_final = t_final;
  field.values = RMat::Zero(K, L);

  std::vector<double> omegas(spec.m_modes), amps(spec.m_modes);
  for (int ch = 0; ch < K; ++ch) {
    SplitMix64 gen(substream(spec.seed, static_cast<std::uint64_t>(ch)));
    for (int attempt = 0;; ++attempt) {
      for (int m = 0; m < spec.m_modes; ++m) {
        omegas[m] = gen.uniform(spec.omega_min, spec.omega_max);
        amps[m] = gen.next_double();
      }
      double maxabs = 0.0;
      for (int l = 0; l < L; ++l) {
        const double t = (l + 1) * dt;  // slice right endpoints
        double sum = 0.0;
        for (int m = 0; m < spec.m_modes; ++m) {
          sum += amps[m] * std::cos(omegas[m] * t);
        }
        const double env =
            std::exp(-(t - t_final / 2.0) * (t - t_final / 2.0) /
                     (2.0 * spec.zeta * spec.zeta));
        field.values(ch, l) = env * sum;
        maxabs = std::max(maxabs, std::abs(field.values(ch, l)));
      }
      if (maxabs > 0.0) break;
      if (attempt >= 100) {
        throw ZeroFieldError("synthesize: channel cancelled to zero");
      }
    }
    if (draw_log != nullptr) {
      for (int m = 0; m < spec.m_modes; ++m) {
        draw_log->push_back(FieldDraw{ch, m, omegas[m], amps[m]});
      }
    }
  }

  if (spec.target_sigma0 > 0.0) {
    return rescale_to_rfs(field, sys, spec.target_sigma0);
  }
  field.values *= spec.a0;
  return field;
}

RVec mean_amplitude(const ControlField& field) {
  if (field.slices() < 1) {
    throw ConfigInvalid("mean_amplitude: empty field");
  }
  return field.values.cwiseAbs().rowwise().mean();
}

double rfs(const ControlField& field, const QuantumSystem& sys) {
  if (field.channels() != sys.channels()) {
    throw DimensionMismatch("rfs: field channels != system couplings");
  }
  if (sys.degenerate_coupled_pair) {
    throw NoValidTransitions(
        "rfs: a coupling connects degenerate levels; the relative field "
        "strength is ill-defined for this system");
  }
  const RVec mabs = mean_amplitude(field);
  double sum = 0.0;
  int counted = 0;
  for (const Transition& tr : sys.transitions) {
    for (int i = 0; i < sys.channels(); ++i) {
      if (tr.coupling_abs[i] > 0.0) {
        sum += mabs(i) * tr.coupling_abs[i] / tr.gap;
        ++counted;
      }
    }
  }
  if (counted == 0) {
    throw NoValidTransitions(
        "rfs: every coupled level pair is degenerate");
  }
  return sum / counted;
}

ControlField rescale_to_rfs(const ControlField& field,
                            const QuantumSystem& sys, double target) {
  if (!(target > 0.0)) {
    throw ConfigInvalid("rescale_to_rfs: target must be positive");
  }
  const double current = rfs(field, sys);
  if (!(current > 0.0)) {
    throw ZeroFieldError("rescale_to_rfs: field has zero RFS");
  }
  ControlField out = field;
  out.values *= target / current;
  return out;
}

}  // namespace qcl
