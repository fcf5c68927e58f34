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

#include "qcl/dynamics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qcl/io.hpp"

#include "json.hpp"

namespace qcl {

namespace {

// Level energies in the basis the coupling operators are expressed in.
// All catalog systems have a diagonal H0, in which case the diagonal is
// used as-is; otherwise the eigenbasis is used and the couplings are
// rotated into it.
void energies_and_couplings(const CMat& h0, const std::vector<CMat>& couplings,
                            RVec& energies, std::vector<CMat>& rotated) {
  const Eigen::Index n = h0.rows();
  double offdiag = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (j != k) offdiag = std::max(offdiag, std::abs(h0(j, k)));
    }
  }
  const double scale = std::max(1.0, h0.cwiseAbs().maxCoeff());
  if (offdiag <= 1e-12 * scale) {
    energies = h0.diagonal().real();
    rotated = couplings;
    return;
  }
  const EigenDecomposition eig = hermitian_eig(h0);
  energies = eig.values;
  rotated.clear();
  rotated.reserve(couplings.size());
  for (const CMat& c : couplings) {
    rotated.push_back(eig.vectors.adjoint() * c * eig.vectors);
  }
}

}  // namespace

std::vector<Transition> build_transition_table(
    const CMat& h0, const std::vector<CMat>& couplings,
    bool* degenerate_coupled_pair) {
  RVec energies;
  std::vector<CMat> rotated;
  energies_and_couplings(h0, couplings, energies, rotated);

  const int n = static_cast<int>(energies.size());
  const double espread =
      energies.maxCoeff() - energies.minCoeff();
  const double degeneracy_tol = 1e-9 * std::max(1.0, espread);
  if (degenerate_coupled_pair != nullptr) *degenerate_coupled_pair = false;

  std::vector<Transition> table;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double gap = std::abs(energies(j) - energies(k));
      if (gap <= degeneracy_tol) {
        if (degenerate_coupled_pair != nullptr) {
          for (const CMat& c : rotated) {
            if (std::abs(c(j, k)) > 0.0) *degenerate_coupled_pair = true;
          }
        }
        continue;
      }
      Transition tr;
      tr.j = j;
      tr.k = k;
      tr.gap = gap;
      tr.coupling_abs.reserve(rotated.size());
      for (const CMat& c : rotated) {
        tr.coupling_abs.push_back(std::abs(c(j, k)));
      }
      table.push_back(std::move(tr));
    }
  }
  return table;
}

QuantumSystem make_system(CMat h0, std::vector<CMat> couplings,
                          CouplingSign sign) {
  if (h0.rows() != h0.cols() || h0.rows() < 1) {
    throw DimensionMismatch("make_system: H0 must be square and non-empty");
  }
  if (couplings.empty()) {
    throw DimensionMismatch("make_system: at least one coupling operator");
  }
  if (!all_finite(h0) || !is_hermitian(h0)) {
    throw NotHermitian("make_system: H0 is not Hermitian");
  }
  for (const CMat& c : couplings) {
    if (c.rows() != h0.rows() || c.cols() != h0.cols()) {
      throw DimensionMismatch("make_system: coupling shape mismatch");
    }
    if (!all_finite(c) || !is_hermitian(c)) {
      throw NotHermitian("make_system: coupling operator is not Hermitian");
    }
  }
  QuantumSystem sys;
  sys.h0 = std::move(h0);
  sys.couplings = std::move(couplings);
  sys.sign = sign;
  sys.transitions = build_transition_table(sys.h0, sys.couplings,
                                           &sys.degenerate_coupled_pair);
  return sys;
}

ControlField zero_field(int channels, int slices, double t_final) {
  if (channels < 1 || slices < 1 || !(t_final > 0.0)) {
    throw ConfigInvalid("zero_field: bad dimensions");
  }
  ControlField f;
  f.t_final = t_final;
  f.values = RMat::Zero(channels, slices);
  return f;
}

namespace {

void check_field(const QuantumSystem& sys, const ControlField& field) {
  if (field.channels() != sys.channels()) {
    throw DimensionMismatch("propagate: field channels != system couplings");
  }
  if (field.slices() < 1 || !(field.dt() > 0.0)) {
    throw NonFiniteField("propagate: empty field or non-positive dt");
  }
  if (!field.values.allFinite()) {
    throw NonFiniteField("propagate: field has non-finite values");
  }
}

// exp(-i H dt) with H = H0 + csign * sum_i eps_i H_i for the slice.
CMat slice_propagator(const QuantumSystem& sys, double csign,
                      const RVec& eps, double dt, CMat& scratch) {
  scratch = sys.h0;
  for (int i = 0; i < sys.channels(); ++i) {
    scratch.noalias() += (csign * eps(i)) * sys.couplings[i];
  }
  return expm_i_hermitian(scratch, -dt);
}

}  // namespace

PropagationRecord propagate(const QuantumSystem& sys,
                            const ControlField& field, MuSampling sampling) {
  check_field(sys, field);
  const int n = sys.dim();
  const int K = sys.channels();
  const int L = field.slices();
  const double dt = field.dt();
  const double csign = (sys.sign == CouplingSign::Minus) ? -1.0 : 1.0;

  PropagationRecord rec;
  rec.u.resize(L + 1);
  rec.u[0] = CMat::Identity(n, n);
  rec.mu_t.assign(K, std::vector<CMat>(L));

  CMat scratch(n, n);
  CMat tmp(n, n);
  CMat half(n, n), umid(n, n);
  for (int l = 1; l <= L; ++l) {
    if (sampling == MuSampling::Midpoint) {
      // Half-slice steps share one factorization: U_slice = U_half^2 and
      // the midpoint propagator is U_half * U(t_{l-1}).
      half = slice_propagator(sys, csign, field.values.col(l - 1), 0.5 * dt,
                              scratch);
      umid.noalias() = half * rec.u[l - 1];
      rec.u[l].noalias() = half * umid;
      for (int i = 0; i < K; ++i) {
        tmp.noalias() = sys.couplings[i] * umid;
        rec.mu_t[i][l - 1].noalias() = umid.adjoint() * tmp;
      }
    } else {
      const CMat ul = slice_propagator(sys, csign, field.values.col(l - 1),
                                       dt, scratch);
      rec.u[l].noalias() = ul * rec.u[l - 1];
      for (int i = 0; i < K; ++i) {
        tmp.noalias() = sys.couplings[i] * rec.u[l];
        rec.mu_t[i][l - 1].noalias() = rec.u[l].adjoint() * tmp;
      }
    }
  }
  return rec;
}

CMat final_propagator(const QuantumSystem& sys, const ControlField& field) {
  check_field(sys, field);
  const int n = sys.dim();
  const int L = field.slices();
  const double dt = field.dt();
  const double csign = (sys.sign == CouplingSign::Minus) ? -1.0 : 1.0;

  CMat u = CMat::Identity(n, n);
  CMat scratch(n, n);
  for (int l = 1; l <= L; ++l) {
    u = slice_propagator(sys, csign, field.values.col(l - 1), dt, scratch) * u;
  }
  return u;
}

void save_field(const ControlField& field, const std::string& csv_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("save_field: cannot open " + csv_path);
  csv << "t_index,channel,epsilon\n";
  for (int l = 0; l < field.slices(); ++l) {
    for (int i = 0; i < field.channels(); ++i) {
      csv << (l + 1) << ',' << (i + 1) << ','
          << fmt_double(field.values(i, l)) << '\n';
    }
  }
  csv.close();

  nlohmann::json sidecar;
  sidecar["T"] = field.t_final;
  sidecar["L"] = field.slices();
  sidecar["K"] = field.channels();
  std::ofstream js(csv_path + ".json");
  if (!js) throw IoError("save_field: cannot open " + csv_path + ".json");
  js << sidecar.dump(2) << '\n';
}

ControlField load_field(const std::string& csv_path) {
  std::ifstream js(csv_path + ".json");
  if (!js) throw IoError("load_field: missing sidecar " + csv_path + ".json");
  nlohmann::json sidecar = nlohmann::json::parse(js);
  ControlField field;
  field.t_final = sidecar.at("T").get<double>();
  const int L = sidecar.at("L").get<int>();
  const int K = sidecar.at("K").get<int>();
  if (L < 1 || K < 1 || !(field.t_final > 0.0)) {
    throw IoError("load_field: invalid sidecar dimensions");
  }
  field.values = RMat::Zero(K, L);

  std::ifstream csv(csv_path);
  if (!csv) throw IoError("load_field: cannot open " + csv_path);
  std::string line;
  if (!std::getline(csv, line) || line != "t_index,channel,epsilon") {
    throw IoError("load_field: bad header in " + csv_path);
  }
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
        !std::getline(ss, c)) {
      throw IoError("load_field: malformed row: " + line);
    }
    const int l = std::stoi(a);
    const int i = std::stoi(b);
    if (l < 1 || l > L || i < 1 || i > K) {
      throw IoError("load_field: index out of range: " + line);
    }
    field.values(i - 1, l - 1) = parse_double(c);
  }
  return field;
}

}  // namespace qcl
