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

#include "qcl/linalg.hpp"

#include <cmath>

namespace qcl {

double hermiticity_defect(const CMat& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMat& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.cwiseAbs().maxCoeff();
  return hermiticity_defect(a) <= rel_tol * scale;
}

double unitarity_defect(const CMat& u) {
  CMat g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

EigenDecomposition hermitian_eig(const CMat& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("hermitian_eig: matrix is not square");
  }
  if (!all_finite(a)) {
    throw NotHermitian("hermitian_eig: non-finite entries");
  }
  if (!is_hermitian(a)) {
    throw NotHermitian("hermitian_eig: symmetry tolerance exceeded");
  }
  const CMat sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("hermitian_eig: eigensolver did not converge");
  }
  return EigenDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

CMat expm_i_hermitian(const CMat& h, double s) {
  if (!std::isfinite(s)) {
    throw Error("expm_i_hermitian: scale factor is not finite");
  }
  const EigenDecomposition eig = hermitian_eig(h);
  const Eigen::Index n = h.rows();
  CVec phases(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    phases(j) = std::polar(1.0, s * eig.values(j));
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

Complex hs_inner(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("hs_inner: shape mismatch");
  }
  return (a.conjugate().cwiseProduct(b)).sum();
}

Complex trace_product(const CMat& a, const CMat& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) {
    throw DimensionMismatch("trace_product: shape mismatch");
  }
  return (a.cwiseProduct(b.transpose())).sum();
}

double im_trace_product(const CMat& a, const CMat& b) {
  return trace_product(a, b).imag();
}

}  // namespace qcl
