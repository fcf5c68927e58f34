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

#include <Eigen/Dense>
#include <complex>

#include "qcl/errors.hpp"

namespace qcl {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Relative tolerance for accepting a matrix as Hermitian.
inline constexpr double kHermTol = 1e-12;

/// Eigensystem of a Hermitian matrix: real eigenvalues in ascending order
/// and a unitary matrix whose columns are the matching eigenvectors.
struct EigenDecomposition {
  RVec values;
  CMat vectors;
};

inline bool all_finite(const CMat& a) { return a.allFinite(); }

/// max_{j,k} |A_{jk} - conj(A_{kj})|.
double hermiticity_defect(const CMat& a);

/// True when the Hermiticity defect is within rel_tol * max|A|.
bool is_hermitian(const CMat& a, double rel_tol = kHermTol);

/// max-abs entry of U^dag U - I.
double unitarity_defect(const CMat& u);

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
/// (A + A^dag)/2 before factorization.
///
/// Throws NotHermitian when the symmetry tolerance is violated and
/// ConvergenceFailure when the iterative solver gives up.
EigenDecomposition hermitian_eig(const CMat& a);

/// exp(i s H) for Hermitian H, computed as V exp(i s diag) V^dag so the
/// result is unitary by construction.
CMat expm_i_hermitian(const CMat& h, double s);

/// Hilbert-Schmidt inner product Tr(A^dag B).
Complex hs_inner(const CMat& a, const CMat& b);

/// Im Tr(A B) without forming the product.
double im_trace_product(const CMat& a, const CMat& b);

/// Tr(A B) without forming the product.
Complex trace_product(const CMat& a, const CMat& b);

}  // namespace qcl
