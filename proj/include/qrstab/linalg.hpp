// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QRSTAB_LINALG_HPP
#define QRSTAB_LINALG_HPP

#include "qrstab/types.hpp"

namespace qrstab::linalg {

/// Solves A^H X + X A + Q = 0 by complex Schur reduction (Bartels-Stewart).
/// Throws NumericalError when A and -A^H share an eigenvalue.
CMatrix solve_lyapunov(const CMatrix& a, const CMatrix& q);

CMatrix hermitian_part(const CMatrix& m);

RVector hermitian_eigenvalues(const CMatrix& m);
double max_hermitian_eigenvalue(const CMatrix& m);
double min_hermitian_eigenvalue(const CMatrix& m);

double spectral_abscissa(const CMatrix& m);

/// Largest singular value of C (i w I - A)^{-1} B.
double transfer_gain(const CMatrix& a, const CMatrix& b, const CMatrix& c,
                     double omega);

}  // namespace qrstab::linalg

#endif  // QRSTAB_LINALG_HPP
