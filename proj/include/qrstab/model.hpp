// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QRSTAB_MODEL_HPP
#define QRSTAB_MODEL_HPP

#include <string>
#include <vector>

#include "qrstab/types.hpp"

namespace qrstab {

/// Signature matrix J = diag(I, -I) and block swap Sigma = [[0, I], [I, 0]]
/// for n modes in the doubled-up (a; a#) representation.
struct StructureMatrices {
  int n = 0;
  RMatrix J;
  RMatrix Sigma;

  static StructureMatrices make(int n);
};

RMatrix signature_matrix(int n);
RMatrix swap_matrix(int n);

/// Known part of an open quantum system: quadratic Hamiltonian blocks M1, M2,
/// linear coupling blocks N1, N2 and the perturbation channel z = E1 a + E2 a#.
/// The scattering matrix is the identity and is not stored.
struct LinearQuantumSystem {
  CMatrix M1;  // n x n, Hermitian
  CMatrix M2;  // n x n, symmetric
  CMatrix N1;  // m x n
  CMatrix N2;  // m x n
  CMatrix E1;  // p x n
  CMatrix E2;  // p x n

  int modes() const { return static_cast<int>(M1.rows()); }
  int couplings() const { return static_cast<int>(N1.rows()); }
  int channels() const { return static_cast<int>(E1.rows()); }
};

struct Violation {
  std::string what;  // e.g. "M2 asymmetric"
  double residual = 0.0;
};

/// Empty iff M1 is Hermitian and M2 symmetric within
/// 1e-10 * (1 + max |entry|). Throws DimensionError on inconsistent blocks.
std::vector<Violation> validate_system(const LinearQuantumSystem& sys);

struct DoubledMatrices {
  CMatrix M;       // 2n x 2n
  CMatrix N;       // 2m x 2n
  CMatrix Etilde;  // p x 2n, row i is the channel z_i

  CMatrix channel_row(int i) const { return Etilde.row(i); }
};

DoubledMatrices doubled_matrices(const LinearQuantumSystem& sys);

/// [[A, B], [conj(B), conj(A)]]
CMatrix doubled_block(const CMatrix& a, const CMatrix& b);

/// Max-entry magnitude, 0 for empty matrices.
double max_abs(const CMatrix& m);

}  // namespace qrstab

#endif  // QRSTAB_MODEL_HPP
