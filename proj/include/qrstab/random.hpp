// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QRSTAB_RANDOM_HPP
#define QRSTAB_RANDOM_HPP

#include <random>

#include "qrstab/model.hpp"

namespace qrstab {

// Standard complex Gaussian entries (unit variance per component).
inline CMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = Complex(g(rng), g(rng));
  }
  return m;
}

inline LinearQuantumSystem random_system(int n, int m, int p, std::mt19937_64& rng) {
  LinearQuantumSystem s;
  const CMatrix a = random_gaussian(n, n, rng);
  const CMatrix b = random_gaussian(n, n, rng);
  s.M1 = 0.5 * (a + a.adjoint());
  s.M2 = 0.5 * (b + b.transpose());
  s.N1 = random_gaussian(m, n, rng);
  s.N2 = random_gaussian(m, n, rng);
  s.E1 = random_gaussian(p, n, rng);
  s.E2 = random_gaussian(p, n, rng);
  return s;
}

/// Hermitian positive-definite P with P = Sigma conj(P) Sigma.
inline CMatrix random_block_positive(int n, std::mt19937_64& rng) {
  const CMatrix a = random_gaussian(n, n, rng);
  const CMatrix b = random_gaussian(n, n, rng);
  CMatrix P = doubled_block(0.5 * (a + a.adjoint()), 0.5 * (b + b.transpose()));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(P, Eigen::EigenvaluesOnly);
  P += (1.0 - es.eigenvalues().minCoeff()) * CMatrix::Identity(2 * n, 2 * n);
  return P;
}

}  // namespace qrstab

#endif  // QRSTAB_RANDOM_HPP
