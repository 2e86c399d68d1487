// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qrstab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <limits>

namespace qrstab::linalg {

CMatrix solve_lyapunov(const CMatrix& a, const CMatrix& q) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n) {
    throw DimensionError("Lyapunov operands " + shape_of(a) + " and " + shape_of(q));
  }
  Eigen::ComplexSchur<CMatrix> schur(a);
  if (schur.info() != Eigen::Success) throw NumericalError("complex Schur decomposition failed");
  const CMatrix& t = schur.matrixT();
  const CMatrix& u = schur.matrixU();

  // T^H Y + Y T = -U^H Q U, solved one column at a time: T^H + t_jj I is lower
  // triangular.
  const CMatrix rhs = -(u.adjoint() * q * u);
  CMatrix y = CMatrix::Zero(n, n);
  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < n; ++j) {
    CVector col = rhs.col(j);
    for (Eigen::Index k = 0; k < j; ++k) col -= t(k, j) * y.col(k);
    for (Eigen::Index r = 0; r < n; ++r) {
      Complex acc = col(r);
      for (Eigen::Index s = 0; s < r; ++s) acc -= std::conj(t(s, r)) * y(s, j);
      const Complex pivot = std::conj(t(r, r)) + t(j, j);
      if (std::abs(pivot) <= 64 * std::numeric_limits<double>::epsilon() * scale) {
        throw NumericalError("Lyapunov operator is singular (eigenvalues symmetric about the imaginary axis)");
      }
      y(r, j) = acc / pivot;
    }
  }
  return u * y * u.adjoint();
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

RVector hermitian_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  return es.eigenvalues();
}

double max_hermitian_eigenvalue(const CMatrix& m) { return hermitian_eigenvalues(m).maxCoeff(); }
double min_hermitian_eigenvalue(const CMatrix& m) { return hermitian_eigenvalues(m).minCoeff(); }

double spectral_abscissa(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
  return es.eigenvalues().real().maxCoeff();
}

double transfer_gain(const CMatrix& a, const CMatrix& b, const CMatrix& c, double omega) {
  const Eigen::Index n = a.rows();
  CMatrix shifted = Complex(0.0, omega) * CMatrix::Identity(n, n) - a;
  const CMatrix g = c * shifted.partialPivLu().solve(b);
  Eigen::JacobiSVD<CMatrix> svd(g);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace qrstab::linalg
