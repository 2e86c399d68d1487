// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qrstab/model.hpp"

namespace qrstab {

namespace {

constexpr double kSymmetryTol = 1e-10;

void require_shape(const CMatrix& m, const char* name, Eigen::Index rows,
                   Eigen::Index cols, const char* ref_name,
                   const CMatrix& ref) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(name) + " has shape " + shape_of(m) +
                         " incompatible with " + ref_name + " shape " +
                         shape_of(ref));
  }
}

}  // namespace

RMatrix signature_matrix(int n) {
  RMatrix j = RMatrix::Zero(2 * n, 2 * n);
  j.topLeftCorner(n, n).setIdentity();
  j.bottomRightCorner(n, n) = -RMatrix::Identity(n, n);
  return j;
}

RMatrix swap_matrix(int n) {
  RMatrix s = RMatrix::Zero(2 * n, 2 * n);
  s.topRightCorner(n, n).setIdentity();
  s.bottomLeftCorner(n, n).setIdentity();
  return s;
}

StructureMatrices StructureMatrices::make(int n) {
  if (n <= 0) throw std::invalid_argument("mode count must be positive");
  return {n, signature_matrix(n), swap_matrix(n)};
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

std::vector<Violation> validate_system(const LinearQuantumSystem& sys) {
  const Eigen::Index n = sys.M1.rows();
  if (n == 0) throw DimensionError("system has no modes (M1 is " + shape_of(sys.M1) + ")");
  require_shape(sys.M1, "M1", n, n, "M1", sys.M1);
  require_shape(sys.M2, "M2", n, n, "M1", sys.M1);
  require_shape(sys.N1, "N1", sys.N1.rows(), n, "M1", sys.M1);
  require_shape(sys.N2, "N2", sys.N1.rows(), n, "N1", sys.N1);
  require_shape(sys.E1, "E1", sys.E1.rows(), n, "M1", sys.M1);
  require_shape(sys.E2, "E2", sys.E1.rows(), n, "E1", sys.E1);

  std::vector<Violation> report;
  const double herm = max_abs(sys.M1 - sys.M1.adjoint());
  if (herm > kSymmetryTol * (1.0 + max_abs(sys.M1))) {
    report.push_back({"M1 not Hermitian", herm});
  }
  const double sym = max_abs(sys.M2 - sys.M2.transpose());
  if (sym > kSymmetryTol * (1.0 + max_abs(sys.M2))) {
    report.push_back({"M2 asymmetric", sym});
  }
  return report;
}

CMatrix doubled_block(const CMatrix& a, const CMatrix& b) {
  CMatrix out(2 * a.rows(), 2 * a.cols());
  out << a, b, b.conjugate(), a.conjugate();
  return out;
}

DoubledMatrices doubled_matrices(const LinearQuantumSystem& sys) {
  DoubledMatrices d;
  d.M = doubled_block(sys.M1, sys.M2);
  d.N = doubled_block(sys.N1, sys.N2);
  d.Etilde.resize(sys.E1.rows(), 2 * sys.E1.cols());
  d.Etilde << sys.E1, sys.E2;
  return d;
}

}  // namespace qrstab
