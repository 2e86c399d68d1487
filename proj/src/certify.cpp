// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qrstab/certify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "qrstab/linalg.hpp"

namespace qrstab {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "Certified";
    case Verdict::FailedHurwitz: return "FailedHurwitz";
    case Verdict::FailedSmallGain: return "FailedSmallGain";
  }
  return "?";
}

Verdict verdict_from_string(std::string_view s) {
  if (s == "Certified") return Verdict::Certified;
  if (s == "FailedHurwitz") return Verdict::FailedHurwitz;
  if (s == "FailedSmallGain") return Verdict::FailedSmallGain;
  throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

CMatrix build_F(const CMatrix& M, const CMatrix& N) {
  const Eigen::Index n2 = M.rows();
  if (M.cols() != n2 || n2 % 2 != 0) throw DimensionError("M must be square 2n x 2n, got " + shape_of(M));
  if (N.cols() != n2 || N.rows() % 2 != 0) {
    throw DimensionError("N shape " + shape_of(N) + " incompatible with M shape " + shape_of(M));
  }
  const CMatrix Jn = signature_matrix(static_cast<int>(n2 / 2)).cast<Complex>();
  const CMatrix Jm = signature_matrix(static_cast<int>(N.rows() / 2)).cast<Complex>();
  return -1i * Jn * M - 0.5 * Jn * N.adjoint() * Jm * N;
}

HurwitzResult is_hurwitz(const CMatrix& F, double tol) {
  if (F.rows() != F.cols()) throw DimensionError("F must be square, got " + shape_of(F));
  if (F.size() == 0) return {false, 0.0};
  const double abscissa = linalg::spectral_abscissa(F);
  return {abscissa < -tol, abscissa};
}

namespace {

constexpr double kBisectionRelWidth = 1e-9;
constexpr int kBisectionMaxIter = 200;
constexpr double kGridCheckRel = 1e-6;

// Largest gain over the imaginary parts of the Hamiltonian's eigenvalues. When
// delta is below the norm some eigenvalue sits on the imaginary axis at a
// frequency where a singular value equals delta, so the returned gain is
// >= delta. Every evaluated gain is a valid lower bound.
double hamiltonian_witness(const CMatrix& F, const CMatrix& BBh, const CMatrix& ChC,
                           const CMatrix& B, const CMatrix& C, double delta) {
  const Eigen::Index n = F.rows();
  CMatrix H(2 * n, 2 * n);
  H << F, BBh / delta, -ChC / delta, -F.adjoint();
  Eigen::ComplexEigenSolver<CMatrix> es(H, false);
  if (es.info() != Eigen::Success) throw NumericalError("Hamiltonian eigensolver failed");
  double best = 0.0;
  for (const Complex& ev : es.eigenvalues()) {
    best = std::max(best, linalg::transfer_gain(F, B, C, ev.imag()));
  }
  return best;
}

}  // namespace

double hinf_norm(const CMatrix& F, const CMatrix& B, const CMatrix& C) {
  if (F.rows() != F.cols() || B.rows() != F.rows() || C.cols() != F.rows()) {
    throw DimensionError("transfer function operands F " + shape_of(F) + ", B " + shape_of(B) +
                         ", C " + shape_of(C));
  }
  const HurwitzResult hw = is_hurwitz(F);
  if (!hw.hurwitz) throw NumericalError("norm undefined: F is not Hurwitz");
  if (max_abs(B) == 0.0 || max_abs(C) == 0.0) return 0.0;

  Eigen::ComplexEigenSolver<CMatrix> fes(F, false);
  double omega_scale = 1.0;
  double lo = linalg::transfer_gain(F, B, C, 0.0);
  for (const Complex& ev : fes.eigenvalues()) {
    omega_scale = std::max(omega_scale, std::abs(ev));
    lo = std::max(lo, linalg::transfer_gain(F, B, C, ev.imag()));
  }
  for (int s = -40; s <= 40 && lo == 0.0; ++s) {
    lo = std::max(lo, linalg::transfer_gain(F, B, C, omega_scale * std::pow(10.0, s / 10.0)));
    lo = std::max(lo, linalg::transfer_gain(F, B, C, -omega_scale * std::pow(10.0, s / 10.0)));
  }
  if (lo == 0.0) return 0.0;

  const CMatrix BBh = B * B.adjoint();
  const CMatrix ChC = C.adjoint() * C;

  double hi = 2.0 * lo;
  int iter = 0;
  for (;; ++iter) {
    if (iter >= kBisectionMaxIter) throw NumericalError("H-infinity bisection: no upper bound found");
    const double w = hamiltonian_witness(F, BBh, ChC, B, C, hi);
    if (w < hi) break;
    lo = std::max(lo, w);
    hi = 2.0 * std::max(hi, w);
  }
  while (hi - lo > kBisectionRelWidth * hi) {
    if (++iter >= kBisectionMaxIter) {
      throw NumericalError("H-infinity bisection did not converge in " +
                           std::to_string(kBisectionMaxIter) + " iterations");
    }
    const double mid = 0.5 * (lo + hi);
    const double w = hamiltonian_witness(F, BBh, ChC, B, C, mid);
    if (w >= mid) {
      lo = std::min(std::max(lo, w), hi);
    } else {
      lo = std::max(lo, w);
      hi = mid;
    }
  }

  // coarse sanity check; the dense oracle lives in the tests
  double grid_peak = 0.0;
  for (int s = -300; s <= 300; ++s) {
    const double omega = omega_scale * std::pow(10.0, s / 100.0);
    grid_peak = std::max({grid_peak, linalg::transfer_gain(F, B, C, omega),
                          linalg::transfer_gain(F, B, C, -omega)});
  }
  if (grid_peak > hi * (1.0 + kGridCheckRel)) {
    throw NumericalError("H-infinity bisection result " + std::to_string(hi) +
                         " below frequency-grid peak " + std::to_string(grid_peak));
  }
  return hi;
}

HinfCondition hinf_condition(const DoubledMatrices& d, const CMatrix& F, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const int n = static_cast<int>(F.rows() / 2);
  const CMatrix J = signature_matrix(n).cast<Complex>();
  const CMatrix S = swap_matrix(n).cast<Complex>();
  const CMatrix& E = d.Etilde;

  HinfCondition out;
  out.primary = hinf_norm(F, J * S * E.transpose(), E.conjugate() * S);
  out.reduced = hinf_norm(F, J * E.adjoint(), E);
  if (std::abs(out.primary - out.reduced) > 1e-6 * (1.0 + out.reduced)) {
    throw NumericalError("internal consistency: primary and reduced H-infinity norms differ (" +
                         std::to_string(out.primary) + " vs " + std::to_string(out.reduced) + ")");
  }
  out.pass = out.reduced < gamma / 2.0;
  return out;
}

QmiOperands qmi_operands(const DoubledMatrices& d, double gamma) {
  const int n = static_cast<int>(d.Etilde.cols() / 2);
  const CMatrix J = signature_matrix(n).cast<Complex>();
  const CMatrix S = swap_matrix(n).cast<Complex>();
  return {2.0 * J * S * d.Etilde.transpose(), (1.0 / gamma) * d.Etilde.conjugate() * S};
}

CMatrix qmi_lhs(const CMatrix& F, const QmiOperands& ops, const CMatrix& P) {
  return F.adjoint() * P + P * F + P * ops.B * ops.B.adjoint() * P + ops.C.adjoint() * ops.C;
}

double default_regularization(const DoubledMatrices& d, double gamma) {
  const QmiOperands ops = qmi_operands(d, gamma);
  return 1e-6 * (1.0 + (ops.C.adjoint() * ops.C).norm());
}

namespace {

// Positive square root of A^2 for Hermitian A.
CMatrix hermitian_abs(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitian_part(a));
  return es.eigenvectors() * es.eigenvalues().cwiseAbs().cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

CMatrix sigma_conjugate(const CMatrix& m, const CMatrix& S) { return S * m.conjugate() * S; }

struct NewtonResult {
  std::optional<CMatrix> P;
  int iterations = 0;
  double residual = 0.0;
  std::string diagnostic;
};

// Stabilizing solution of F^H P + P F + P W P + Q = 0 by Newton iteration
// started from the Lyapunov solution of F^H P + P F + Q = 0.
NewtonResult newton_riccati(const CMatrix& F, const CMatrix& W, const CMatrix& Q, double tol) {
  NewtonResult out;
  auto residual = [&](const CMatrix& X) { return F.adjoint() * X + X * F + X * W * X + Q; };
  CMatrix P = linalg::hermitian_part(linalg::solve_lyapunov(F, Q));
  out.residual = residual(P).norm();
  constexpr int kMaxNewton = 100;
  while (out.residual > tol) {
    if (out.iterations >= kMaxNewton) {
      out.diagnostic = "Newton iteration did not converge in 100 steps (Riccati residual " +
                       std::to_string(out.residual) + ")";
      return out;
    }
    ++out.iterations;
    const CMatrix A = F + W * P;
    if (linalg::spectral_abscissa(A) >= 0.0) {
      out.diagnostic = "closed-loop matrix lost stability at Newton step " +
                       std::to_string(out.iterations) + " (Riccati residual " +
                       std::to_string(out.residual) + ")";
      return out;
    }
    P = linalg::hermitian_part(linalg::solve_lyapunov(A, Q - P * W * P));
    out.residual = residual(P).norm();
    if (!std::isfinite(out.residual)) {
      out.diagnostic = "Newton iteration diverged";
      return out;
    }
  }
  out.P = std::move(P);
  return out;
}

}  // namespace

QmiSolution solve_qmi(const DoubledMatrices& d, const CMatrix& F, double gamma, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("regularization must be positive");
  const Eigen::Index n2 = F.rows();
  const int n = static_cast<int>(n2 / 2);
  const QmiOperands ops = qmi_operands(d, gamma);
  const CMatrix S = swap_matrix(n).cast<Complex>();
  const CMatrix W = ops.B * ops.B.adjoint();
  const CMatrix Q = ops.C.adjoint() * ops.C;
  const double tol = 1e-10 * (1.0 + Q.norm());

  // Split W and Q into parts even and odd under X -> Sigma X^# Sigma. For P of
  // block form the QMI reads even(P) + odd(P) < 0 with
  //   even(P) = F^H P + P F + P W_e P + Q_e,  odd(P) = P W_o P + Q_o,
  // and even(P) + |odd(P)| + eps I = 0 forces the QMI with margin eps. The
  // equation is solved as a sequence of Riccati equations in which |odd| is
  // frozen at the previous sweep; each has an even right-hand side, so its
  // stabilizing solution is of block form.
  const CMatrix We = 0.5 * (W + sigma_conjugate(W, S));
  const CMatrix Wo = 0.5 * (W - sigma_conjugate(W, S));
  const CMatrix Qe = 0.5 * (Q + sigma_conjugate(Q, S));
  const CMatrix Qo = 0.5 * (Q - sigma_conjugate(Q, S));
  const bool even = max_abs(Wo) <= 1e-14 * (1.0 + max_abs(W)) && max_abs(Qo) <= 1e-14 * (1.0 + max_abs(Q));
  const CMatrix I = CMatrix::Identity(n2, n2);

  QmiSolution sol;
  CMatrix P = CMatrix::Zero(n2, n2);
  constexpr int kMaxSweeps = 200;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    CMatrix odd = P * Wo * P + Qo;
    CMatrix bound = hermitian_abs(odd);
    bound = 0.5 * (bound + sigma_conjugate(bound, S));
    const NewtonResult nr = newton_riccati(F, We, Qe + bound + eps * I, tol);
    sol.iterations += nr.iterations;
    sol.riccati_residual = nr.residual;
    ++sol.sweeps;
    if (!nr.P) {
      sol.diagnostic = nr.diagnostic;
      return sol;
    }
    CMatrix next = linalg::hermitian_part(0.5 * (*nr.P + sigma_conjugate(*nr.P, S)));
    const double change = (next - P).norm();
    P = std::move(next);
    if (even || change <= 1e-13 * (1.0 + P.norm())) break;
  }

  sol.qmi_max_eigenvalue = linalg::max_hermitian_eigenvalue(qmi_lhs(F, ops, P));
  const double pmin = linalg::min_hermitian_eigenvalue(P);
  if (!(pmin > 0.0)) {
    sol.diagnostic = "solution is not positive definite (min eigenvalue " + std::to_string(pmin) +
                     ", Riccati residual " + std::to_string(sol.riccati_residual) + ")";
    return sol;
  }
  if (!(sol.qmi_max_eigenvalue < 0.0)) {
    sol.diagnostic = "matrix inequality not strict after " + std::to_string(sol.sweeps) +
                     " sweeps (max eigenvalue " + std::to_string(sol.qmi_max_eigenvalue) +
                     ", Riccati residual " + std::to_string(sol.riccati_residual) + ")";
    return sol;
  }
  sol.P = std::move(P);
  return sol;
}

CVector mu_constants(const CMatrix& P, const CMatrix& Etilde) {
  if (P.rows() != P.cols() || Etilde.cols() != P.rows()) {
    throw DimensionError("P " + shape_of(P) + " incompatible with Etilde " + shape_of(Etilde));
  }
  const int n = static_cast<int>(P.rows() / 2);
  const CMatrix J = signature_matrix(n).cast<Complex>();
  const CMatrix S = swap_matrix(n).cast<Complex>();
  const CMatrix kernel = 2.0 * J * P * S * J;
  CVector mu(Etilde.rows());
  for (Eigen::Index i = 0; i < Etilde.rows(); ++i) {
    mu(i) = (Etilde.row(i) * kernel * Etilde.row(i).transpose())(0, 0);
  }
  return mu;
}

CertificateConstants certificate_constants(const DoubledMatrices& d, const CMatrix& F,
                                           const SectorBounds& bounds, const CMatrix& P,
                                           const CVector& mu) {
  Eigen::LLT<CMatrix> llt(linalg::hermitian_part(P));
  if (llt.info() != Eigen::Success) throw NumericalError("P is not positive definite");

  const int n = static_cast<int>(P.rows() / 2);
  const int m = static_cast<int>(d.N.rows() / 2);
  const CMatrix J = signature_matrix(n).cast<Complex>();
  CMatrix upper = CMatrix::Zero(2 * m, 2 * m);
  upper.topLeftCorner(m, m).setIdentity();

  CertificateConstants k;
  k.lambda_tilde = (P * J * d.N.adjoint() * upper * d.N * J).trace().real();
  k.lambda = k.lambda_tilde + bounds.delta1 + mu.squaredNorm() / 4.0 + bounds.delta2;

  // c = lambda_min(-L^{-1} Q L^{-H}) with P = L L^H
  const CMatrix lhs = linalg::hermitian_part(qmi_lhs(F, qmi_operands(d, bounds.gamma), P));
  const auto L = llt.matrixL();
  const CMatrix right = L.solve(lhs).adjoint();
  const CMatrix scaled = L.solve(right);
  k.c = -linalg::max_hermitian_eigenvalue(scaled);
  if (!(k.c > 0.0)) throw NumericalError("P does not satisfy the strict matrix inequality");

  const RVector ev = linalg::hermitian_eigenvalues(P);
  k.c1 = ev.maxCoeff() / ev.minCoeff();
  k.c2 = k.c;
  k.c3 = k.lambda / (k.c * ev.minCoeff());
  return k;
}

namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

StabilityCertificate certify(const LinearQuantumSystem& sys, const SectorBounds& bounds,
                             const CertifyOptions& opts) {
  stage("validate_system", [&] {
    bounds.validate();
    const auto report = validate_system(sys);
    if (!report.empty()) {
      throw std::invalid_argument(report.front().what + ", residual " +
                                  std::to_string(report.front().residual));
    }
    return 0;
  });
  const DoubledMatrices d = doubled_matrices(sys);

  StabilityCertificate cert;
  cert.F = stage("build_F", [&] { return build_F(d.M, d.N); });
  const HurwitzResult hw = stage("is_hurwitz", [&] { return is_hurwitz(cert.F); });
  cert.spectral_abscissa = hw.abscissa;
  if (!hw.hurwitz) {
    cert.hinf_primary = cert.hinf_reduced = std::numeric_limits<double>::infinity();
    cert.verdict = Verdict::FailedHurwitz;
    return cert;
  }

  const HinfCondition hc = stage("hinf_condition", [&] { return hinf_condition(d, cert.F, bounds.gamma); });
  cert.hinf_primary = hc.primary;
  cert.hinf_reduced = hc.reduced;
  if (!hc.pass) {
    cert.verdict = Verdict::FailedSmallGain;
    return cert;
  }

  // The default eps shrinks by 100x per retry, at most four times.
  cert.eps = opts.eps.value_or(default_regularization(d, bounds.gamma));
  QmiSolution sol = stage("solve_qmi", [&] { return solve_qmi(d, cert.F, bounds.gamma, cert.eps); });
  for (int retry = 0; !sol.P && !opts.eps && retry < 4; ++retry) {
    cert.eps *= 1e-2;
    sol = stage("solve_qmi", [&] { return solve_qmi(d, cert.F, bounds.gamma, cert.eps); });
  }
  if (!sol.P) throw StageError("solve_qmi", "infeasible: " + sol.diagnostic);
  cert.P = *sol.P;
  cert.qmi_max_eigenvalue = sol.qmi_max_eigenvalue;

  cert.mu = stage("mu_constants", [&] { return mu_constants(*cert.P, d.Etilde); });
  const CertificateConstants k = stage("certificate_constants", [&] {
    return certificate_constants(d, cert.F, bounds, *cert.P, cert.mu);
  });
  cert.lambda_tilde = k.lambda_tilde;
  cert.lambda = k.lambda;
  cert.c = k.c;
  cert.c1 = k.c1;
  cert.c2 = k.c2;
  cert.c3 = k.c3;
  cert.verdict = Verdict::Certified;
  return cert;
}

}  // namespace qrstab
