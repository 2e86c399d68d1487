// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QRSTAB_CERTIFY_HPP
#define QRSTAB_CERTIFY_HPP

#include <optional>
#include <string>
#include <string_view>

#include "qrstab/model.hpp"
#include "qrstab/perturbation.hpp"
#include "qrstab/types.hpp"

namespace qrstab {

enum class Verdict { Certified, FailedHurwitz, FailedSmallGain };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

/// Raised when a pipeline stage fails; `stage` names it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StabilityCertificate {
  CMatrix F;
  double hinf_primary = 0.0;  // +inf when F is not Hurwitz
  double hinf_reduced = 0.0;
  double spectral_abscissa = 0.0;
  std::optional<CMatrix> P;
  CVector mu;
  double lambda_tilde = 0.0;
  double lambda = 0.0;
  double c = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double eps = 0.0;  // regularization actually used
  double qmi_max_eigenvalue = 0.0;
  std::optional<double> invariant_level;
  Verdict verdict = Verdict::FailedHurwitz;
};

/// F = -i J M - 1/2 J N^H J N.
CMatrix build_F(const CMatrix& M, const CMatrix& N);

struct HurwitzResult {
  bool hurwitz = false;
  double abscissa = 0.0;
};

inline constexpr double kHurwitzTol = 1e-9;

HurwitzResult is_hurwitz(const CMatrix& F, double tol = kHurwitzTol);

/// ||C (sI - F)^{-1} B||_inf for Hurwitz F. Bisection on the level delta,
/// deciding each level through the imaginary-axis eigenvalues of the
/// Hamiltonian [[F, BB^H/delta], [-C^H C/delta, -F^H]]; stops at relative
/// bracket width 1e-9 and returns the upper end.
double hinf_norm(const CMatrix& F, const CMatrix& B, const CMatrix& C);

struct HinfCondition {
  double primary = 0.0;  // ||conj(E) Sigma (sI-F)^{-1} J Sigma E^T||
  double reduced = 0.0;  // ||E (sI-F)^{-1} J E^H||
  bool pass = false;     // reduced < gamma/2
};

HinfCondition hinf_condition(const DoubledMatrices& d, const CMatrix& F, double gamma);

/// B = 2 J Sigma E^T and C = (1/gamma) conj(E) Sigma, so the QMI reads
/// F^H P + P F + P B B^H P + C^H C < 0.
struct QmiOperands {
  CMatrix B;
  CMatrix C;
};
QmiOperands qmi_operands(const DoubledMatrices& d, double gamma);

/// Left-hand side of the QMI for a given P.
CMatrix qmi_lhs(const CMatrix& F, const QmiOperands& ops, const CMatrix& P);

/// eps = 1e-6 (1 + ||C^H C||_F).
double default_regularization(const DoubledMatrices& d, double gamma);

struct QmiSolution {
  std::optional<CMatrix> P;
  int iterations = 0;              // Newton steps, summed over sweeps
  int sweeps = 0;
  double riccati_residual = 0.0;   // Frobenius norm of the regularized ARE
  double qmi_max_eigenvalue = 0.0; // lambda_max of qmi_lhs(P)
  std::string diagnostic;          // set when P is absent
};

/// Block-form P = Sigma conj(P) Sigma satisfying the QMI with margin eps.
/// Each sweep solves a Riccati equation by Newton iteration from the Lyapunov
/// initial guess; a single sweep suffices when B B^H and C^H C are themselves
/// of block form.
QmiSolution solve_qmi(const DoubledMatrices& d, const CMatrix& F, double gamma, double eps);

/// mu_i = [z_i, [z_i, V]] for V = x^H P x, x = (a; a#):
///   mu_i = 2 E_i J P Sigma J E_i^T.
CVector mu_constants(const CMatrix& P, const CMatrix& Etilde);

struct CertificateConstants {
  double lambda_tilde = 0.0;
  double lambda = 0.0;
  double c = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

CertificateConstants certificate_constants(const DoubledMatrices& d, const CMatrix& F,
                                           const SectorBounds& bounds, const CMatrix& P,
                                           const CVector& mu);

struct CertifyOptions {
  std::optional<double> eps;  // default_regularization, reduced if the QMI is infeasible
};

StabilityCertificate certify(const LinearQuantumSystem& sys, const SectorBounds& bounds,
                             const CertifyOptions& opts = {});

}  // namespace qrstab

#endif  // QRSTAB_CERTIFY_HPP
