// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QRSTAB_FOCKSIM_HPP
#define QRSTAB_FOCKSIM_HPP

#include <map>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "qrstab/model.hpp"
#include "qrstab/perturbation.hpp"

namespace qrstab::fock {

using SparseOp = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// Ladder operators of `modes` bosonic modes, each truncated to `dim` Fock
/// levels. Basis index = sum_k n_k dim^(modes-1-k), mode 0 most significant.
class TruncatedAlgebra {
 public:
  TruncatedAlgebra(int modes, int dim);

  int modes() const { return modes_; }
  int dim() const { return dim_; }
  Eigen::Index size() const { return size_; }

  const CMatrix& a(int mode) const { return a_.at(mode); }
  CMatrix adag(int mode) const { return a_.at(mode).adjoint(); }

  /// Doubled-up vector (a_1..a_n, a_1^H..a_n^H).
  const std::vector<CMatrix>& doubled() const { return x_; }

  /// Fock occupation of `mode` in basis state `index`.
  int occupation(Eigen::Index index, int mode) const;

  /// Basis states whose every mode has occupation <= cut.
  std::vector<Eigen::Index> safe_states(int cut) const;

  /// Highest per-mode occupation at which identities between operators of
  /// total ladder degree `degree` are free of truncation artifacts:
  /// dim - 1 - ceil(degree / 2). Negative when no state qualifies.
  int safe_cut(int degree) const;

 private:
  int modes_;
  int dim_;
  Eigen::Index size_;
  std::vector<CMatrix> a_;
  std::vector<CMatrix> x_;
};

/// Max |entry| of m restricted to rows and columns in `states`.
double restricted_max_abs(const CMatrix& m, const std::vector<Eigen::Index>& states);

/// z_i = sum_j (E1)_ij a_j + (E2)_ij a_j^H as matrices.
std::vector<CMatrix> channel_operators(const TruncatedAlgebra& alg, const LinearQuantumSystem& sys);

/// sum S_{ijkl} z_i^k (z_j^H)^l with the literal left-to-right ordering.
/// Throws std::invalid_argument if the degree reaches the truncation, and
/// NumericalError if the result is not Hermitian on the safe subspace when
/// `require_hermitian` is set.
CMatrix operator_of_series(const TruncatedAlgebra& alg, const LinearQuantumSystem& sys,
                           const PerturbationSeries& f, bool require_hermitian = true);

/// x^H K x for a 2n x 2n matrix K.
CMatrix quadratic_form(const TruncatedAlgebra& alg, const CMatrix& K);

/// Coupling operators L_k = sum_l N_kl x_l, k < m.
std::vector<CMatrix> coupling_operators(const TruncatedAlgebra& alg, const DoubledMatrices& d);

/// 1/2 x^H M x + f
CMatrix system_hamiltonian(const TruncatedAlgebra& alg, const LinearQuantumSystem& sys,
                           const PerturbationSeries& f);

struct IdentityReport {
  int safe_cut = 0;
  std::map<std::string, double> residuals;

  double worst() const;
};

/// Checks, on the safe subspace, the commutator identities behind the
/// Lyapunov dissipation bound for V = x^H P x:
///   quadratic_hamiltonian  [V, x^H M x / 2] = x^H (PJM - MJP) x
///   coupling               L^H[V,L]/2 + [L^H,V]L/2 = tr(PJN^H diag(I,0) NJ)
///                          - x^H (N^H JNJP + PJN^H JN) x / 2
///   vector_commutator      [x, V] = 2 J P x
///   double_commutator      [z_i, [z_i, V]] = mu_i I
///   perturbation           [V, f] = sum [V,z_i] w1_i^H - w1_i [z_i^H, V]
///                          + (nu_i w2_i^H - w2_i conj(nu_i)) / 2,
///                          nu_i = [z_i, [V, z_i]] = -mu_i
IdentityReport check_commutator_identities(const TruncatedAlgebra& alg,
                                           const LinearQuantumSystem& sys, const CMatrix& P,
                                           const PerturbationSeries& f);

struct FockTrajectory {
  std::vector<double> times;
  std::vector<double> msq;                       // <x^H x>(t)
  std::vector<std::vector<double>> occupations;  // <a_k^H a_k>(t) per mode
  std::vector<double> bound;                     // filled by check_ms_bound
  CMatrix final_state;
};

struct EvolveOptions {
  double t_final = 1.0;
  double dt = 1e-3;
  int max_samples = 1000;
};

/// RK4 on d rho/dt = -i[H, rho] + sum L rho L^H - {L^H L, rho}/2, with rho
/// re-symmetrized after every step. Aborts (NumericalError) on trace drift
/// above 1e-6 or an eigenvalue below -1e-8 at a recorded sample.
FockTrajectory lindblad_evolve(const TruncatedAlgebra& alg, const CMatrix& H,
                               const std::vector<CMatrix>& L_ops, const CMatrix& rho0,
                               const EvolveOptions& opts);

/// Truncated, renormalized product of coherent states.
CVector coherent_product(const TruncatedAlgebra& alg, const std::vector<Complex>& alphas);

struct BoundCheck {
  bool pass = false;
  double worst_margin = 0.0;
  std::vector<double> slack;
};

/// msq(t) <= c1 exp(-c2 t) msq(0) + c3 + 1e-6 (1 + c3) at every sample.
/// Fills traj.bound.
BoundCheck check_ms_bound(FockTrajectory& traj, double c1, double c2, double c3);

}  // namespace qrstab::fock

#endif  // QRSTAB_FOCKSIM_HPP
