// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qrstab/focksim.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace qrstab::fock {

TruncatedAlgebra::TruncatedAlgebra(int modes, int dim) : modes_(modes), dim_(dim) {
  if (modes < 1) throw std::invalid_argument("need at least one mode");
  if (dim < 3) throw std::invalid_argument("Fock truncation must be at least 3");
  size_ = 1;
  for (int k = 0; k < modes; ++k) size_ *= dim;
  if (size_ > 4096) throw std::invalid_argument("truncated space too large for dense operators");

  for (int k = 0; k < modes; ++k) {
    CMatrix ak = CMatrix::Zero(size_, size_);
    Eigen::Index stride = 1;
    for (int q = k + 1; q < modes; ++q) stride *= dim;
    for (Eigen::Index s = 0; s < size_; ++s) {
      const int n = occupation(s, k);
      if (n > 0) ak(s - stride, s) = std::sqrt(static_cast<double>(n));
    }
    a_.push_back(std::move(ak));
  }
  for (int k = 0; k < modes; ++k) x_.push_back(a_[k]);
  for (int k = 0; k < modes; ++k) x_.push_back(a_[k].adjoint());
}

int TruncatedAlgebra::occupation(Eigen::Index index, int mode) const {
  for (int q = modes_ - 1; q > mode; --q) index /= dim_;
  return static_cast<int>(index % dim_);
}

std::vector<Eigen::Index> TruncatedAlgebra::safe_states(int cut) const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index s = 0; s < size_; ++s) {
    bool ok = true;
    for (int k = 0; k < modes_ && ok; ++k) ok = occupation(s, k) <= cut;
    if (ok) out.push_back(s);
  }
  return out;
}

int TruncatedAlgebra::safe_cut(int degree) const { return dim_ - 1 - (degree + 1) / 2; }

double restricted_max_abs(const CMatrix& m, const std::vector<Eigen::Index>& states) {
  double worst = 0.0;
  for (Eigen::Index r : states) {
    for (Eigen::Index c : states) worst = std::max(worst, std::abs(m(r, c)));
  }
  return worst;
}

std::vector<CMatrix> channel_operators(const TruncatedAlgebra& alg, const LinearQuantumSystem& sys) {
  if (sys.modes() != alg.modes()) {
    throw DimensionError("system has " + std::to_string(sys.modes()) + " modes, algebra has " +
                         std::to_string(alg.modes()));
  }
  std::vector<CMatrix> z;
  for (int i = 0; i < sys.channels(); ++i) {
    CMatrix zi = CMatrix::Zero(alg.size(), alg.size());
    for (int j = 0; j < alg.modes(); ++j) {
      if (sys.E1(i, j) != Complex{}) zi += sys.E1(i, j) * alg.a(j);
      if (sys.E2(i, j) != Complex{}) zi += sys.E2(i, j) * alg.adag(j);
    }
    z.push_back(std::move(zi));
  }
  return z;
}

namespace {

CMatrix power(const CMatrix& m, int k) {
  CMatrix out = CMatrix::Identity(m.rows(), m.cols());
  for (int e = 0; e < k; ++e) out = out * m;
  return out;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

}  // namespace

CMatrix operator_of_series(const TruncatedAlgebra& alg, const LinearQuantumSystem& sys,
                           const PerturbationSeries& f, bool require_hermitian) {
  if (f.max_degree() > alg.dim() - 1) {
    throw std::invalid_argument("series degree " + std::to_string(f.max_degree()) +
                                " exceeds Fock truncation " + std::to_string(alg.dim()));
  }
  if (f.channels() > sys.channels() && !f.empty()) {
    throw DimensionError("series has more channels than the system");
  }
  CMatrix out = CMatrix::Zero(alg.size(), alg.size());
  if (f.empty()) return out;
  const std::vector<CMatrix> z = channel_operators(alg, sys);
  for (const auto& [m, c] : f.terms()) {
    out += c * power(z[m.i - 1], m.k) * power(z[m.j - 1].adjoint(), m.l);
  }
  if (require_hermitian) {
    const int cut = alg.safe_cut(f.max_degree());
    const auto states = alg.safe_states(std::max(cut, 0));
    const double r = restricted_max_abs(out - out.adjoint(), states);
    if (r > 1e-12 * (1.0 + restricted_max_abs(out, states))) {
      throw NumericalError("series operator not Hermitian on the safe subspace (residual " +
                           std::to_string(r) + ")");
    }
  }
  return out;
}

CMatrix quadratic_form(const TruncatedAlgebra& alg, const CMatrix& K) {
  const auto& x = alg.doubled();
  if (K.rows() != static_cast<Eigen::Index>(x.size()) || K.cols() != K.rows()) {
    throw DimensionError("quadratic form matrix " + shape_of(K) + " does not match " +
                         std::to_string(x.size()) + " ladder operators");
  }
  CMatrix out = CMatrix::Zero(alg.size(), alg.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    CMatrix row = CMatrix::Zero(alg.size(), alg.size());
    for (std::size_t l = 0; l < x.size(); ++l) {
      if (K(k, l) != Complex{}) row += K(k, l) * x[l];
    }
    out += x[k].adjoint() * row;
  }
  return out;
}

std::vector<CMatrix> coupling_operators(const TruncatedAlgebra& alg, const DoubledMatrices& d) {
  const auto& x = alg.doubled();
  const Eigen::Index m = d.N.rows() / 2;
  std::vector<CMatrix> L;
  for (Eigen::Index k = 0; k < m; ++k) {
    CMatrix lk = CMatrix::Zero(alg.size(), alg.size());
    for (std::size_t l = 0; l < x.size(); ++l) {
      if (d.N(k, l) != Complex{}) lk += d.N(k, l) * x[l];
    }
    L.push_back(std::move(lk));
  }
  return L;
}

CMatrix system_hamiltonian(const TruncatedAlgebra& alg, const LinearQuantumSystem& sys,
                           const PerturbationSeries& f) {
  const DoubledMatrices d = doubled_matrices(sys);
  return 0.5 * quadratic_form(alg, d.M) + operator_of_series(alg, sys, f);
}

double IdentityReport::worst() const {
  double w = 0.0;
  for (const auto& [name, r] : residuals) w = std::max(w, r);
  return w;
}

IdentityReport check_commutator_identities(const TruncatedAlgebra& alg,
                                           const LinearQuantumSystem& sys, const CMatrix& P,
                                           const PerturbationSeries& f) {
  const DoubledMatrices d = doubled_matrices(sys);
  const int n = sys.modes();
  const int p = sys.channels();
  const int degree = std::max(4, 2 + f.max_degree());
  IdentityReport report;
  report.safe_cut = alg.safe_cut(degree);
  if (report.safe_cut < 0) {
    throw std::invalid_argument("Fock truncation " + std::to_string(alg.dim()) +
                                " too small for operator degree " + std::to_string(degree));
  }
  const auto states = alg.safe_states(report.safe_cut);
  const auto& x = alg.doubled();
  const CMatrix J = signature_matrix(n).cast<Complex>();
  const CMatrix S = swap_matrix(n).cast<Complex>();
  const CMatrix I = CMatrix::Identity(alg.size(), alg.size());

  const CMatrix V = quadratic_form(alg, P);

  {
    const CMatrix lhs = commutator(V, 0.5 * quadratic_form(alg, d.M));
    const CMatrix rhs = quadratic_form(alg, P * J * d.M - d.M * J * P);
    report.residuals["quadratic_hamiltonian"] = restricted_max_abs(lhs - rhs, states);
  }
  {
    const std::vector<CMatrix> L = coupling_operators(alg, d);
    CMatrix lhs = CMatrix::Zero(alg.size(), alg.size());
    for (const CMatrix& lk : L) {
      lhs += 0.5 * lk.adjoint() * commutator(V, lk) + 0.5 * commutator(lk.adjoint(), V) * lk;
    }
    const Eigen::Index m = d.N.rows() / 2;
    CMatrix upper = CMatrix::Zero(2 * m, 2 * m);
    upper.topLeftCorner(m, m).setIdentity();
    const CMatrix Jm = signature_matrix(static_cast<int>(m)).cast<Complex>();
    const Complex tr = (P * J * d.N.adjoint() * upper * d.N * J).trace();
    const CMatrix K = d.N.adjoint() * Jm * d.N * J * P + P * J * d.N.adjoint() * Jm * d.N;
    const CMatrix rhs = tr * I - 0.5 * quadratic_form(alg, K);
    report.residuals["coupling"] = restricted_max_abs(lhs - rhs, states);
  }
  {
    const CMatrix JP = J * P;
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      CMatrix rhs = CMatrix::Zero(alg.size(), alg.size());
      for (std::size_t l = 0; l < x.size(); ++l) rhs += 2.0 * JP(k, l) * x[l];
      worst = std::max(worst, restricted_max_abs(commutator(x[k], V) - rhs, states));
    }
    report.residuals["vector_commutator"] = worst;
  }

  const std::vector<CMatrix> z = channel_operators(alg, sys);
  const CVector mu = [&] {
    CVector out(p);
    const CMatrix kernel = 2.0 * J * P * S * J;
    for (int i = 0; i < p; ++i) {
      out(i) = (d.Etilde.row(i) * kernel * d.Etilde.row(i).transpose())(0, 0);
    }
    return out;
  }();
  {
    double worst = 0.0;
    for (int i = 0; i < p; ++i) {
      const CMatrix dc = commutator(z[i], commutator(z[i], V));
      worst = std::max(worst, restricted_max_abs(dc - mu(i) * I, states));
    }
    report.residuals["double_commutator"] = worst;
  }
  {
    const CMatrix lhs = commutator(V, operator_of_series(alg, sys, f, false));
    CMatrix rhs = CMatrix::Zero(alg.size(), alg.size());
    for (int i = 1; i <= p && i <= f.channels(); ++i) {
      const CMatrix w1h = operator_of_series(alg, sys, partial_z(f, i), false);
      const CMatrix w2h = operator_of_series(alg, sys, second_partial_z(f, i), false);
      const CMatrix& zi = z[i - 1];
      const Complex nu = -mu(i - 1);
      rhs += commutator(V, zi) * w1h - w1h.adjoint() * commutator(zi.adjoint(), V);
      rhs += 0.5 * nu * w2h - 0.5 * std::conj(nu) * w2h.adjoint();
    }
    report.residuals["perturbation"] = restricted_max_abs(lhs - rhs, states);
  }
  return report;
}

CVector coherent_product(const TruncatedAlgebra& alg, const std::vector<Complex>& alphas) {
  if (static_cast<int>(alphas.size()) != alg.modes()) {
    throw std::invalid_argument("need one coherent amplitude per mode");
  }
  std::vector<CVector> single;
  for (const Complex& alpha : alphas) {
    CVector c(alg.dim());
    c(0) = 1.0;
    for (int k = 1; k < alg.dim(); ++k) c(k) = c(k - 1) * alpha / std::sqrt(static_cast<double>(k));
    single.push_back(c / c.norm());
  }
  CVector psi(alg.size());
  for (Eigen::Index s = 0; s < alg.size(); ++s) {
    Complex amp = 1.0;
    for (int k = 0; k < alg.modes(); ++k) amp *= single[k](alg.occupation(s, k));
    psi(s) = amp;
  }
  return psi / psi.norm();
}

namespace {

SparseOp to_sparse(const CMatrix& m) {
  return m.sparseView(Complex(1.0), 1e-300);
}

}  // namespace

FockTrajectory lindblad_evolve(const TruncatedAlgebra& alg, const CMatrix& H,
                               const std::vector<CMatrix>& L_ops, const CMatrix& rho0,
                               const EvolveOptions& opts) {
  const Eigen::Index D = alg.size();
  if (H.rows() != D || H.cols() != D || rho0.rows() != D || rho0.cols() != D) {
    throw DimensionError("operators must be " + std::to_string(D) + "x" + std::to_string(D));
  }
  if (!(opts.dt > 0.0) || !(opts.t_final >= 0.0)) throw std::invalid_argument("need dt > 0 and t_final >= 0");
  if (std::abs(rho0.trace() - 1.0) > 1e-10) throw std::invalid_argument("initial state must have unit trace");
  {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho0 + rho0.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("initial state must be positive semidefinite");
  }

  // effective non-Hermitian generator K = H - (i/2) sum L^H L
  CMatrix K = H;
  for (const CMatrix& l : L_ops) K -= 0.5i * (l.adjoint() * l);
  const SparseOp Ks = to_sparse(K);
  std::vector<SparseOp> Ls;
  for (const CMatrix& l : L_ops) Ls.push_back(to_sparse(l));

  // rho Hermitian: rho K^H = (K rho)^H and L rho L^H = L (L rho)^H
  auto rhs = [&](const CMatrix& rho) {
    const CMatrix kr = Ks * rho;
    CMatrix out = -1i * kr + 1i * kr.adjoint();
    for (const SparseOp& l : Ls) {
      const CMatrix lr = l * rho;
      out.noalias() += l * lr.adjoint();
    }
    return out;
  };

  RVector number = RVector::Zero(D);
  std::vector<RVector> per_mode(alg.modes(), RVector::Zero(D));
  for (Eigen::Index s = 0; s < D; ++s) {
    for (int k = 0; k < alg.modes(); ++k) per_mode[k](s) = alg.occupation(s, k);
  }

  const long steps = std::lround(std::ceil(opts.t_final / opts.dt - 1e-9));
  const double dt = steps > 0 ? opts.t_final / steps : 0.0;
  const long stride = std::max<long>(1, steps / std::max(1, opts.max_samples));

  FockTrajectory traj;
  auto record = [&](double t, const CMatrix& rho) {
    const RVector diag = rho.diagonal().real();
    double msq = 0.0;
    std::vector<double> occ;
    for (int k = 0; k < alg.modes(); ++k) {
      occ.push_back(diag.dot(per_mode[k]));
      msq += 2.0 * occ.back() + 1.0;
    }
    traj.times.push_back(t);
    traj.msq.push_back(msq);
    traj.occupations.push_back(std::move(occ));
  };

  CMatrix rho = 0.5 * (rho0 + rho0.adjoint());
  record(0.0, rho);
  for (long step = 1; step <= steps; ++step) {
    const CMatrix k1 = rhs(rho);
    const CMatrix k2 = rhs(rho + 0.5 * dt * k1);
    const CMatrix k3 = rhs(rho + 0.5 * dt * k2);
    const CMatrix k4 = rhs(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + rho.adjoint()).eval();

    const double drift = std::abs(rho.trace() - 1.0);
    if (!(drift <= 1e-6)) {
      throw NumericalError("trace drift " + std::to_string(drift) + " at t = " +
                           std::to_string(step * dt) + "; reduce dt");
    }
    if (step % stride == 0 || step == steps) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -1e-8) {
        throw NumericalError("density matrix lost positivity at t = " + std::to_string(step * dt) +
                             "; reduce dt");
      }
      record(step * dt, rho);
    }
  }
  traj.final_state = std::move(rho);
  return traj;
}

BoundCheck check_ms_bound(FockTrajectory& traj, double c1, double c2, double c3) {
  BoundCheck out;
  out.pass = true;
  out.worst_margin = std::numeric_limits<double>::infinity();
  const double tol = 1e-6 * (1.0 + c3);
  traj.bound.clear();
  if (traj.msq.empty()) return out;
  const double msq0 = traj.msq.front();
  for (std::size_t s = 0; s < traj.msq.size(); ++s) {
    const double bound = c1 * std::exp(-c2 * traj.times[s]) * msq0 + c3;
    traj.bound.push_back(bound);
    const double slack = bound + tol - traj.msq[s];
    out.slack.push_back(slack);
    out.worst_margin = std::min(out.worst_margin, slack);
    if (!(slack >= 0.0)) out.pass = false;
  }
  return out;
}

}  // namespace qrstab::fock
