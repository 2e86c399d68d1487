// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qrstab/certify.hpp"
#include "qrstab/cli.hpp"
#include "qrstab/focksim.hpp"
#include "qrstab/linalg.hpp"
#include "qrstab/opa.hpp"
#include "qrstab/random.hpp"

using namespace qrstab;

namespace {

constexpr std::uint64_t kSeed = 20261016;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LinearQuantumSystem hurwitz_system(int n, int m, int p, std::mt19937_64& rng) {
  for (;;) {
    auto s = random_system(n, m, p, rng);
    const auto d = doubled_matrices(s);
    if (is_hurwitz(build_F(d.M, d.N)).hurwitz) return s;
  }
}

Outcome opa_closed_form() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const opa::OpaParams p{u(rng), u(rng), 0.1};
    const auto d = doubled_matrices(opa::build_opa(p).system);
    const auto h = hinf_condition(d, build_F(d.M, d.N), 1.0);
    const double exact = std::max(2.0 / p.kappa1, 2.0 / p.kappa2);
    worst = std::max(worst, std::abs(h.reduced - exact) / exact);
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-6 && dt < 5.0, fmt("worst relative error %.2e over 20 pairs, %.2f s", worst, dt)};
}

Outcome dual_norms() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(kSeed + 1);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 3;
    const auto s = hurwitz_system(n, 1 + (k / 3) % 2, 1 + (k / 6) % 2, rng);
    const auto d = doubled_matrices(s);
    const CMatrix F = build_F(d.M, d.N);
    const CMatrix J = signature_matrix(n).cast<Complex>();
    const CMatrix S = swap_matrix(n).cast<Complex>();
    const double primary = hinf_norm(F, J * S * d.Etilde.transpose(), d.Etilde.conjugate() * S);
    const double reduced = hinf_norm(F, J * d.Etilde.adjoint(), d.Etilde);
    worst = std::max(worst, std::abs(primary - reduced) / (1.0 + reduced));
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-6 && dt < 30.0, fmt("max |primary - reduced|/(1 + reduced) = %.2e over 100 systems, %.2f s", worst, dt)};
}

Outcome threshold() {
  const auto sys = opa::build_opa({1.0, 2.0, 0.1}).system;
  const auto above = certify(sys, {4.001, 0.1, 0.1});
  const auto below = certify(sys, {3.999, 0.1, 0.1});
  const double g = cli::gamma_search(sys, 0.1, 0.1, 1e-6);
  const bool ok = above.verdict == Verdict::Certified && below.verdict == Verdict::FailedSmallGain &&
                  std::abs(g - 4.0) <= 1e-4;
  return {ok, fmt("gamma 4.001 -> %s, gamma 3.999 -> %s, gamma_search = %.8f",
                  std::string(to_string(above.verdict)).c_str(),
                  std::string(to_string(below.verdict)).c_str(), g)};
}

// Recomputes c, c1, c2, c3 from the spectrum of P and the generalized
// eigenproblem -LHS v = c P v, independent of the library's Cholesky route.
struct Recheck {
  double lhs_max = 0.0, pmin = 0.0, block = 0.0, constants = 0.0;
};

Recheck recheck(const LinearQuantumSystem& sys, const SectorBounds& b, const StabilityCertificate& cert) {
  const CMatrix& P = *cert.P;
  const int n = sys.modes();
  const auto d = doubled_matrices(sys);
  const CMatrix LHS = qmi_lhs(cert.F, qmi_operands(d, b.gamma), P);
  const CMatrix S = swap_matrix(n).cast<Complex>();
  Recheck r;
  r.lhs_max = linalg::max_hermitian_eigenvalue(LHS);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(P);
  r.pmin = es.eigenvalues().minCoeff();
  const double pmax = es.eigenvalues().maxCoeff();
  r.block = (P - S * P.conjugate() * S).norm() / P.norm();
  Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> ges(-linalg::hermitian_part(LHS), P);
  const double c = ges.eigenvalues().minCoeff();
  const double c1 = pmax / r.pmin, c3 = cert.lambda / (c * r.pmin);
  auto rel = [](double a, double e) { return std::abs(a - e) / std::max(std::abs(e), 1e-300); };
  r.constants = std::max({rel(cert.c, c), rel(cert.c1, c1), rel(cert.c2, c), rel(cert.c3, c3)});
  return r;
}

Outcome riccati_validity() {
  std::vector<std::pair<LinearQuantumSystem, SectorBounds>> runs;
  for (double k1 : {0.5, 1.0, 2.0}) {
    for (double k2 : {1.0, 3.0}) {
      for (double factor : {1.001, 1.2, 2.0}) {
        const double g = 2.0 * factor * std::max(2.0 / k1, 2.0 / k2);
        runs.push_back({opa::build_opa({k1, k2, 0.05}).system, {g, 0.1, 0.1}});
      }
    }
  }
  std::mt19937_64 rng(kSeed + 2);
  for (int k = 0; k < 30; ++k) {
    auto s = hurwitz_system(1 + k % 3, 2, 1 + k % 2, rng);
    if (k % 2 == 0) {
      s.E1 = s.E1.real().cast<Complex>();
      s.E2 = s.E1;
    }
    const auto d = doubled_matrices(s);
    const double reduced = hinf_condition(d, build_F(d.M, d.N), 1.0).reduced;
    runs.push_back({s, {(k % 2 == 0 ? 2.02 : 8.0) * reduced, 0.05, 0.05}});
  }
  int certified = 0, errors = 0;
  Recheck worst{-1e300, 1e300, 0.0, 0.0};
  bool ok = true;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& [sys, b] = runs[r];
    StabilityCertificate cert;
    try {
      cert = certify(sys, b);
    } catch (const StageError& e) {
      ++errors;
      ok = false;
      std::printf("    run %zu: %s\n", r, e.what());
      continue;
    }
    if (cert.verdict != Verdict::Certified) continue;
    ++certified;
    const Recheck rc = recheck(sys, b, cert);
    worst.lhs_max = std::max(worst.lhs_max, rc.lhs_max);
    worst.pmin = std::min(worst.pmin, rc.pmin);
    worst.block = std::max(worst.block, rc.block);
    worst.constants = std::max(worst.constants, rc.constants);
    ok = ok && rc.lhs_max < 0.0 && rc.pmin > 0.0 && rc.block <= 1e-8 && rc.constants <= 1e-8;
  }
  ok = ok && certified == static_cast<int>(runs.size());
  return {ok, fmt("%d/%zu certified, %d stage errors; max lambda_max(LHS) %.2e, min lambda_min(P) %.2e, "
                  "block defect %.1e, constants rel. err %.1e",
                  certified, runs.size(), errors, worst.lhs_max, worst.pmin, worst.block, worst.constants)};
}

Outcome identities() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(kSeed + 3);
  const auto model = opa::build_opa({1.0, 2.0, 0.1});
  const fock::TruncatedAlgebra alg(2, 6);
  const auto report =
      fock::check_commutator_identities(alg, model.system, random_block_positive(2, rng), model.series);
  std::string detail = fmt("safe cut %d;", report.safe_cut);
  for (const auto& [name, value] : report.residuals) detail += fmt(" %s %.1e", name.c_str(), value);
  const double dt = seconds_since(t0);
  detail += fmt("; %.2f s", dt);
  return {report.residuals.size() == 5 && report.worst() <= 1e-10 && dt < 10.0, detail};
}

fock::FockTrajectory opa_trajectory(const opa::OpaModel& model, int dim, double t_final) {
  const fock::TruncatedAlgebra alg(2, dim);
  const auto d = doubled_matrices(model.system);
  const CVector psi = fock::coherent_product(alg, {0.5, 0.5});
  fock::EvolveOptions opts;
  opts.t_final = t_final;
  opts.dt = 1e-3;
  opts.max_samples = 1000;
  return fock::lindblad_evolve(alg, fock::system_hamiltonian(alg, model.system, model.series),
                               fock::coupling_operators(alg, d), psi * psi.adjoint(), opts);
}

Outcome mean_square_bound() {
  const auto t0 = Clock::now();
  const opa::OpaParams params{1.0, 1.0, 0.05};
  const SectorBounds b{8.0, 0.1, 0.1};
  const auto model = opa::build_opa(params);
  const auto cert = certify(model.system, b);
  if (cert.verdict != Verdict::Certified) return {false, "OPA configuration not certified"};
  const bool inside = opa::region_contains(params, b, 0.25, 0.25);
  auto t12 = opa_trajectory(model, 12, 10.0);
  const auto check = fock::check_ms_bound(t12, cert.c1, cert.c2, cert.c3);
  const auto t10 = opa_trajectory(model, 10, 10.0);
  double gap = 0.0;
  for (std::size_t k = 0; k < t12.msq.size(); ++k) gap = std::max(gap, std::abs(t12.msq[k] - t10.msq[k]));
  const double dt = seconds_since(t0);
  return {inside && check.pass && gap <= 1e-4 && dt < 180.0,
          fmt("start inside region: %s; %zu samples, worst slack %.3e (c1 %.4g, c2 %.3g, c3 %.4g); "
              "max |msq_12 - msq_10| %.2e; %.1f s",
              inside ? "yes" : "no", t12.msq.size(), check.worst_margin, cert.c1, cert.c2, cert.c3, gap, dt)};
}

Outcome region_geometry() {
  const opa::OpaParams params{1.0, 2.0, 0.1};
  const SectorBounds b{4.0, 0.0, 0.04};
  const auto curve = opa::region_curve(params, b, 200);
  const double endpoint_err = std::abs(curve.lambda_bar - 6.25);
  const bool origin_exact = curve.samples.front().z2sq_max == b.delta2 / (4.0 * params.chi * params.chi);

  // Scan boundary against the curve: for each |z1|^2 column, the largest
  // admissible |z2|^2 row must sit within one cell of the curve value.
  MagnitudeGrid grid{1.2 * curve.lambda_bar, 1.25 * curve.cap2, 50, 50, 8};
  const auto cells = scan_sector_region(opa::build_opa(params).series, b, grid);
  const double h1 = grid.max1 / (grid.cells1 - 1), h2 = grid.max2 / (grid.cells2 - 1);
  int worst_cells = 0;
  for (int i = 0; i < grid.cells1; ++i) {
    const double z1 = grid.value1(i);
    int top = -1;
    for (int j = 0; j < grid.cells2; ++j) {
      if (cells[static_cast<std::size_t>(i) * grid.cells2 + j].admissible) top = j;
    }
    const bool in_range = z1 <= curve.lambda_bar;
    if (!in_range) {
      // beyond the right end only the z2 = 0 row may survive, within one column
      if (top >= 0 && z1 - curve.lambda_bar > h1) worst_cells = std::max(worst_cells, 99);
      continue;
    }
    const double cap = opa::region_z2_cap(params, b, z1);
    const double scan_top = top < 0 ? -h2 : grid.value2(top);
    worst_cells = std::max(worst_cells, static_cast<int>(std::ceil(std::abs(scan_top - cap) / h2 - 1e-9)));
  }

  // gamma = 4/kappa1 against the written-out closed form
  double worst_closed = 0.0;
  for (double delta1 : {0.0, 0.3}) {
    const SectorBounds sb{4.0 / params.kappa1, delta1, 0.04};
    const auto c = opa::region_curve(params, sb, 400);
    for (const auto& s : c.samples) {
      const double closed =
          std::max(0.0, std::min(opa::specialized_cap(params, delta1, s.z1sq), c.cap2));
      worst_closed = std::max(worst_closed, std::abs(s.z2sq_max - closed) / (1.0 + closed));
    }
  }
  const auto lb = opa::lambda_bar(params, {4.0, 1.0, 0.04});
  std::printf("    note: at delta1 = 1 the caption endpoint is %.6f, the numerator root %.6f (difference %.6f)\n",
              lb.caption, lb.numerator_root, lb.discrepancy());
  return {endpoint_err <= 1e-12 && origin_exact && worst_cells <= 1 && worst_closed <= 1e-12,
          fmt("endpoint %.15g (err %.1e); origin cap exact: %s; scan/curve offset <= %d cell(s); "
              "closed-form mismatch %.1e",
              curve.lambda_bar, endpoint_err, origin_exact ? "yes" : "no", worst_cells, worst_closed)};
}

Outcome lossy_cavity() {
  double worst = 0.0;
  for (double kappa : {0.5, 1.0, 2.0}) {
    const fock::TruncatedAlgebra alg(1, 5);
    for (Eigen::Index n0 : {1, 3}) {
      CMatrix rho = CMatrix::Zero(5, 5);
      rho(n0, n0) = 1.0;
      const auto traj = fock::lindblad_evolve(alg, CMatrix::Zero(5, 5), {std::sqrt(kappa) * alg.a(0)}, rho,
                                              {1.0 / kappa, 1e-3 / kappa, 10});
      worst = std::max(worst, std::abs(traj.occupations.back()[0] - std::exp(-1.0) * static_cast<double>(n0)));
    }
  }
  return {worst <= 1e-6, fmt("max |<n>(1/kappa) - e^-1 <n>(0)| = %.2e", worst)};
}

}  // namespace

int main() {
  std::printf("acceptance suite, seed %llu\n", static_cast<unsigned long long>(kSeed));
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"OPA closed-form H-infinity norm", opa_closed_form},
      {"primary and reduced H-infinity norms agree", dual_norms},
      {"certification threshold gamma = 4/kappa1", threshold},
      {"Riccati solution validity", riccati_validity},
      {"commutator identities on the truncated Fock space", identities},
      {"simulated mean-square bound", mean_square_bound},
      {"admissible region geometry", region_geometry},
      {"lossy cavity decay", lossy_cavity},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
