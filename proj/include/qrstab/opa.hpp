// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QRSTAB_OPA_HPP
#define QRSTAB_OPA_HPP

#include <vector>

#include "qrstab/model.hpp"
#include "qrstab/perturbation.hpp"

namespace qrstab::opa {

/// Optical parametric amplifier: fundamental mode a1 with mirror coupling
/// kappa1, second harmonic a2 with kappa2, chi(2) strength chi.
struct OpaParams {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double chi = 0.1;

  void validate() const;
};

struct OpaModel {
  LinearQuantumSystem system;
  PerturbationSeries series;
};

/// M = 0, N1 = diag(sqrt(kappa)), E2 = I (z_i = a_i^*), and
/// f = i chi (z2 (z1^*)^2 - z1^2 z2^*).
OpaModel build_opa(const OpaParams& params);

/// max(2/kappa1, 2/kappa2)
double closed_form_hinf(const OpaParams& params);

/// closed_form_hinf < gamma / 2
bool gamma_condition(const OpaParams& params, double gamma);

/// Largest admissible |z2|^2 at the given |z1|^2, including the delta2
/// ceiling delta2 / (4 chi^2); clamped at 0.
double region_z2_cap(const OpaParams& params, const SectorBounds& bounds, double z1sq);

/// The sector-(a) cap alone (no delta2 ceiling); +inf up to the knee.
double first_condition_cap(const OpaParams& params, const SectorBounds& bounds, double z1sq);

struct LambdaBar {
  double caption = 0.0;         // 1/(2 g^2 chi^2) + sqrt(1/(4 g^4 chi^4) + delta1)
  double numerator_root = 0.0;  // 1/(2 g^2 chi^2) + sqrt(1/(4 g^4 chi^4) + delta1/chi^2)
  double discrepancy() const { return numerator_root - caption; }
};

LambdaBar lambda_bar(const OpaParams& params, const SectorBounds& bounds);

enum class ActiveConstraint { First, Second };  // CSV tags d2 / d3

struct RegionSample {
  double z1sq = 0.0;
  double z2sq_max = 0.0;
  ActiveConstraint active = ActiveConstraint::Second;
};

struct RegionCurve {
  std::vector<RegionSample> samples;
  double lambda_bar = 0.0;  // numerator root: right end of the |z1|^2 range
  double cap2 = 0.0;        // delta2 / (4 chi^2)
  double knee = 0.0;        // 1 / (4 gamma^2 chi^2)
};

RegionCurve region_curve(const OpaParams& params, const SectorBounds& bounds, int n_samples);

/// Cap from the specialization gamma = 4/kappa1 written out in kappa1
/// (sector-(a) only, no ceiling).
double specialized_cap(const OpaParams& params, double delta1, double z1sq);

/// True iff (|z1|^2, |z2|^2) lies inside the region bounded by the curve.
bool region_contains(const OpaParams& params, const SectorBounds& bounds, double z1sq,
                     double z2sq);

/// Largest rho with {z : x^H P x <= rho} inside the region, where
/// x = (conj z1, conj z2, z1, z2). Bisection on rho with boundary sampling
/// over `directions` magnitude angles times 8 x 8 phase pairs.
double invariant_ellipsoid(const CMatrix& P, const OpaParams& params, const SectorBounds& bounds,
                           int directions = 64);

/// Doubled coordinates of the semiclassical point (z1, z2).
CVector doubled_point(Complex z1, Complex z2);

}  // namespace qrstab::opa

#endif  // QRSTAB_OPA_HPP
