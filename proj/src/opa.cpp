// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qrstab/opa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qrstab::opa {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void OpaParams::validate() const {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0) || !(chi >= 0.0) || !std::isfinite(kappa1) ||
      !std::isfinite(kappa2) || !std::isfinite(chi)) {
    throw std::invalid_argument("OPA parameters need kappa1, kappa2 > 0 and chi >= 0, all finite");
  }
}

OpaModel build_opa(const OpaParams& params) {
  params.validate();
  OpaModel out;
  LinearQuantumSystem& s = out.system;
  s.M1 = CMatrix::Zero(2, 2);
  s.M2 = CMatrix::Zero(2, 2);
  s.N1 = CMatrix::Zero(2, 2);
  s.N1(0, 0) = std::sqrt(params.kappa1);
  s.N1(1, 1) = std::sqrt(params.kappa2);
  s.N2 = CMatrix::Zero(2, 2);
  s.E1 = CMatrix::Zero(2, 2);
  s.E2 = CMatrix::Identity(2, 2);

  out.series = PerturbationSeries(2);
  out.series.add({2, 1, 1, 2}, Complex(0.0, params.chi));
  out.series.add({1, 2, 2, 1}, Complex(0.0, -params.chi));
  return out;
}

double closed_form_hinf(const OpaParams& params) {
  params.validate();
  return std::sqrt(std::max(4.0 / (params.kappa1 * params.kappa1),
                            4.0 / (params.kappa2 * params.kappa2)));
}

bool gamma_condition(const OpaParams& params, double gamma) {
  return closed_form_hinf(params) < gamma / 2.0;
}

double first_condition_cap(const OpaParams& params, const SectorBounds& bounds, double z1sq) {
  if (z1sq < 0.0) throw std::invalid_argument("squared magnitude must be nonnegative");
  const double gc2 = bounds.gamma * bounds.gamma * params.chi * params.chi;
  const double denom = 4.0 * z1sq - 1.0 / gc2;
  if (denom <= 0.0) return kInf;
  const double numer = bounds.delta1 / (params.chi * params.chi) + z1sq / gc2 - z1sq * z1sq;
  return numer / denom;
}

double region_z2_cap(const OpaParams& params, const SectorBounds& bounds, double z1sq) {
  const double cap2 = bounds.delta2 / (4.0 * params.chi * params.chi);
  return std::max(0.0, std::min(first_condition_cap(params, bounds, z1sq), cap2));
}

LambdaBar lambda_bar(const OpaParams& params, const SectorBounds& bounds) {
  const double gc2 = bounds.gamma * bounds.gamma * params.chi * params.chi;
  const double half = 1.0 / (2.0 * gc2);
  const double quarter = 1.0 / (4.0 * gc2 * gc2);
  return {half + std::sqrt(quarter + bounds.delta1),
          half + std::sqrt(quarter + bounds.delta1 / (params.chi * params.chi))};
}

RegionCurve region_curve(const OpaParams& params, const SectorBounds& bounds, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("region curve needs at least 2 samples");
  params.validate();
  if (!(params.chi > 0.0)) throw std::invalid_argument("the admissible region is unbounded for chi = 0");
  bounds.validate();
  RegionCurve curve;
  curve.lambda_bar = lambda_bar(params, bounds).numerator_root;
  curve.cap2 = bounds.delta2 / (4.0 * params.chi * params.chi);
  curve.knee = 1.0 / (4.0 * bounds.gamma * bounds.gamma * params.chi * params.chi);
  curve.samples.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    const double z1sq = curve.lambda_bar * s / (n_samples - 1);
    const double first = first_condition_cap(params, bounds, z1sq);
    RegionSample rs;
    rs.z1sq = z1sq;
    rs.z2sq_max = region_z2_cap(params, bounds, z1sq);
    rs.active = first < curve.cap2 ? ActiveConstraint::First : ActiveConstraint::Second;
    curve.samples.push_back(rs);
  }
  return curve;
}

double specialized_cap(const OpaParams& params, double delta1, double z1sq) {
  const double k2 = params.kappa1 * params.kappa1;
  const double c2 = params.chi * params.chi;
  const double denom = 4.0 * z1sq - k2 / (16.0 * c2);
  if (denom <= 0.0) return kInf;
  return (delta1 / c2 + z1sq * k2 / (16.0 * c2) - z1sq * z1sq) / denom;
}

bool region_contains(const OpaParams& params, const SectorBounds& bounds, double z1sq,
                     double z2sq) {
  if (z1sq > lambda_bar(params, bounds).numerator_root) return false;
  return z2sq <= region_z2_cap(params, bounds, z1sq);
}

CVector doubled_point(Complex z1, Complex z2) {
  CVector x(4);
  x << std::conj(z1), std::conj(z2), z1, z2;
  return x;
}

double invariant_ellipsoid(const CMatrix& P, const OpaParams& params, const SectorBounds& bounds,
                           int directions) {
  if (P.rows() != 4 || P.cols() != 4) throw DimensionError("OPA ellipsoid needs a 4x4 P, got " + shape_of(P));
  if (directions < 4) throw std::invalid_argument("need at least 4 boundary directions");
  const double cap2 = bounds.delta2 / (4.0 * params.chi * params.chi);
  if (!(cap2 > 0.0)) return 0.0;

  // Boundary points of the level set x^H P x = rho are t * u with
  // t = sqrt(rho / q(u)); store the magnitudes at rho = 1.
  constexpr int kPhases = 8;
  struct Dir { double m1, m2; };
  std::vector<Dir> dirs;
  dirs.reserve(static_cast<std::size_t>(directions) * kPhases * kPhases);
  for (int a = 0; a < directions; ++a) {
    const double theta = 0.5 * std::numbers::pi * a / (directions - 1);
    for (int s1 = 0; s1 < kPhases; ++s1) {
      for (int s2 = 0; s2 < kPhases; ++s2) {
        const Complex z1 = std::polar(std::cos(theta), 2.0 * std::numbers::pi * s1 / kPhases);
        const Complex z2 = std::polar(std::sin(theta), 2.0 * std::numbers::pi * s2 / kPhases);
        const CVector x = doubled_point(z1, z2);
        const double q = (x.adjoint() * P * x)(0, 0).real();
        if (!(q > 0.0)) throw std::invalid_argument("P must be positive definite");
        dirs.push_back({std::norm(z1) / q, std::norm(z2) / q});
      }
    }
  }
  auto inside = [&](double rho) {
    return std::all_of(dirs.begin(), dirs.end(), [&](const Dir& d) {
      return region_contains(params, bounds, rho * d.m1, rho * d.m2);
    });
  };

  // power-of-two bracket [lo, 2 lo] keeps the result exactly covariant under
  // P -> 2^k P
  double lo = 1.0;
  if (inside(lo)) {
    while (inside(2.0 * lo)) {
      lo *= 2.0;
      if (lo > 1e300) return kInf;
    }
  } else {
    do {
      lo *= 0.5;
      if (lo < 1e-300) return 0.0;
    } while (!inside(lo));
  }
  double hi = 2.0 * lo;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace qrstab::opa
