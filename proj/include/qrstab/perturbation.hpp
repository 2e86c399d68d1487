// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QRSTAB_PERTURBATION_HPP
#define QRSTAB_PERTURBATION_HPP

#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "qrstab/types.hpp"

namespace qrstab {

/// Index of the monomial z_i^k (z_j^*)^l. Channels i, j are 1-based.
struct Monomial {
  int i = 1;
  int j = 1;
  int k = 0;
  int l = 0;

  auto operator<=>(const Monomial&) const = default;
};

/// Polynomial perturbation Hamiltonian
///   f(z, z*) = sum S_{ijkl} z_i^k (z_j^*)^l
/// stored sparsely. Like terms are merged on insertion, zero coefficients are
/// dropped. Total degree k + l is capped at kMaxDegree.
class PerturbationSeries {
 public:
  static constexpr int kMaxDegree = 16;

  PerturbationSeries() = default;
  explicit PerturbationSeries(int channels);

  int channels() const { return channels_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }

  /// Adds c to the coefficient of the monomial (merging like terms).
  void add(const Monomial& m, Complex c);
  Complex coeff(const Monomial& m) const;

  const std::map<Monomial, Complex>& terms() const { return coeffs_; }
  int max_degree() const;

  PerturbationSeries operator+(const PerturbationSeries& other) const;
  PerturbationSeries operator*(Complex scale) const;

 private:
  int channels_ = 0;
  std::map<Monomial, Complex> coeffs_;
};

struct SelfAdjointViolation {
  Monomial index;
  double residual = 0.0;  // |S_{ijkl} - conj(S_{jilk})|
};

/// Empty iff S_{ijkl} = conj(S_{jilk}) for every stored quadruple.
std::vector<SelfAdjointViolation> validate_selfadjoint(
    const PerturbationSeries& f, double tol = 1e-12);

/// Formal derivative with z and z* independent; the result keeps the (i,j,k,l)
/// layout with k lowered by one. Throws std::out_of_range for a bad channel.
PerturbationSeries partial_z(const PerturbationSeries& f, int channel);
PerturbationSeries second_partial_z(const PerturbationSeries& f, int channel);

/// Ordinary complex arithmetic: sum coeff * z_i^k * conj(z_j)^l.
Complex eval_semiclassical(const PerturbationSeries& g,
                           std::span<const Complex> z);

/// Constants gamma > 0, delta1 >= 0, delta2 >= 0 of the sector conditions.
struct SectorBounds {
  double gamma = 1.0;
  double delta1 = 0.0;
  double delta2 = 0.0;

  void validate() const;
};

struct SectorMargins {
  double first = 0.0;   // (1/gamma^2) sum |z_i|^2 + delta1 - sum |df/dz_i|^2
  double second = 0.0;  // delta2 - sum |d2f/dz_i^2|^2

  bool admissible() const { return first >= 0.0 && second >= 0.0; }
};

/// Precomputed derivatives for repeated margin evaluation.
class SectorEvaluator {
 public:
  SectorEvaluator(const PerturbationSeries& f, const SectorBounds& bounds);
  SectorMargins operator()(std::span<const Complex> z) const;

 private:
  SectorBounds bounds_;
  std::vector<PerturbationSeries> first_;
  std::vector<PerturbationSeries> second_;
};

SectorMargins sector_margins(const PerturbationSeries& f,
                             const SectorBounds& bounds,
                             std::span<const Complex> z);

/// Uniform grid over squared magnitudes (|z_1|^2, |z_2|^2) on
/// [0, max1] x [0, max2] with `cells1` x `cells2` sample points (endpoints
/// included).
struct MagnitudeGrid {
  double max1 = 1.0;
  double max2 = 1.0;
  int cells1 = 50;
  int cells2 = 50;
  int phases = 8;

  double value1(int c) const;
  double value2(int c) const;
};

struct RegionCell {
  double z1sq = 0.0;
  double z2sq = 0.0;
  bool admissible = false;
  SectorMargins worst;  // componentwise minimum over sampled phases
};

/// Row-major over (z1 index, z2 index). A cell is admissible iff both margins
/// are nonnegative at every sampled phase combination. Supports p <= 2.
std::vector<RegionCell> scan_sector_region(const PerturbationSeries& f,
                                           const SectorBounds& bounds,
                                           const MagnitudeGrid& grid);

}  // namespace qrstab

#endif  // QRSTAB_PERTURBATION_HPP
