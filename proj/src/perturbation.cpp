// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qrstab/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qrstab {

PerturbationSeries::PerturbationSeries(int channels) : channels_(channels) {
  if (channels <= 0) throw std::invalid_argument("series needs at least one channel");
}

void PerturbationSeries::add(const Monomial& m, Complex c) {
  if (m.i < 1 || m.i > channels_ || m.j < 1 || m.j > channels_) {
    throw std::out_of_range("monomial channel index outside 1.." +
                            std::to_string(channels_));
  }
  if (m.k < 0 || m.l < 0) throw std::invalid_argument("negative monomial power");
  if (m.k + m.l > kMaxDegree) {
    throw std::invalid_argument("monomial degree " + std::to_string(m.k + m.l) +
                                " exceeds cap " + std::to_string(kMaxDegree));
  }
  auto [it, inserted] = coeffs_.try_emplace(m, c);
  if (!inserted) it->second += c;
  if (it->second == Complex{}) coeffs_.erase(it);
}

Complex PerturbationSeries::coeff(const Monomial& m) const {
  auto it = coeffs_.find(m);
  return it == coeffs_.end() ? Complex{} : it->second;
}

int PerturbationSeries::max_degree() const {
  int d = 0;
  for (const auto& [m, c] : coeffs_) d = std::max(d, m.k + m.l);
  return d;
}

PerturbationSeries PerturbationSeries::operator+(const PerturbationSeries& other) const {
  PerturbationSeries out(std::max(channels_, other.channels_));
  for (const auto& [m, c] : coeffs_) out.add(m, c);
  for (const auto& [m, c] : other.coeffs_) out.add(m, c);
  return out;
}

PerturbationSeries PerturbationSeries::operator*(Complex scale) const {
  PerturbationSeries out(channels_);
  for (const auto& [m, c] : coeffs_) out.add(m, c * scale);
  return out;
}

std::vector<SelfAdjointViolation> validate_selfadjoint(const PerturbationSeries& f,
                                                       double tol) {
  std::vector<SelfAdjointViolation> out;
  auto check = [&](const Monomial& m) {
    const Monomial mirror{m.j, m.i, m.l, m.k};
    const double r = std::abs(f.coeff(m) - std::conj(f.coeff(mirror)));
    if (r > tol) out.push_back({m, r});
  };
  for (const auto& [m, c] : f.terms()) {
    check(m);
    // mirror terms absent from the map would otherwise go unchecked
    const Monomial mirror{m.j, m.i, m.l, m.k};
    if (!f.terms().contains(mirror)) check(mirror);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) { return a.index == b.index; }),
            out.end());
  return out;
}

namespace {

void check_channel(const PerturbationSeries& f, int channel) {
  if (channel < 1 || channel > f.channels()) {
    throw std::out_of_range("channel " + std::to_string(channel) +
                            " outside 1.." + std::to_string(f.channels()));
  }
}

}  // namespace

PerturbationSeries partial_z(const PerturbationSeries& f, int channel) {
  check_channel(f, channel);
  PerturbationSeries out(f.channels());
  for (const auto& [m, c] : f.terms()) {
    if (m.i != channel || m.k < 1) continue;
    out.add({m.i, m.j, m.k - 1, m.l}, static_cast<double>(m.k) * c);
  }
  return out;
}

PerturbationSeries second_partial_z(const PerturbationSeries& f, int channel) {
  check_channel(f, channel);
  PerturbationSeries out(f.channels());
  for (const auto& [m, c] : f.terms()) {
    if (m.i != channel || m.k < 2) continue;
    out.add({m.i, m.j, m.k - 2, m.l}, static_cast<double>(m.k * (m.k - 1)) * c);
  }
  return out;
}

Complex eval_semiclassical(const PerturbationSeries& g, std::span<const Complex> z) {
  if (static_cast<int>(z.size()) < g.channels()) {
    throw std::invalid_argument("evaluation point has fewer entries than channels");
  }
  Complex sum{};
  for (const auto& [m, c] : g.terms()) {
    sum += c * std::pow(z[m.i - 1], m.k) * std::pow(std::conj(z[m.j - 1]), m.l);
  }
  return sum;
}

void SectorBounds::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
  if (!(delta1 >= 0.0)) throw std::invalid_argument("delta1 must be nonnegative");
  if (!(delta2 >= 0.0)) throw std::invalid_argument("delta2 must be nonnegative");
}

SectorEvaluator::SectorEvaluator(const PerturbationSeries& f, const SectorBounds& bounds)
    : bounds_(bounds) {
  bounds_.validate();
  for (int i = 1; i <= f.channels(); ++i) {
    first_.push_back(partial_z(f, i));
    second_.push_back(second_partial_z(f, i));
  }
}

SectorMargins SectorEvaluator::operator()(std::span<const Complex> z) const {
  double zsq = 0.0, d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < first_.size(); ++i) {
    zsq += std::norm(z[i]);
    d1 += std::norm(eval_semiclassical(first_[i], z));
    d2 += std::norm(eval_semiclassical(second_[i], z));
  }
  const double g2 = bounds_.gamma * bounds_.gamma;
  return {zsq / g2 + bounds_.delta1 - d1, bounds_.delta2 - d2};
}

SectorMargins sector_margins(const PerturbationSeries& f, const SectorBounds& bounds,
                             std::span<const Complex> z) {
  return SectorEvaluator(f, bounds)(z);
}

double MagnitudeGrid::value1(int c) const {
  return cells1 == 1 ? 0.0 : max1 * c / (cells1 - 1);
}

double MagnitudeGrid::value2(int c) const {
  return cells2 == 1 ? 0.0 : max2 * c / (cells2 - 1);
}

std::vector<RegionCell> scan_sector_region(const PerturbationSeries& f,
                                           const SectorBounds& bounds,
                                           const MagnitudeGrid& grid) {
  if (grid.cells1 <= 0 || grid.cells2 <= 0) throw std::invalid_argument("grid has zero cells");
  if (grid.phases <= 0) throw std::invalid_argument("phase sampling needs at least one phase");
  const int p = f.channels();
  if (p < 1 || p > 2) throw std::invalid_argument("phase-sampled scan supports 1 or 2 channels");

  const SectorEvaluator eval(f, bounds);
  std::vector<Complex> unit(grid.phases);
  for (int s = 0; s < grid.phases; ++s) {
    unit[s] = std::polar(1.0, 2.0 * std::numbers::pi * s / grid.phases);
  }
  const int phases2 = p == 2 ? grid.phases : 1;

  std::vector<RegionCell> cells;
  cells.reserve(static_cast<std::size_t>(grid.cells1) * grid.cells2);
  for (int a = 0; a < grid.cells1; ++a) {
    for (int b = 0; b < grid.cells2; ++b) {
      RegionCell cell;
      cell.z1sq = grid.value1(a);
      cell.z2sq = p == 2 ? grid.value2(b) : 0.0;
      const double r1 = std::sqrt(cell.z1sq), r2 = std::sqrt(cell.z2sq);
      cell.worst = {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
      for (int s1 = 0; s1 < grid.phases; ++s1) {
        for (int s2 = 0; s2 < phases2; ++s2) {
          Complex z[2] = {r1 * unit[s1], r2 * unit[s2]};
          const SectorMargins m = eval(std::span<const Complex>(z, p));
          cell.worst.first = std::min(cell.worst.first, m.first);
          cell.worst.second = std::min(cell.worst.second, m.second);
        }
      }
      cell.admissible = cell.worst.admissible();
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace qrstab
