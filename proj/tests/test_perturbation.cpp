// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "qrstab/opa.hpp"
#include "qrstab/perturbation.hpp"

using namespace qrstab;

namespace {

PerturbationSeries opa_series(double chi) { return opa::build_opa({1.0, 1.0, chi}).series; }

PerturbationSeries random_series(int p, std::mt19937_64& rng, int terms) {
  std::uniform_int_distribution<int> ch(1, p), pw(0, 4);
  std::normal_distribution<double> g;
  PerturbationSeries f(p);
  for (int t = 0; t < terms; ++t) f.add({ch(rng), ch(rng), pw(rng), pw(rng)}, {g(rng), g(rng)});
  return f;
}

// Hermitian completion: f + f^*
PerturbationSeries selfadjoint_completion(const PerturbationSeries& f) {
  PerturbationSeries out(f.channels());
  for (const auto& [m, c] : f.terms()) {
    out.add(m, c);
    out.add({m.j, m.i, m.l, m.k}, std::conj(c));
  }
  return out;
}

}  // namespace

TEST_CASE("validate_selfadjoint") {
  CHECK(validate_selfadjoint(opa_series(0.3)).empty());

  PerturbationSeries lone(1);
  lone.add({1, 1, 1, 1}, 1i);
  const auto v = validate_selfadjoint(lone);
  REQUIRE(v.size() == 1);
  CHECK(v[0].index == Monomial{1, 1, 1, 1});
  CHECK(v[0].residual == doctest::Approx(2.0));

  PerturbationSeries real_pair(1);
  real_pair.add({1, 1, 2, 0}, 1.0);
  real_pair.add({1, 1, 0, 2}, 1.0);
  CHECK(validate_selfadjoint(real_pair).empty());

  PerturbationSeries half(2);
  half.add({1, 2, 1, 0}, 1.0);  // mirror (2,1,0,1) absent
  REQUIRE(validate_selfadjoint(half).size() == 2);
}

TEST_CASE("like terms merge and cancel") {
  PerturbationSeries f(1);
  f.add({1, 1, 2, 1}, 1.0);
  f.add({1, 1, 2, 1}, -1.0);
  CHECK(f.empty());
  CHECK_THROWS_AS(f.add({1, 1, 10, 7}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(f.add({2, 1, 1, 0}, 1.0), std::out_of_range);
}

TEST_CASE("formal partial derivatives of the OPA series") {
  const double chi = 0.3;
  const auto f = opa_series(chi);

  const auto d1 = partial_z(f, 1);
  REQUIRE(d1.size() == 1);
  CHECK(d1.coeff({1, 2, 1, 1}) == Complex(0.0, -2.0 * chi));  // -2 i chi z1 z2*

  const auto d2 = partial_z(f, 2);
  REQUIRE(d2.size() == 1);
  CHECK(d2.coeff({2, 1, 0, 2}) == Complex(0.0, chi));  // i chi (z1*)^2

  const auto dd1 = second_partial_z(f, 1);
  REQUIRE(dd1.size() == 1);
  CHECK(dd1.coeff({1, 2, 0, 1}) == Complex(0.0, -2.0 * chi));  // -2 i chi z2*
  CHECK(second_partial_z(f, 2).empty());

  CHECK(partial_z(PerturbationSeries(2), 1).empty());
  CHECK_THROWS_AS(partial_z(f, 3), std::out_of_range);
  CHECK_THROWS_AS(second_partial_z(f, 0), std::out_of_range);

  PerturbationSeries cube(1);
  cube.add({1, 1, 3, 0}, 1.0);
  const auto c2 = second_partial_z(cube, 1);
  REQUIRE(c2.size() == 1);
  CHECK(c2.coeff({1, 1, 1, 0}) == Complex(6.0));
}

TEST_CASE("derivative properties on random sparse series") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto f = random_series(3, rng, 8);
    const auto g = random_series(3, rng, 8);
    const Complex a(0.3, -1.2), b(-2.0, 0.5);
    for (int i = 1; i <= 3; ++i) {
      const auto lhs = partial_z(f * a + g * b, i);
      const auto rhs = partial_z(f, i) * a + partial_z(g, i) * b;
      const auto diff = lhs + rhs * -1.0;
      for (const auto& [m, c] : diff.terms()) CHECK(std::abs(c) < 1e-12);
      const auto twice = partial_z(partial_z(f, i), i);
      const auto direct = second_partial_z(f, i);
      const auto gap = twice + direct * -1.0;
      for (const auto& [m, c] : gap.terms()) CHECK(std::abs(c) < 1e-12);
    }
  }
}

TEST_CASE("semiclassical evaluation") {
  const double chi = 0.25;
  const auto f = opa_series(chi);
  const Complex at_ones[] = {1.0, 1.0};
  CHECK(std::abs(eval_semiclassical(f, at_ones)) < 1e-15);
  const Complex mixed[] = {1.0, 1i};
  const Complex v = eval_semiclassical(f, mixed);
  CHECK(v.real() == doctest::Approx(-2.0 * chi));
  CHECK(std::abs(v.imag()) < 1e-15);
  CHECK(eval_semiclassical(PerturbationSeries(2), mixed) == Complex{});

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const auto h = selfadjoint_completion(random_series(2, rng, 6));
    REQUIRE(validate_selfadjoint(h).empty());
    const Complex z[] = {{g(rng), g(rng)}, {g(rng), g(rng)}};
    const Complex val = eval_semiclassical(h, z);
    CHECK(std::abs(val.imag()) <= 1e-12 * (1.0 + std::abs(val)));
  }
}

TEST_CASE("sector margins") {
  const double chi = 0.1;
  const SectorBounds bounds{4.0, 0.2, 0.3};
  const auto f = opa_series(chi);
  const Complex origin[] = {0.0, 0.0};
  const auto m0 = sector_margins(f, bounds, origin);
  CHECK(m0.first == doctest::Approx(0.2));
  CHECK(m0.second == doctest::Approx(0.3));

  SUBCASE("below the knee the first margin is nonnegative for every z2") {
    const double gamma = 4.0 / 1.0;
    const SectorBounds b{gamma, 0.0, 1.0};
    const double z1sq = 1.0 / (4.0 * gamma * gamma * chi * chi);
    for (double z2sq : {0.0, 1.0, 100.0, 1e6}) {
      const Complex z[] = {std::sqrt(z1sq), std::polar(std::sqrt(z2sq), 0.7)};
      CHECK(sector_margins(f, b, z).first >= 0.0);
    }
  }
  SUBCASE("second margin vanishes on the delta2 ceiling") {
    const SectorBounds b{4.0, 0.0, 0.04};
    const Complex z[] = {0.3, std::sqrt(0.04 / (4.0 * chi * chi))};
    CHECK(std::abs(sector_margins(f, b, z).second) < 1e-15);
  }
  SUBCASE("closed form first margin for the OPA") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 40.0), ph(0.0, 6.283185307179586);
    for (int trial = 0; trial < 200; ++trial) {
      const double a = u(rng), b = u(rng);
      const Complex z[] = {std::polar(std::sqrt(a), ph(rng)), std::polar(std::sqrt(b), ph(rng))};
      const double g2 = bounds.gamma * bounds.gamma;
      const double closed = (a + b) / g2 + bounds.delta1 - 4 * chi * chi * a * b - chi * chi * a * a;
      const double got = sector_margins(f, bounds, z).first;
      CHECK(std::abs(got - closed) <= 1e-12 * (1.0 + std::abs(closed) + (a + b) / g2 + chi * chi * a * (a + 4 * b)));
    }
  }
}

TEST_CASE("scan_sector_region") {
  const double chi = 0.1;
  const SectorBounds bounds{4.0, 0.0, 0.04};
  const auto f = opa_series(chi);
  MagnitudeGrid grid{8.0, 1.5, 50, 50, 8};
  const auto cells = scan_sector_region(f, bounds, grid);
  REQUIRE(cells.size() == 2500);

  SUBCASE("mask is downward closed") {
    auto at = [&](int a, int b) { return cells[static_cast<std::size_t>(a) * 50 + b].admissible; };
    for (int a = 0; a < 50; ++a) {
      for (int b = 0; b < 50; ++b) {
        if (!at(a, b)) continue;
        for (int a2 = 0; a2 <= a; ++a2) {
          for (int b2 = 0; b2 <= b; ++b2) CHECK(at(a2, b2));
        }
      }
    }
  }
  SUBCASE("cells inside the closed-form region are admissible") {
    for (const auto& c : cells) {
      const bool inside = c.z2sq <= opa::region_z2_cap({1.0, 1.0, chi}, bounds, c.z1sq) &&
                          c.z1sq <= opa::lambda_bar({1.0, 1.0, chi}, bounds).numerator_root;
      if (inside) CHECK(c.admissible);
    }
  }
  SUBCASE("zero series admits everything") {
    for (const auto& c : scan_sector_region(PerturbationSeries(2), bounds, grid)) CHECK(c.admissible);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(scan_sector_region(f, bounds, {1.0, 1.0, 0, 5, 8}), std::invalid_argument);
    CHECK_THROWS_AS(scan_sector_region(PerturbationSeries(3), bounds, grid), std::invalid_argument);
  }
}
