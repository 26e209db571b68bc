#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

#include "doctest.h"
#include "fspec/constructions.hpp"
#include "fspec/spectrum.hpp"

using namespace fspec;

namespace {

// Exact membership oracle for lattices with rational steps: every closed
// interval endpoint of the stage sets lies on the grid 1/D, so a half-open
// cell meets the intersection iff one of its grid points does.
struct ExactStage {
  std::int64_t eta, L;  // neighbourhood 1/eta of (1/L) Z
};

bool member(std::int64_t i, std::int64_t D, const std::vector<ExactStage>& st) {
  for (const auto& s : st) {
    // distance from i/D to the nearest k/L, compared with 1/eta, scaled by D*L*eta
    const std::int64_t k = (i * s.L + D / 2) / D;
    std::int64_t best = INT64_MAX;
    for (std::int64_t kk : {k - 1, k, k + 1}) best = std::min<std::int64_t>(best, std::llabs(i * s.L - kk * D));
    if (best * s.eta > D * s.L) return false;
  }
  return true;
}

std::int64_t oracle_count(const std::vector<ExactStage>& st, std::int64_t D, std::int64_t N) {
  std::set<std::int64_t> cells;
  for (std::int64_t i = 0; i <= D; ++i)
    if (member(i, D, st)) cells.insert(std::min(N - 1, i * N / D));
  return static_cast<std::int64_t>(cells.size());
}

}  // namespace

TEST_CASE("closed-form dimensions of the three-Cantor example") {
  CantorTriple ex = build_example(1.0 / 3, 1.0 / 4, 1.0 / 5);
  CHECK(ex.dim_H == doctest::Approx(1.5616063).epsilon(1e-7));
  // per-axis correlation dimension of the convolved weights (1/4, 1/2, 1/4)
  double s = 0;
  for (double a : {1.0 / 3, 1.0 / 4, 1.0 / 5}) s += l2_dimension_self_similar({0.25, 0.5, 0.25}, a);
  CHECK(ex.dim_S_conv2 == doctest::Approx(s).epsilon(1e-14));
  CHECK(ex.dim_S_conv2 == doctest::Approx(2.2097315).epsilon(1e-7));
  CHECK(l2_dimension(ex.mu_conv2) == doctest::Approx(ex.dim_S_conv2).epsilon(1e-13));
  CHECK(l2_dimension(ex.mu) == doctest::Approx(ex.dim_H).epsilon(1e-13));
  CHECK(ex.mu.dim() == 3);
  CHECK(ex.mu_conv2.kind() == NodeKind::conv_power);
  CHECK(ex.profile.d == 3);
  CHECK(ex.profile.sobolev_conv.at(2) == ex.dim_S_conv2);
  CHECK(ex.profile.spectrum.value(0.5) == ex.dim_S_conv2 / 2);
  CHECK(ex.profile.spectrum.value(1.0) == ex.dim_H);

  CantorTriple sym = build_example(1.0 / 3, 1.0 / 3, 1.0 / 3);
  CHECK(sym.dim_H == doctest::Approx(3 * std::log(2.0) / std::log(3.0)).epsilon(1e-14));
  CHECK(sym.dim_S_conv2 == doctest::Approx(3 * std::log(8.0 / 3) / std::log(3.0)).epsilon(1e-14));
  CHECK(sym.dim_H == doctest::Approx(1.8927893).epsilon(1e-7));
  CHECK(sym.dim_S_conv2 == doctest::Approx(2.6783678).epsilon(1e-7));

  CHECK_THROWS_AS(build_example(0.4, 0.25, 0.2), Error);
  CHECK_THROWS_AS(build_example(0.0, 0.25, 0.2), Error);
}

TEST_CASE("half the convolution dimension beats half the Hausdorff dimension") {
  for (double a = 0.02; a <= 1.0 / 3; a += 0.0311)
    for (double b = 0.05; b <= 1.0 / 3; b += 0.047)
      for (double c : {0.1, 0.2, 1.0 / 3}) {
        CantorTriple ex = build_example(a, b, c);
        CHECK(ex.dim_S_conv2 / 2 > ex.dim_H / 2);
      }
}

TEST_CASE("curve data matches the closed forms") {
  CantorTriple ex = build_example(1.0 / 3, 1.0 / 4, 1.0 / 5);
  auto pts = exceptional_curves(ex);
  CHECK(pts.size() == 2 * 3 * 201);
  const double edge = (ex.dim_S_conv2 - 2) / 2;
  CHECK(edge == doctest::Approx(0.1048657).epsilon(1e-6));
  int n1 = 0, n2 = 0;
  for (const auto& p : pts) {
    CHECK(p.value >= 0);
    CHECK(p.value <= 2);
    if (p.method == "fourier_spectrum") {
      CHECK(p.value == std::clamp(2 + 2 * p.u - ex.dim_S_conv2, 0.0, 2.0));
      CHECK(p.value == doctest::Approx(spectrum_bound(ex.profile, p.k, p.u, 0.5)).epsilon(1e-15).scale(1));
      CHECK((p.value == 0) == (p.u <= edge));
      (p.k == 1 ? n1 : n2)++;
    } else if (p.method == "mattila") {
      CHECK(p.value == std::min(2.0, p.k == 1 ? 1 + p.u : p.u));
      CHECK(p.value == classical_bounds(ex.profile, p.k, p.u).at("mattila").value);
    } else {
      REQUIRE(p.method == "peres_schlag");
      CHECK(p.value == std::clamp(2 + p.u - ex.dim_H, 0.0, 2.0));
    }
  }
  CHECK(n1 == 201);
  CHECK(n2 == 201);
  CHECK(pts.front().u == 0.0);
  // k = 2 panel spans [0, dim_H]
  double umax2 = 0;
  for (const auto& p : pts)
    if (p.k == 2) umax2 = std::max(umax2, p.u);
  CHECK(umax2 == doctest::Approx(ex.dim_H).epsilon(1e-15));
  for (const auto& p : pts)
    if (p.k == 2 && p.u == 0 && p.method == "peres_schlag") CHECK(p.value == doctest::Approx(0.4383937).epsilon(1e-6));

  for (const auto& p : exceptional_curves(ex, PsVariant::rank))
    if (p.method == "peres_schlag") CHECK(p.value == std::clamp(p.k + p.u - ex.dim_H, 0.0, 2.0));
}

TEST_CASE("exact lattice denominators") {
  CHECK(exact_lattice_denominator(4096, Rational(1, 2)) == 64);
  CHECK(exact_lattice_denominator(4096, Rational(1, 4)) == 8);
  CHECK(exact_lattice_denominator(4096, Rational(3, 4)) == 512);
  CHECK(exact_lattice_denominator(16, Rational(0)) == 1);
  CHECK(exact_lattice_denominator(16, Rational(1)) == 16);
  CHECK_FALSE(exact_lattice_denominator(8, Rational(1, 2)).has_value());
  CHECK_FALSE(exact_lattice_denominator(64, Rational(1, 4)).has_value());
  CHECK(exact_lattice_denominator(3486784401LL, Rational(1, 4)) == 243);
}

TEST_CASE("stage counts agree with exhaustive enumeration") {
  LatticeSetParams p;
  p.eta = {16, 256, 65536};
  p.stages = 3;
  auto sets = lattice_sets(p);
  CHECK(sets.warnings.empty());
  const std::int64_t D = std::int64_t{1} << 24;  // multiple of every L * eta
  struct Case {
    const GridSet* g;
    Rational e;
  };
  for (auto [g, e] : {Case{&sets.A, p.u}, Case{&sets.B, p.s - p.u}, Case{&sets.C, p.u * 2 - p.s}}) {
    std::vector<ExactStage> st;
    for (int m = 0; m < 3; ++m) {
      st.push_back({p.eta[m], *exact_lattice_denominator(p.eta[m], e)});
      const auto& sc = g->stages[static_cast<std::size_t>(m)];
      CHECK(sc.exact);
      CHECK(sc.certified);
      CHECK(sc.count == oracle_count(st, D, p.eta[m]));
    }
    CHECK(static_cast<std::int64_t>(g->cells.size()) == g->stages.back().count);
  }
}

TEST_CASE("stage one with an irrational lattice step") {
  LatticeSetParams p;  // eta = (8, 64, 4096), u = 1/2, s = 3/4
  auto sets = lattice_sets(p);
  // cells [c/8, (c+1)/8) within 1/8 of k / sqrt(8)
  const double step = 1 / std::sqrt(8.0);
  int expect = 0;
  for (int c = 0; c < 8; ++c) {
    bool hit = false;
    for (int k = 0; k <= 3; ++k) {
      const double lo = k * step - 0.125, hi = k * step + 0.125;
      hit = hit || (lo < (c + 1) / 8.0 && hi >= c / 8.0);
    }
    expect += hit;
  }
  CHECK(sets.A.stages[0].count == expect);
  CHECK_FALSE(sets.A.stages[0].exact);
  CHECK(sets.A.stages[0].certified);
  for (const GridSet* g : {&sets.A, &sets.B, &sets.C})
    for (const auto& sc : g->stages) {
      CHECK(sc.certified);
      // covering constant
      CHECK(sc.constant <= 4.0);
    }
  // finest-stage exponent of A
  CHECK(std::abs(sets.A.stages.back().exponent - 0.5) < 0.15);
}

TEST_CASE("exponent zero leaves neighbourhoods of the endpoints") {
  // d(x, Z) <= 1/eta keeps [0, 1/eta] and [1 - 1/eta, 1]
  LatticeSetParams p;
  p.s = Rational(3, 4);
  p.u = Rational(3, 4);
  p.eta = {16, 256, 65536};
  auto sets = lattice_sets(p);
  CHECK(sets.B.exponent.numerator() == 0);
  for (const auto& sc : sets.B.stages) {
    CHECK(sc.exact);
    CHECK(sc.count == 3);  // cells 0, 1 (closed endpoint 1/eta) and eta - 1
  }
  CHECK(sets.B.cells == std::vector<std::int64_t>{0, 1, 65535});
}

TEST_CASE("parameter validation") {
  LatticeSetParams p;
  p.u = Rational(1, 4);  // below s/2
  CHECK_THROWS_AS(lattice_sets(p), Error);
  p = {};
  p.eta = {8, 4, 4096};
  CHECK_THROWS_AS(lattice_sets(p), Error);
  p = {};
  p.stages = 4;
  CHECK_THROWS_AS(lattice_sets(p), Error);
  p = {};
  p.eta = {8, 16, 64};  // 64 < 16^2
  CHECK(lattice_sets(p).warnings.size() == 1);
  p = {};
  p.eta = {8, 64, std::int64_t{1} << 31};
  try {
    lattice_sets(p);
    FAIL("expected a budget error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::budget);
  }
}

TEST_CASE("projection containment is exact at representable stages") {
  LatticeSetParams p;
  auto r = verify_projection_containment(p, 3);
  CHECK(r.holds);
  CHECK(r.counterexamples == 0);
  CHECK(r.checked == 65 * 9 * 9);
  CHECK_THROWS_AS(verify_projection_containment(p, 1), Error);
  CHECK_THROWS_AS(verify_projection_containment(p, 2), Error);

  LatticeSetParams small;
  small.eta = {16};
  small.stages = 1;
  auto rs = verify_projection_containment(small, 1);
  CHECK(rs.holds);
  CHECK(rs.checked == 5 * 3 * 3);

  // slopes shifted by half a lattice step: a + b c stays on the lattice iff
  // the numerator of b is even
  auto bad = verify_projection_containment(p, 3, Rational(1, 16));
  CHECK_FALSE(bad.holds);
  CHECK(bad.counterexamples == 4 * 65 * 9);
  CHECK(bad.first_counterexample == "0 1/8 1/16");
}

TEST_CASE("projected box dimension of the Cantor square") {
  Measure c = cantor_measure(1.0 / 3);
  Measure sq = Measure::product({c, c});
  MarstrandConfig cfg;
  cfg.frames = 12;
  cfg.level = 8;
  cfg.j_max = 11;
  auto s = marstrand_sample(sq, cfg);
  CHECK(s.rows.size() == 12);
  CHECK(s.fraction_within >= 0.75);
  CHECK(s.min <= s.q10);
  CHECK(s.q10 <= s.median);
  CHECK(s.median <= s.q90);
  CHECK(s.q90 <= s.max);
  CHECK(s.median == doctest::Approx(1.0).epsilon(0.1));
  auto again = marstrand_sample(sq, cfg);
  for (std::size_t i = 0; i < s.rows.size(); ++i) CHECK(again.rows[i].box.dimension == s.rows[i].box.dimension);

  BoxDimension axis = projected_box_dimension(sq, Frame::axes(2, {0}), 8, 2, 10);
  CHECK(std::abs(axis.dimension - std::log(2.0) / std::log(3.0)) < 0.05);

  MarstrandConfig bad = cfg;
  bad.k = 2;
  CHECK_THROWS_AS(marstrand_sample(sq, bad), Error);
  CHECK_THROWS_AS(projected_box_dimension(sq, Frame::axes(3, {0}), 4, 2, 6), Error);
}
