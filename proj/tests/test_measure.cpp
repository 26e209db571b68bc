#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fspec/measure.hpp"

using namespace fspec;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent closed form for the middle-thirds Cantor measure:
// mu(xi) = exp(-i pi xi) * prod_{m>=1} cos(2 pi xi 3^-m)
Complex cantor_oracle(double xi) {
  double mod = 1;
  double s = xi;
  for (int m = 1; m < 200; ++m) {
    s /= 3.0;
    mod *= std::cos(2 * kPi * s);
  }
  return std::polar(mod, -kPi * xi);
}

Complex direct_sum(const AtomicMeasure& a, std::span<const double> z) {
  Complex s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto p = a.point(i);
    double dot = 0;
    for (std::size_t c = 0; c < z.size(); ++c) dot += z[c] * p[c];
    s += a.weights[i] * std::polar(1.0, -2 * kPi * dot);
  }
  return s;
}

Complex ft1(const Measure& m, double x, double tol = kDefaultTailTol) { return m.ft(std::vector<double>{x}, tol); }

}  // namespace

TEST_CASE("ft at zero is the total mass") {
  CHECK(std::abs(ft1(cantor_measure(1.0 / 3), 0.0) - 1.0) < 1e-15);
  auto half = Measure::mixture({0.5, 0.5}, {Measure::dirac({0.0}), cantor_measure(1.0 / 3)});
  CHECK(half.mass() == doctest::Approx(1.0).epsilon(1e-15));
  AtomicMeasure a;
  a.add(std::vector<double>{0.1}, 0.25);
  a.add(std::vector<double>{0.7}, 0.25);
  auto sub = Measure::atomic(a);
  CHECK(sub.mass() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(ft1(sub, 0.0) - 0.5) < 1e-12);
}

TEST_CASE("Lebesgue on [0,1] matches sin(pi x)/(pi x)") {
  auto leb = lebesgue_unit_interval();
  CHECK(std::abs(ft1(leb, 0.5)) == doctest::Approx(2.0 / kPi).epsilon(1e-9));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-200.0, 200.0);
  for (int i = 0; i < 200; ++i) {
    double x = U(rng);
    Complex want = std::polar(std::sin(kPi * x) / (kPi * x), -kPi * x);
    CHECK(std::abs(ft1(leb, x) - want) < 2e-10);
  }
}

TEST_CASE("Cantor product agrees with the cosine-product closed form") {
  auto c = cantor_measure(1.0 / 3);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1e4, 1e4);
  for (int i = 0; i < 200; ++i) {
    double x = U(rng);
    CHECK(std::abs(ft1(c, x) - cantor_oracle(x)) < 1e-9);
  }
}

TEST_CASE("Cantor ft does not decay along powers of three") {
  auto c = cantor_measure(1.0 / 3);
  Complex base = ft1(c, 1.0);
  double p = 1;
  for (int m = 0; m <= 6; ++m, p *= 3) CHECK(std::abs(ft1(c, p) - base) < 1e-9);
}

TEST_CASE("Dirac at the origin has ft identically one") {
  auto d = Measure::dirac({0.0});
  for (double x : {0.0, 1.0, -3.7, 1e6}) CHECK(std::abs(ft1(d, x) - 1.0) < 1e-15);
}

TEST_CASE("modulus bound and conjugate symmetry") {
  std::vector<Measure> corpus = {cantor_measure(1.0 / 3), cantor_measure(0.2), lebesgue_unit_interval(),
                                 Measure::self_similar(1.0 / 3, {0, 1.0 / 3, 2.0 / 3}, {0.25, 0.5, 0.25})};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-5e3, 5e3);
  for (const auto& m : corpus)
    for (int i = 0; i < 100; ++i) {
      double x = U(rng);
      Complex a = ft1(m, x), b = ft1(m, -x);
      CHECK(std::abs(a) <= m.mass() + 1e-10);
      CHECK(std::abs(b - std::conj(a)) < 2e-10);
    }
}

TEST_CASE("refinement identity ft(xi) = g(xi) ft(r xi)") {
  const double r = 0.25;
  std::vector<double> t = {0.0, 0.3, 0.75}, p = {0.2, 0.5, 0.3};
  auto m = Measure::self_similar(r, t, p);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1e3, 1e3);
  for (int i = 0; i < 100; ++i) {
    double x = U(rng);
    Complex g = 0;
    for (std::size_t j = 0; j < t.size(); ++j) g += p[j] * std::polar(1.0, -2 * kPi * t[j] * x);
    CHECK(std::abs(ft1(m, x) - g * ft1(m, r * x)) <= 2 * kDefaultTailTol + 1e-12);
  }
}

TEST_CASE("product law against discretize-then-sum") {
  auto c = cantor_measure(1.0 / 3);
  auto prod = Measure::product({c, c});
  const int level = 8;
  auto atoms = prod.discretize(level);
  CHECK(atoms.size() == 65536);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> z = {U(rng), U(rng)};
    // each atom moves at most 3^-level per coordinate inside its cylinder
    double disc = 2 * kPi * (std::abs(z[0]) + std::abs(z[1])) * std::pow(3.0, -level);
    Complex f = prod.ft(z);
    CHECK(std::abs(f - direct_sum(atoms, z)) <= 2 * kDefaultTailTol + disc);
    CHECK(std::abs(f - ft1(c, z[0]) * ft1(c, z[1])) <= 2 * kDefaultTailTol);
  }
}

TEST_CASE("convolution power is the pointwise power") {
  auto c = cantor_measure(1.0 / 3);
  auto c3 = Measure::conv_power(c, 3);
  for (double x : {0.3, 7.1, -41.5, 1234.5}) {
    Complex a = ft1(c, x, 1e-12);
    CHECK(std::abs(ft1(c3, x, 3e-12) - a * a * a) < 1e-14);
  }
}

TEST_CASE("convolution square of Cantor equals the (1/4,1/2,1/4) self-similar measure") {
  auto c2 = Measure::conv_power(cantor_measure(1.0 / 3), 2);
  auto w = Measure::self_similar(1.0 / 3, {0.0, 2.0 / 3, 4.0 / 3}, {0.25, 0.5, 0.25});
  for (double x : {0.1, 2.5, 97.0, -513.25}) CHECK(std::abs(ft1(c2, x) - ft1(w, x)) < 5e-10);
}

TEST_CASE("affine image shifts phase and rescales frequency") {
  auto c = cantor_measure(1.0 / 3);
  auto a = Measure::affine(c, {2.0}, {1.0});
  for (double x : {0.2, 3.3, -17.0}) {
    Complex want = std::polar(1.0, -2 * kPi * x) * ft1(c, 2 * x);
    CHECK(std::abs(ft1(a, x) - want) < 1e-12);
  }
  CHECK(a.bounding_box().lo[0] == doctest::Approx(1.0));
  CHECK(a.bounding_box().hi[0] == doctest::Approx(3.0));
}

TEST_CASE("ft_line matches pointwise evaluation across resync boundaries") {
  std::vector<Measure> corpus = {cantor_measure(1.0 / 3),
                                 Measure::product({cantor_measure(1.0 / 3), cantor_measure(0.25)}),
                                 Measure::affine(cantor_measure(0.2), {1.5}, {-0.3})};
  for (const auto& m : corpus) {
    const auto d = static_cast<std::size_t>(m.dim());
    std::vector<double> z0(d, 1.0e5), step(d, 0.0371);
    z0[0] = 2.5e5;
    std::vector<Complex> out(1000);
    m.ft_line(z0, step, kDefaultTailTol, out);
    for (std::size_t i = 0; i < out.size(); i += 37) {
      std::vector<double> z(d);
      for (std::size_t c = 0; c < d; ++c) z[c] = z0[c] + static_cast<double>(i) * step[c];
      CHECK(std::abs(out[i] - m.ft(z)) < 1e-9);
    }
  }
}

TEST_CASE("discretization counts and weights") {
  auto c = cantor_measure(1.0 / 3);
  auto l1 = c.discretize(1);
  REQUIRE(l1.size() == 2);
  CHECK(l1.coords[0] == 0.0);
  CHECK(l1.coords[1] == doctest::Approx(2.0 / 3));
  CHECK(l1.weights[0] == 0.5);
  CHECK(l1.weights[1] == 0.5);
  auto l10 = c.discretize(10);
  CHECK(l10.size() == 1024);
  for (double w : l10.weights) CHECK(w == std::ldexp(1.0, -10));
  for (double x : l10.coords) CHECK((x >= 0.0 && x <= 1.0));
  auto p3 = Measure::product({c, c}).discretize(3);
  CHECK(p3.size() == 64);
  for (double w : p3.weights) CHECK(w == 1.0 / 64);
  CHECK(p3.total_mass() == 1.0);
}

TEST_CASE("convolution discretization merges coincident sums") {
  auto c2 = Measure::conv_power(cantor_measure(1.0 / 3), 2).discretize(3);
  CHECK(c2.size() == 27);
  CHECK(c2.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(Measure::self_similar(1.0, {0, 1}, {0.5, 0.5}), Error);
  CHECK_THROWS_AS(Measure::self_similar(0.5, {0, 0}, {0.5, 0.5}), Error);
  CHECK_THROWS_AS(Measure::self_similar(0.5, {0, 1}, {0.5, 0.6}), Error);
  auto c = cantor_measure(1.0 / 3);
  CHECK_THROWS_AS(ft1(c, std::nan("")), Error);
  CHECK_THROWS_AS(ft1(c, 1.0, 0.0), Error);
  CHECK_THROWS_AS(ft1(c, 1.0, 1e-2), Error);
  auto slow = Measure::self_similar(0.999, {0, 0.001}, {0.5, 0.5});
  try {
    ft1(slow, 1e12, 1e-3);
    FAIL("expected truncation failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::truncation);
  }
  CHECK_THROWS_AS(c.discretize(30, 1000), Error);
  auto proj = Measure::projected(Measure::product({c, c}), Frame::axes(2, {0}));
  CHECK_THROWS_AS(proj.discretize(2), Error);
}

TEST_CASE("JSON round trip") {
  auto c = cantor_measure(1.0 / 3);
  auto m = Measure::mixture({0.5, 0.5}, {Measure::product({c, Measure::conv_power(c, 2)}),
                                         Measure::affine(Measure::product({c, c}), {1.0, 2.0}, {0.0, -1.0})});
  auto back = Measure::from_json(m.to_json());
  CHECK(back.to_json() == m.to_json());
  std::vector<double> z = {3.7, -11.2};
  CHECK(std::abs(back.ft(z) - m.ft(z)) < 1e-15);

  auto spec = Measure::from_json(
      R"({"type":"selfsimilar1d","ratio":"1/3","translations":[0,"2/3"],"weights":[0.5,0.5]})");
  CHECK(std::abs(ft1(spec, 1.0) - ft1(c, 1.0)) < 1e-15);
  auto pr = Measure::from_json(R"({"type":"projected","frame":[[0.6,0.8]],"base":{"type":"product","factors":[
      {"type":"cantor","alpha":"1/3"},{"type":"cantor","alpha":"1/3"}]}})");
  CHECK(pr.dim() == 1);
  CHECK_THROWS_AS(Measure::from_json("{"), Error);
  CHECK_THROWS_AS(Measure::from_json(R"({"type":"nope"})"), Error);
  CHECK_THROWS_AS(Measure::from_json(R"({"type":"atomic","dim":1,"points":[[0]],"weights":[0.5]})"), Error);
  CHECK_NOTHROW(Measure::from_json(R"({"type":"atomic","dim":1,"points":[[0]],"weights":[0.5],"subprobability":true})"));
}

TEST_CASE("dilation hints") {
  auto c = cantor_measure(1.0 / 3);
  auto h = Measure::product({c, c}).dilation_hints();
  REQUIRE(h.size() == 1);
  CHECK(h[0] == doctest::Approx(3.0));
  CHECK(Measure::product({c, cantor_measure(0.25)}).dilation_hints().empty());
  CHECK(Measure::product({c, Measure::dirac({0.5})}).dilation_hints().size() == 1);
}
