#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fspec/projection.hpp"

using namespace fspec;

namespace {

constexpr double kPi = std::numbers::pi;

// Kolmogorov-Smirnov distance of a sample against U[0,1].
double ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max({d, (static_cast<double>(i) + 1) / n - u[i], u[i] - static_cast<double>(i) / n});
  return d;
}

}  // namespace

TEST_CASE("Grassmannian samples are orthonormal and reproducible") {
  for (auto [d, k] : {std::pair{2, 1}, {3, 1}, {3, 2}, {5, 3}}) {
    for (std::uint64_t seed : {1ULL, 99ULL, 123456789ULL}) {
      Frame f = sample_grassmannian(d, k, seed);
      CHECK(f.dim() == k);
      CHECK(f.ambient_dim() == d);
      CHECK(f.max_gram_error() < 1e-12);
      CHECK(projector_distance(f, sample_grassmannian(d, k, seed)) == 0.0);
      CHECK(projector_distance(f, sample_grassmannian(d, k, seed + 1)) > 1e-6);
    }
  }
}

TEST_CASE("lines in the plane have uniform angles") {
  std::vector<double> u;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const Point v = sample_grassmannian(2, 1, s).vector(0);
    double a = std::atan2(v[1], v[0]);
    if (a < 0) a += kPi;
    if (a >= kPi) a -= kPi;
    u.push_back(a / kPi);
  }
  // 1% critical value for n = 10^4 is about 0.0163
  CHECK(ks_uniform(u) < 0.0163);
}

TEST_CASE("planes in space have uniformly distributed normals") {
  // |n_z| of a uniform unit normal is uniform on [0,1]
  std::vector<double> u;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    auto P = sample_grassmannian(3, 2, s).projector();
    u.push_back(std::sqrt(std::max(0.0, 1 - P[8])));
  }
  CHECK(ks_uniform(u) < 0.0163);
}

TEST_CASE("frame validation, lift and project") {
  CHECK_THROWS_AS(Frame(2, {{1.0, 0.1}}), Error);
  CHECK_THROWS_AS(Frame(2, {{1.0, 0.0}, {0.0, 1.0}}), Error);
  CHECK_THROWS_AS(Frame(3, {{1.0, 0.0}}), Error);
  Frame f = sample_grassmannian(4, 2, 7);
  Point y = {0.3, -1.2};
  Point x = f.lift(y);
  Point back = f.project(x);
  CHECK(back[0] == doctest::Approx(y[0]).epsilon(1e-13));
  CHECK(back[1] == doctest::Approx(y[1]).epsilon(1e-13));
  // projector is idempotent and symmetric
  auto P = f.projector();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double pp = 0;
      for (int c = 0; c < 4; ++c) pp += P[a * 4 + c] * P[c * 4 + b];
      CHECK(pp == doctest::Approx(P[a * 4 + b]).epsilon(1e-12).scale(1));
      CHECK(P[a * 4 + b] == doctest::Approx(P[b * 4 + a]));
    }
  Frame ax = Frame::axes(3, {0, 2});
  Point q = ax.project(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(q == Point{1.0, 3.0});
  // same plane, different basis
  const double c = std::cos(0.4), s = std::sin(0.4);
  Frame rot(3, {{c, 0, s}, {-s, 0, c}});
  CHECK(projector_distance(ax, rot) < 1e-15);
}

TEST_CASE("projected Fourier transform equals a direct sum over projected atoms") {
  AtomicMeasure a;
  a.dim = 2;
  a.add(std::vector<double>{0.0, 0.0}, 0.2);
  a.add(std::vector<double>{1.0, 0.5}, 0.5);
  a.add(std::vector<double>{0.3, 0.9}, 0.3);
  Measure mu = Measure::atomic(a);
  Frame f = sample_grassmannian(2, 1, 5);
  Measure pushed = project_measure(mu, f);
  CHECK(pushed.dim() == 1);
  const Point& v = f.vector(0);
  for (double y : {0.0, 0.7, -3.1, 41.5}) {
    Complex expect = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto p = a.point(i);
      expect += a.weights[i] * std::polar(1.0, -2 * kPi * y * (v[0] * p[0] + v[1] * p[1]));
    }
    Complex got = pushed.ft(std::vector<double>{y});
    CHECK(std::abs(got - expect) < 1e-12);
  }
  // product of Cantor measures projected onto a line
  Measure c = cantor_measure(1.0 / 3);
  Measure prod = Measure::product({c, c});
  Measure line = project_measure(prod, f);
  for (double y : {2.0, 17.25}) {
    Point z = f.lift(std::vector<double>{y});
    CHECK(std::abs(line.ft(std::vector<double>{y}) - prod.ft(z)) < 1e-12);
  }
  CHECK_THROWS_AS(project_measure(mu, sample_grassmannian(3, 1, 1)), Error);
}

TEST_CASE("projecting atoms merges coincident images") {
  AtomicMeasure a;
  a.dim = 2;
  a.add(std::vector<double>{0.0, 0.0}, 0.25);
  a.add(std::vector<double>{0.0, 1.0}, 0.25);
  a.add(std::vector<double>{1.0, 0.0}, 0.25);
  a.add(std::vector<double>{1.0, 1.0}, 0.25);
  AtomicMeasure px = project_points(a, Frame::axes(2, {0}));
  REQUIRE(px.size() == 2);
  CHECK(px.weights[0] == doctest::Approx(0.5));
  CHECK(px.total_mass() == doctest::Approx(1.0));
  // diagonal: (0,1) and (1,0) coincide
  const double r = 1 / std::sqrt(2.0);
  AtomicMeasure pd = project_points(a, Frame(2, {{r, r}}));
  CHECK(pd.size() == 3);
  CHECK(pd.total_mass() == doctest::Approx(1.0));
}

TEST_CASE("box dimension of reference sets") {
  AtomicMeasure cantor = cantor_measure(1.0 / 3).discretize(12);
  // shift off the box edges so that left endpoints 2/3 etc. fall inside cylinders
  for (double& x : cantor.coords) x += 1e-9;
  BoxDimension bc = box_dimension(cantor, 2, 10);
  CHECK(std::abs(bc.dimension - std::log(2.0) / std::log(3.0)) < 0.05);
  CHECK(bc.scales.size() == 9);
  CHECK(bc.warning.empty());
  CHECK(bc.counts.front() == 4);  // [2/9,1/3] and [2/3,7/9] straddle 1/4 and 3/4

  AtomicMeasure line;
  line.dim = 1;
  for (int i = 0; i < 4096; ++i) line.add(std::vector<double>{(i + 0.5) / 4096}, 1.0 / 4096);
  BoxDimension bl = box_dimension(line, 2, 10);
  CHECK(bl.dimension == doctest::Approx(1.0).epsilon(0.03));
  CHECK(bl.warning.empty());
  BoxDimension sat = box_dimension(line, 6, 13);
  CHECK_FALSE(sat.warning.empty());

  AtomicMeasure one;
  one.dim = 2;
  one.add(std::vector<double>{0.1, 0.2}, 1.0);
  try {
    box_dimension(one, 0, 5);
    FAIL("expected a degenerate error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate);
  }
  CHECK_THROWS_AS(box_dimension(line, 3, 4), Error);
}
