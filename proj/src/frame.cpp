#include "fspec/frame.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "fspec/error.hpp"

namespace fspec {

Frame::Frame(int d, std::vector<Point> basis) : d_(d), basis_(std::move(basis)) {
  const int k = dim();
  require(k >= 1 && k < d, ErrorCode::invalid_argument, "frame needs 1 <= k < d");
  for (const auto& v : basis_)
    require(static_cast<int>(v.size()) == d, ErrorCode::dimension_mismatch, "frame vector has wrong length");
  require(max_gram_error() <= 1e-10, ErrorCode::invalid_argument, "frame vectors are not orthonormal");
}

Frame Frame::axes(int d, const std::vector<int>& axis_indices) {
  std::vector<Point> b;
  for (int a : axis_indices) {
    require(a >= 0 && a < d, ErrorCode::invalid_argument, "axis index out of range");
    Point v(static_cast<std::size_t>(d), 0.0);
    v[static_cast<std::size_t>(a)] = 1.0;
    b.push_back(v);
  }
  return Frame(d, std::move(b));
}

Point Frame::lift(std::span<const double> y) const {
  require(static_cast<int>(y.size()) == dim(), ErrorCode::dimension_mismatch, "lift: wrong coordinate count");
  Point x(static_cast<std::size_t>(d_), 0.0);
  for (std::size_t i = 0; i < basis_.size(); ++i)
    for (std::size_t c = 0; c < x.size(); ++c) x[c] += y[i] * basis_[i][c];
  return x;
}

Point Frame::project(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == d_, ErrorCode::dimension_mismatch, "project: wrong point dimension");
  Point y(basis_.size(), 0.0);
  for (std::size_t i = 0; i < basis_.size(); ++i)
    for (std::size_t c = 0; c < x.size(); ++c) y[i] += x[c] * basis_[i][c];
  return y;
}

std::vector<double> Frame::projector() const {
  const auto d = static_cast<std::size_t>(d_);
  std::vector<double> p(d * d, 0.0);
  for (const auto& v : basis_)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) p[a * d + b] += v[a] * v[b];
  return p;
}

double Frame::max_gram_error() const {
  double worst = 0;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      double dot = 0;
      for (std::size_t c = 0; c < basis_[i].size(); ++c) dot += basis_[i][c] * basis_[j][c];
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

Frame sample_grassmannian(int d, int k, std::uint64_t seed) {
  require(k >= 1 && k < d, ErrorCode::invalid_argument, "sample_grassmannian needs 1 <= k < d");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(d, k);
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < d; ++r) g(r, c) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
  std::vector<Point> basis(static_cast<std::size_t>(k), Point(static_cast<std::size_t>(d)));
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < d; ++r) basis[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)] = q(r, c);
  return Frame(d, std::move(basis));
}

double projector_distance(const Frame& a, const Frame& b) {
  require(a.ambient_dim() == b.ambient_dim() && a.dim() == b.dim(), ErrorCode::dimension_mismatch,
          "frames live in different Grassmannians");
  auto pa = a.projector(), pb = b.projector();
  double worst = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) worst = std::max(worst, std::abs(pa[i] - pb[i]));
  return worst;
}

}  // namespace fspec
