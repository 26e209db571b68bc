#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fspec {

using Point = std::vector<double>;

/// Orthonormal k-frame spanning a plane V in G(d,k).
///
/// Two frames describe the same point of the Grassmannian iff their
/// projectors agree; compare through projector(), never through the basis.
class Frame {
 public:
  /// Rows of `basis` are the frame vectors. Throws if the Gram matrix is not
  /// the identity within 1e-10 or if 1 <= k < d fails.
  Frame(int d, std::vector<Point> basis);

  /// Frame spanned by the listed coordinate axes.
  static Frame axes(int d, const std::vector<int>& axis_indices);

  int ambient_dim() const { return d_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const Point& vector(int i) const { return basis_.at(static_cast<std::size_t>(i)); }
  const std::vector<Point>& basis() const { return basis_; }

  /// y (coordinates in the frame) -> y_V in R^d.
  Point lift(std::span<const double> y) const;
  /// x in R^d -> coordinates of P_V(x) in the frame basis.
  Point project(std::span<const double> x) const;
  /// Row-major d x d orthogonal projector onto V.
  std::vector<double> projector() const;

  double max_gram_error() const;

 private:
  int d_;
  std::vector<Point> basis_;
};

/// Rotation-invariant sample from G(d,k): QR of a d x k standard Gaussian
/// matrix drawn from a seeded mt19937_64.
Frame sample_grassmannian(int d, int k, std::uint64_t seed);

/// Max |P_a - P_b| entry; zero iff the frames span the same plane.
double projector_distance(const Frame& a, const Frame& b);

}  // namespace fspec
