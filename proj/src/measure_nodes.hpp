#pragma once

// Node types behind fspec::Measure. Private to the library.

#include <cstddef>
#include <optional>
#include <vector>

#include "fspec/measure.hpp"

namespace fspec::detail {

/// Dilation hints: either "every scalar works" (a Dirac mass) or a finite list.
struct Dilations {
  bool any = false;
  std::vector<double> values;
};

struct Node {
  virtual ~Node() = default;
  virtual NodeKind kind() const = 0;
  virtual int dim() const = 0;
  virtual double mass() const = 0;
  virtual Box box() const = 0;
  virtual Dilations dilations() const = 0;
  /// out[i] = ft(z0 + i*step), |error| <= tol.
  virtual void ft_line(const double* z0, const double* step, std::size_t n, double tol,
                       Complex* out) const = 0;
  /// nb lines of len points sharing one step; line b starts at starts[b*dim].
  /// out is nb*len, line-major.
  virtual void ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len, double tol,
                         Complex* out) const;
  virtual AtomicMeasure discretize(int level, std::size_t cap) const = 0;
  /// Saturates at SIZE_MAX.
  virtual std::size_t atom_count(int level) const = 0;
};

struct SelfSimilarNode final : Node {
  double ratio;
  std::vector<double> translations;
  std::vector<double> weights;
  bool osc;
  double moment;  // sum_j p_j |t_j|

  NodeKind kind() const override { return NodeKind::self_similar; }
  int dim() const override { return 1; }
  double mass() const override;
  Box box() const override;
  Dilations dilations() const override;
  void ft_line(const double* z0, const double* step, std::size_t n, double tol,
               Complex* out) const override;
  void ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len, double tol,
                 Complex* out) const override;
  AtomicMeasure discretize(int level, std::size_t cap) const override;
  std::size_t atom_count(int level) const override;
};

struct AtomicNode final : Node {
  AtomicMeasure atoms;

  NodeKind kind() const override { return NodeKind::atomic; }
  int dim() const override { return atoms.dim; }
  double mass() const override { return atoms.total_mass(); }
  Box box() const override;
  Dilations dilations() const override;
  void ft_line(const double* z0, const double* step, std::size_t n, double tol,
               Complex* out) const override;
  AtomicMeasure discretize(int, std::size_t) const override { return atoms; }
  std::size_t atom_count(int) const override { return atoms.size(); }
};

struct ProductNode final : Node {
  std::vector<Measure> factors;
  std::vector<int> offsets;  // first coordinate of each factor
  int total_dim = 0;

  NodeKind kind() const override { return NodeKind::product; }
  int dim() const override { return total_dim; }
  double mass() const override;
  Box box() const override;
  Dilations dilations() const override;
  void ft_line(const double* z0, const double* step, std::size_t n, double tol,
               Complex* out) const override;
  void ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len, double tol,
                 Complex* out) const override;
  AtomicMeasure discretize(int level, std::size_t cap) const override;
  std::size_t atom_count(int level) const override;
};

struct ConvPowerNode final : Node {
  Measure base;
  int n;

  ConvPowerNode(Measure b, int power) : base(std::move(b)), n(power) {}
  NodeKind kind() const override { return NodeKind::conv_power; }
  int dim() const override { return base.dim(); }
  double mass() const override;
  Box box() const override;
  Dilations dilations() const override;
  void ft_line(const double* z0, const double* step, std::size_t count, double tol,
               Complex* out) const override;
  void ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len, double tol,
                 Complex* out) const override;
  AtomicMeasure discretize(int level, std::size_t cap) const override;
  std::size_t atom_count(int level) const override;
};

struct MixtureNode final : Node {
  std::vector<double> coefficients;
  std::vector<Measure> parts;

  NodeKind kind() const override { return NodeKind::mixture; }
  int dim() const override { return parts.front().dim(); }
  double mass() const override;
  Box box() const override;
  Dilations dilations() const override;
  void ft_line(const double* z0, const double* step, std::size_t n, double tol,
               Complex* out) const override;
  void ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len, double tol,
                 Complex* out) const override;
  AtomicMeasure discretize(int level, std::size_t cap) const override;
  std::size_t atom_count(int level) const override;
};

struct AffineNode final : Node {
  Measure base;
  std::vector<double> scale;
  std::vector<double> shift;

  AffineNode(Measure b, std::vector<double> s, std::vector<double> t)
      : base(std::move(b)), scale(std::move(s)), shift(std::move(t)) {}
  NodeKind kind() const override { return NodeKind::affine; }
  int dim() const override { return base.dim(); }
  double mass() const override { return base.mass(); }
  Box box() const override;
  Dilations dilations() const override;
  void ft_line(const double* z0, const double* step, std::size_t n, double tol,
               Complex* out) const override;
  void ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len, double tol,
                 Complex* out) const override;
  AtomicMeasure discretize(int level, std::size_t cap) const override;
  std::size_t atom_count(int level) const override { return base.atom_count(level); }
};

struct ProjectedNode final : Node {
  Measure base;
  Frame frame;

  ProjectedNode(Measure b, Frame f) : base(std::move(b)), frame(std::move(f)) {}
  NodeKind kind() const override { return NodeKind::projected; }
  int dim() const override { return frame.dim(); }
  double mass() const override { return base.mass(); }
  Box box() const override;
  Dilations dilations() const override;
  void ft_line(const double* z0, const double* step, std::size_t n, double tol,
               Complex* out) const override;
  void ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len, double tol,
                 Complex* out) const override;
  AtomicMeasure discretize(int level, std::size_t cap) const override;
  std::size_t atom_count(int level) const override { return base.atom_count(level); }
};

}  // namespace fspec::detail
