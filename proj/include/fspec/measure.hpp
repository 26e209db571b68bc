#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fspec/error.hpp"
#include "fspec/frame.hpp"

namespace fspec {

using Complex = std::complex<double>;

inline constexpr double kDefaultTailTol = 1e-10;
inline constexpr int kMaxProductDepth = 10000;
inline constexpr std::size_t kDefaultAtomCap = std::size_t{1} << 24;

/// Finite list of weighted points in R^d. Weights need not sum to one.
struct AtomicMeasure {
  int dim = 1;
  std::vector<double> coords;   // size() * dim, row-major
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  double total_mass() const;
  void add(std::span<const double> p, double w);
};

/// Lexicographic sort, then merge each atom into its predecessor when every
/// coordinate differs by at most tol.
AtomicMeasure merge_coincident(const AtomicMeasure& atoms, double tol);

enum class NodeKind { self_similar, atomic, product, conv_power, mixture, affine, projected };

struct Box {
  std::vector<double> lo, hi;
  double diameter() const;
  double radius() const;  // max |x| over the box
};

namespace detail {
struct Node;
}

/// Immutable description of a compactly supported finite measure built from
/// 1-d self-similar and atomic leaves. Copies share the underlying tree, so
/// passing by value is cheap and every const method is thread-safe.
class Measure {
 public:
  /// Attractor of x -> ratio*x + t_j with weights p_j.
  static Measure self_similar(double ratio, std::vector<double> translations,
                              std::vector<double> weights, bool open_set_condition = true);
  static Measure atomic(AtomicMeasure atoms);
  static Measure dirac(std::vector<double> point);
  static Measure product(std::vector<Measure> factors);
  static Measure conv_power(Measure base, int n);
  /// Convex combination; coefficients must be nonnegative and sum to 1.
  static Measure mixture(std::vector<double> coefficients, std::vector<Measure> parts);
  /// Push-forward under x -> scale .* x + shift (per coordinate).
  static Measure affine(Measure base, std::vector<double> scale, std::vector<double> shift);
  /// Push-forward under P_V, expressed in the frame's coordinates.
  static Measure projected(Measure base, Frame frame);

  NodeKind kind() const;
  int dim() const;
  double mass() const;
  bool is_probability(double tol = 1e-12) const;
  Box bounding_box() const;
  double support_diameter() const;
  double support_radius() const;

  /// Scalars lambda > 1 for which z -> lambda z tends to preserve |ft| (the
  /// inverse contraction ratio of every self-similar leaf that all branches
  /// agree on). Used to seed supremum searches.
  std::vector<double> dilation_hints() const;

  /// Fourier transform  int exp(-2 pi i z.x) dmu(x), absolute error <= tail_tol.
  Complex ft(std::span<const double> z, double tail_tol = kDefaultTailTol) const;

  /// ft at z0 + i*step for i in [0, out.size()), each within tail_tol.
  void ft_line(std::span<const double> z0, std::span<const double> step, double tail_tol,
               std::span<Complex> out) const;

  /// Many lines sharing one step: out[b*len + i] = ft(starts_b + i*step), where
  /// starts holds the line origins back to back. Faster than repeated ft_line
  /// calls because phase tables are shared across lines.
  void ft_grid(std::span<const double> starts, std::span<const double> step, std::size_t len, double tail_tol,
               std::span<Complex> out) const;

  /// Level-n cylinder representatives (left endpoints / corners) with exact
  /// cylinder weights. Throws on projected nodes and when the atom count
  /// would exceed max_atoms.
  AtomicMeasure discretize(int level, std::size_t max_atoms = kDefaultAtomCap) const;

  std::size_t atom_count(int level) const;

  // Structural access used by serialisation and the spectrum estimators.
  const detail::Node& node() const { return *node_; }

  std::string to_json() const;
  static Measure from_json(std::string_view text);

 private:
  explicit Measure(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;

  friend struct detail::Node;
};

/// Middle-(1-2 alpha) Cantor measure: ratio alpha, translations {0, 1-alpha},
/// equal weights.
Measure cantor_measure(double alpha);

/// Lebesgue measure on [0,1] as the self-similar measure with ratio 1/2.
Measure lebesgue_unit_interval();

/// Product depth needed so that the dropped tail of the refinement product
/// costs at most tail_tol at frequency |xi|.
int truncation_depth(double ratio, double translation_moment, double abs_xi, double tail_tol);

}  // namespace fspec
