#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fspec/bounds.hpp"
#include "fspec/frame.hpp"
#include "fspec/measure.hpp"
#include "fspec/numparse.hpp"
#include "fspec/projection.hpp"

namespace fspec {

// ---- product of three Cantor measures ---------------------------------------

struct CantorTriple {
  double alpha = 0, beta = 0, gamma = 0;
  double dim_H = 0;
  double dim_S_conv2 = 0;   // Sobolev dimension of mu*mu
  Measure mu = Measure::dirac({0.0});
  Measure mu_conv2 = Measure::dirac({0.0});
  /// d = 3, dim_F = 0, sampled spectrum {0: 0, 1/2: dim_S_conv2/2, 1: dim_H}
  /// and sobolev_conv[2] = dim_S_conv2.
  SetProfile profile;
};

/// X = E_alpha x E_beta x E_gamma with the product of the natural Cantor
/// measures. Parameters must lie in (0, 1/3].
CantorTriple build_example(double alpha, double beta, double gamma);

double example_dim_H(double alpha, double beta, double gamma);
double example_dim_S_conv2(double alpha, double beta, double gamma);

struct CurvePoint {
  int k = 0;
  double u = 0;
  std::string method;  // fourier_spectrum | peres_schlag | mattila
  double value = 0;
};

/// Both panels of the exceptional-set comparison for the three-Cantor
/// example: k = 1 on u in [0, 1], k = 2 on u in [0, dim_H], n_points each.
///   fourier_spectrum = clamp(2 + 2u - dim_S(mu*mu))
///   mattila          = min{2, k(2-k) + u}
///   peres_schlag     = 2 + u - dim_H (full) or max{0, k + u - dim_H} (rank)
/// everything clamped to [0, 2].
std::vector<CurvePoint> exceptional_curves(const CantorTriple& ex, PsVariant ps = PsVariant::full, int n_points = 201);

// ---- sets A, B, C built from rapidly growing integer scales ----------------

struct LatticeSetParams {
  Rational s{3, 4};
  Rational u{1, 2};
  std::vector<std::int64_t> eta{8, 64, 4096};
  int stages = 3;

  /// Throws on invalid parameters; returns human-readable warnings (growth
  /// condition eta_{m+1} >= eta_m^m not met).
  std::vector<std::string> validate() const;
};

inline constexpr int kMaxLatticeStages = 6;
inline constexpr std::int64_t kMaxLatticeGrid = std::int64_t{1} << 30;

struct StageCount {
  int m = 0;
  std::int64_t eta = 0;
  std::int64_t count = 0;   // half-open cells of width 1/eta_m meeting the stage-m set
  bool exact = false;       // every lattice step up to stage m is rational
  bool certified = true;    // count is the same for the inner and outer enclosures
  double exponent = 0;      // log count / log eta_m
  double constant = 0;      // count / eta_m^e
};

struct GridSet {
  std::string name;
  Rational exponent;
  std::vector<StageCount> stages;
  std::vector<std::int64_t> cells;  // cell indices at width 1/eta_M
  double slope = 0;                 // OLS slope of log count vs log eta over stages (0 with one stage)
};

struct LatticeSets {
  LatticeSetParams params;
  GridSet A, B, C;
  std::vector<std::string> warnings;
};

/// Stage approximations of
///   A = {x in [0,1] : d(x, eta_m^-u Z) <= 1/eta_m for all m}
/// and of B, C with exponents s-u and 2u-s. Lattices eta^-e Z whose step is
/// not rational are handled with a 1e-12 enclosure; counts that depend on
/// the enclosure are flagged uncertified.
LatticeSets lattice_sets(const LatticeSetParams& params);

/// Integer q with q^den == eta^num for e = num/den, if one exists.
std::optional<std::int64_t> exact_lattice_denominator(std::int64_t eta, Rational e);

struct ContainmentReport {
  int m = 0;
  bool holds = false;
  std::int64_t checked = 0;
  std::int64_t counterexamples = 0;
  /// First failure as "a b c" in exact fractions.
  std::string first_counterexample;
};

/// For every lattice point (a, b) of (eta_m^-u Z x eta_m^-(s-u) Z) in [0,1]^2
/// and every slope c of eta_m^-(2u-s) Z in [0,1] (shifted by slope_shift, for
/// negative controls) checks exactly that a + b c lies in eta_m^-u Z.
/// Refuses stages whose lattice steps are irrational (invalid_argument) or
/// would overflow 64-bit arithmetic (budget).
ContainmentReport verify_projection_containment(const LatticeSetParams& params, int m, Rational slope_shift = 0);

// ---- projections of discretised sets ------------------------------------------

struct MarstrandRow {
  int index = 0;
  std::uint64_t seed = 0;
  Frame frame = Frame::axes(2, {0});
  BoxDimension box;
};

struct MarstrandSummary {
  std::vector<MarstrandRow> rows;
  double target = 0;
  double tolerance = 0;
  double fraction_within = 0;
  double min = 0, q10 = 0, median = 0, q90 = 0, max = 0;
};

struct MarstrandConfig {
  int k = 1;
  int frames = 30;
  int level = 9;
  int j_min = 2;
  int j_max = 12;
  std::uint64_t seed = 0x5EED;
  double target = 1.0;
  double tolerance = 0.1;
};

/// Box dimension of the level-n discretisation projected onto random
/// k-planes (frame i is sample_grassmannian(d, k, seed + i)).
MarstrandSummary marstrand_sample(const Measure& measure, const MarstrandConfig& config);

/// Same for one explicit frame.
BoxDimension projected_box_dimension(const Measure& measure, const Frame& frame, int level, int j_min, int j_max);

}  // namespace fspec
