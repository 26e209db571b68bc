#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fspec/measure.hpp"

namespace fspec {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Controls how each dyadic shell 2^j <= |z| < 2^(j+1) is sampled.
///
/// Along every sampled direction the radial variable is covered by a
/// stratified grid: blocks of 256 equally spaced points, each block with its
/// own seeded offset inside its cells. The radial spacing targets
/// `oversample` points per Nyquist interval of |ft|^(2/theta), i.e.
/// oversample * diameter / theta points per unit frequency.
struct SamplingPlan {
  std::uint64_t seed = kDefaultSeed;
  std::size_t min_points = 1024;     // n_j = max(min_points, points_per_j2 * j^2)
  std::size_t points_per_j2 = 64;
  double oversample = 2.0;
  std::size_t max_points = 0;        // per shell; 0: 2^25 for d = 1, 2^22 otherwise
  int min_directions = 64;           // d >= 2
  int max_directions = 4096;
  double tail_tol = kDefaultTailTol;
  int refine_candidates = 4;         // theta = 0 golden-section refinements per shell
  unsigned threads = 0;              // 0: hardware concurrency
};

enum class Quality { ok, noisy, truncated };
std::string to_string(Quality q);

struct ShellEstimate {
  int j = 0;
  double value = 0;        // T_j for theta > 0, M_j = sup |ft| for theta = 0
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  bool dense = false;      // grid met the Nyquist target in every sampled variable
  std::vector<double> argmax;  // theta = 0 only
};

struct SpectrumEstimate {
  double theta = 0;
  double s_hat = 0;
  double slope = 0;
  double intercept = 0;
  double stderr_ = 0;      // of s_hat
  int window_lo = 0, window_hi = 0;
  std::vector<ShellEstimate> shells;  // whole requested range, sorted by j
  std::vector<double> residuals;      // over the regression window
  Quality quality = Quality::ok;
};

/// T_j = int_{A_j} |ft(z)|^(2/theta) |z|^-d dz.
ShellEstimate shell_energy(const Measure& measure, double theta, int j, const SamplingPlan& plan = {});

/// M_j = sup_{A_j} |ft(z)| from the grid plus golden-section refinement.
ShellEstimate shell_supremum(const Measure& measure, int j, const SamplingPlan& plan = {});

/// s_hat = -theta * slope(log2 T_j) (or -2 * slope(log2 M_j) at theta = 0) over
/// the upper half of [j_lo, j_hi], at least 6 shells. Unclamped.
SpectrumEstimate estimate_spectrum(const Measure& measure, double theta, int j_lo, int j_hi,
                                   const SamplingPlan& plan = {});

/// Several theta values from one shared set of Fourier evaluations; the grid
/// density is set by the smallest positive theta.
std::vector<SpectrumEstimate> estimate_spectra(const Measure& measure, const std::vector<double>& thetas, int j_lo,
                                               int j_hi, const SamplingPlan& plan = {});

struct ConvolutionEstimate {
  double value = 0;        // estimate of the spectrum at theta = 1/n
  double stderr_ = 0;
  SpectrumEstimate sobolev; // theta = 1 estimate for the n-fold convolution
};

ConvolutionEstimate estimate_via_convolution(const Measure& measure, int n, int j_lo, int j_hi,
                                             const SamplingPlan& plan = {});

/// log(sum p_j^2) / log(ratio). Refuses when the separation flag is off.
double l2_dimension_self_similar(const std::vector<double>& weights, double ratio, bool open_set_condition = true);

/// Same for self-similar leaves, products (per-factor sum) and convolution
/// powers of those (convolved IFS, separation checked on the convex hull).
double l2_dimension(const Measure& measure);

struct LatticeSum {
  double value = 0;        // 1 + sum over 0 < |z| <= R, z in alpha Z^d
  double tail_bound = 0;   // bound on the dropped |z| > R part, valid only when tail_valid
  bool tail_valid = false;
  std::size_t points = 0;
};

inline constexpr std::size_t kDefaultLatticeBudget = std::size_t{1} << 27;

/// Truncated lattice form of the (s, theta)-energy to the power 1/theta.
LatticeSum lattice_energy(const Measure& measure, double theta, double s, double alpha, double radius,
                          std::size_t max_points = kDefaultLatticeBudget, double tail_tol = kDefaultTailTol);

/// Divergence threshold of the lattice sum: -theta * slope of log2 of the
/// lattice shell sums sum_{2^j <= |z| < 2^(j+1)} |ft(z)|^(2/theta) |z|^-d over
/// the upper half of [j_lo, j_hi].
SpectrumEstimate lattice_threshold(const Measure& measure, double theta, double alpha, int j_lo, int j_hi,
                                   std::size_t max_points = kDefaultLatticeBudget,
                                   double tail_tol = kDefaultTailTol);

}  // namespace fspec
