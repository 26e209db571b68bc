#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fspec {

/// theta -> dim_F^theta, either closed form min(intercept + slope*theta, cap)
/// or a list of sampled points (theta, value, stderr).
class SpectrumModel {
 public:
  struct Sample {
    double theta = 0, value = 0, stderr_ = 0;
  };

  static SpectrumModel linear(double intercept, double slope, double cap);
  static SpectrumModel constant(double value) { return linear(value, 0.0, value); }
  static SpectrumModel sampled(std::vector<Sample> samples);

  bool is_sampled() const { return sampled_; }
  const std::vector<Sample>& samples() const { return samples_; }
  double intercept() const { return a_; }
  double slope() const { return b_; }
  double cap() const { return cap_; }

  /// Value at theta; sampled models interpolate linearly between knots and
  /// throw outside their range.
  double value(double theta) const;
  double stderr_at(double theta) const;
  bool covers(double theta) const;

  /// Thetas used for infima and suprema: the knots of a sampled model, the
  /// default grid otherwise.
  std::vector<double> grid(const std::vector<double>& default_grid) const;

 private:
  bool sampled_ = false;
  double a_ = 0, b_ = 0, cap_ = 0;
  std::vector<Sample> samples_;
};

struct SetProfile {
  int d = 2;
  double dim_H = 0;
  double dim_F = 0;
  SpectrumModel spectrum = SpectrumModel::constant(0);
  std::map<int, double> sobolev_conv;  // n -> dim_S of the n-fold self-convolution

  /// Throws unless the basic consistency relations hold within tol.
  void validate(double tol = 1e-9) const;

  std::string to_json() const;
  static SetProfile from_json(const std::string& text);
};

/// {0.01, 0.02, ..., 1.00}
std::vector<double> default_theta_grid();

/// Evenly spaced grid lo, lo+step, ..., hi (hi included when within step/2).
std::vector<double> make_grid(double lo, double hi, double step);
/// n evenly spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

enum class PsVariant { full, rank };
PsVariant parse_ps_variant(const std::string& s);

struct BoundValue {
  double value = 0;
  bool valid = false;
};

/// Exceptional-set bounds from the classical literature at (k, u), each clamped
/// to [0, k(d-k)] with its hypotheses encoded in `valid`. Keys: kaufman,
/// kaufman_general, bourgain_oberlin, ren_wang, mattila, peres_schlag, he, trivial.
std::map<std::string, BoundValue> classical_bounds(const SetProfile& p, int k, double u,
                                                   PsVariant ps = PsVariant::full);

/// max{0, k(d-k) + (u - spectrum(theta))/theta}, capped at k(d-k). The set form
/// refuses u > k; measure_form lifts that restriction.
double spectrum_bound(const SetProfile& p, int k, double u, double theta, bool measure_form = false);

struct BestBound {
  double value = 0;
  double lower = 0;        // grid-resolution lower bound on the true infimum
  double argmin_theta = 0; // 0 when the minimum came from a convolution power
  int argmin_n = 0;        // 0 when the minimum came from the theta grid
};

/// Infimum over the theta grid of spectrum_bound, and over n of
/// max{0, k(d-k) + n u - dim_S(mu^{*n})} when those are known.
BestBound best_spectrum_bound(const SetProfile& p, int k, double u,
                              const std::vector<double>& theta_grid = default_theta_grid(),
                              bool measure_form = false);

struct Threshold {
  double value = 0;
  double upper = 0;        // grid-resolution upper bound on the true supremum
  double argmax_theta = 0;
};

/// Largest u for which the exceptional set is forced to be empty:
/// sup_theta (spectrum(theta) - (d-k) theta), never below min{k, dim_F}.
Threshold emptiness_threshold(const SetProfile& p, int k,
                              const std::vector<double>& theta_grid = default_theta_grid());

enum class Truth { holds, fails, uncertain };
std::string to_string(Truth t);

/// Three-valued strict inequality lhs > rhs with margin; sigma widens the
/// undecided band by two standard errors.
Truth strictly_greater(double lhs, double rhs, double sigma, double margin = 1e-9);

enum class Baseline { ren_wang, mattila, peres_schlag };
Baseline parse_baseline(const std::string& s);
std::string to_string(Baseline b);

struct RegionCell {
  double theta = 0, u = 0;
  Truth improves = Truth::fails;
};

struct ImprovementRegion {
  Baseline baseline = Baseline::peres_schlag;
  std::vector<RegionCell> cells;
  /// Lowest spectrum value at theta that improves the baseline for some
  /// admissible u; the shaded region lies above this line.
  std::vector<std::pair<double, double>> boundary;
  double ceiling = 0;  // dim_H
};

ImprovementRegion improvement_region(const SetProfile& p, int k, Baseline baseline,
                                     const std::vector<double>& theta_grid, const std::vector<double>& u_grid,
                                     double margin = 1e-9);

struct EmptyInteriorBound {
  bool applicable = false;
  double value = 0;
  double argmin_theta = 0;
};

/// k(d-k) + inf_theta (2k - spectrum(theta))/theta when spectrum exceeds 2k
/// somewhere on the grid (floored at 0).
EmptyInteriorBound empty_interior_bound(const SetProfile& p, int k,
                                        const std::vector<double>& theta_grid = default_theta_grid());

struct SemiDerivative {
  double value = 0;
  double uncertainty = 0;
  double h = 0;  // outer step used
};

/// One-sided difference quotient at theta = 0 ((s(h) - s(0))/h) or theta = 1
/// ((s(1) - s(1-h))/h) with one Richardson step from h and h/2.
SemiDerivative semi_derivative(const SetProfile& p, int end,
                               const std::vector<double>& theta_grid = default_theta_grid());

/// Continuity of the exceptional dimension at u = dim_F: D(0) >= k(d-k).
Truth continuity_ok(const SemiDerivative& d0, int d, int k, double margin = 1e-9);
/// Improvement on the planar sharp bound: D(1) < dim_H - 1.
Truth rw_improvement_ok(const SemiDerivative& d1, double dim_H, double margin = 1e-9);
/// Improvement on the general-dimension bound at u: D(1) < dim_H - u.
Truth ps_improvement_ok(const SemiDerivative& d1, double dim_H, double u, double margin = 1e-9);

/// Small-theta ratio spectrum(theta)/theta, extrapolated to theta -> 0 the same way.
SemiDerivative small_theta_ratio(const SetProfile& p, const std::vector<double>& theta_grid = default_theta_grid());

struct MethodCurve {
  std::string name;
  std::vector<double> values;
  std::vector<bool> valid;
};

struct BoundProfile {
  int d = 0, k = 0;
  double cap = 0;
  std::vector<double> u;
  std::vector<MethodCurve> methods;
  std::vector<double> envelope;  // pointwise minimum over valid methods
};

/// Every classical method plus the spectrum bound (name "fourier_spectrum")
/// over a u-grid.
BoundProfile bound_profile(const SetProfile& p, int k, const std::vector<double>& u_grid,
                           PsVariant ps = PsVariant::full,
                           const std::vector<double>& theta_grid = default_theta_grid());

/// Exceptional dimension for the union of a sharp-example set (dim_H = s) with
/// a Salem set of dimension t, t in (s/2, s): 0 below t and at least 2t - s from t on.
/// `lower_bound` is true on the branch where only an inequality is known.
struct EnvelopeValue {
  double value = 0;
  bool lower_bound = false;
};
EnvelopeValue union_exceptional_envelope(double s, double t, double u);

}  // namespace fspec
