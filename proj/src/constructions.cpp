#include "fspec/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "fspec/regression.hpp"
#include "fspec/spectrum.hpp"

namespace fspec {

namespace {

using Q = boost::multiprecision::cpp_rational;
using Z = boost::multiprecision::cpp_int;

void check_param(double a, const char* name) {
  require(a > 0 && a <= 1.0 / 3 + 1e-15, ErrorCode::invalid_argument, std::string(name) + " must lie in (0, 1/3]");
}

Q frac(std::int64_t p, std::int64_t q) { return Q(Z(p)) / Q(Z(q)); }

double clamp2(double v) { return std::clamp(v, 0.0, 2.0); }

}  // namespace

// ---- example -------------------------------------------------------------------

double example_dim_H(double a, double b, double c) {
  return std::log(2.0) * (1 / -std::log(a) + 1 / -std::log(b) + 1 / -std::log(c));
}

double example_dim_S_conv2(double a, double b, double c) {
  return std::log(8.0 / 3.0) * (1 / -std::log(a) + 1 / -std::log(b) + 1 / -std::log(c));
}

CantorTriple build_example(double alpha, double beta, double gamma) {
  check_param(alpha, "alpha");
  check_param(beta, "beta");
  check_param(gamma, "gamma");
  CantorTriple ex;
  ex.alpha = alpha;
  ex.beta = beta;
  ex.gamma = gamma;
  ex.dim_H = example_dim_H(alpha, beta, gamma);
  ex.dim_S_conv2 = example_dim_S_conv2(alpha, beta, gamma);
  ex.mu = Measure::product({cantor_measure(alpha), cantor_measure(beta), cantor_measure(gamma)});
  ex.mu_conv2 = Measure::conv_power(ex.mu, 2);
  SetProfile& p = ex.profile;
  p.d = 3;
  p.dim_H = ex.dim_H;
  p.dim_F = 0;
  p.spectrum = SpectrumModel::sampled({{0.0, 0.0, 0.0}, {0.5, ex.dim_S_conv2 / 2, 0.0}, {1.0, ex.dim_H, 0.0}});
  p.sobolev_conv[2] = ex.dim_S_conv2;
  p.validate();
  return ex;
}

std::vector<CurvePoint> exceptional_curves(const CantorTriple& ex, PsVariant ps, int n_points) {
  require(n_points >= 2, ErrorCode::invalid_argument, "need at least two u values");
  std::vector<CurvePoint> out;
  for (int k : {1, 2}) {
    const double u_hi = k == 1 ? 1.0 : ex.dim_H;
    for (double u : linspace(0.0, u_hi, n_points)) {
      out.push_back({k, u, "fourier_spectrum", clamp2(2 + 2 * u - ex.dim_S_conv2)});
      const double ps_value = ps == PsVariant::full ? 2 + u - ex.dim_H : k + u - ex.dim_H;
      out.push_back({k, u, "peres_schlag", clamp2(ps_value)});
      out.push_back({k, u, "mattila", clamp2(k * (2 - k) + u)});
    }
  }
  return out;
}

// ---- lattice neighbourhood sets ------------------------------------------------------------

std::vector<std::string> LatticeSetParams::validate() const {
  require(s > 0 && s <= 1, ErrorCode::invalid_argument, "s must lie in (0, 1]");
  require(u * 2 >= s && u <= s, ErrorCode::invalid_argument, "u must lie in [s/2, s]");
  require(stages >= 1 && stages <= kMaxLatticeStages, ErrorCode::invalid_argument,
          "stages must lie in [1, " + std::to_string(kMaxLatticeStages) + "]");
  require(static_cast<int>(eta.size()) >= stages, ErrorCode::invalid_argument, "need one eta per stage");
  require(eta.front() >= 2, ErrorCode::invalid_argument, "eta_1 must be at least 2");
  for (std::size_t i = 1; i < eta.size(); ++i)
    require(eta[i] > eta[i - 1], ErrorCode::invalid_argument, "eta must be increasing");
  require(eta[static_cast<std::size_t>(stages) - 1] <= kMaxLatticeGrid, ErrorCode::budget,
          "grid overflow: eta_M exceeds 2^30");
  std::vector<std::string> warnings;
  for (int m = 1; m < stages; ++m) {
    const double need = std::pow(static_cast<double>(eta[m - 1]), m);
    if (static_cast<double>(eta[m]) < need)
      warnings.push_back("eta_" + std::to_string(m + 1) + " < eta_" + std::to_string(m) + "^" + std::to_string(m));
  }
  return warnings;
}

std::optional<std::int64_t> exact_lattice_denominator(std::int64_t eta, Rational e) {
  require(eta >= 1 && e >= 0 && e <= 1, ErrorCode::invalid_argument, "need eta >= 1 and e in [0, 1]");
  const std::int64_t p = e.numerator(), q = e.denominator();
  if (p == 0) return 1;
  // integer q-th root of eta
  auto r = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(eta), 1.0 / static_cast<double>(q))));
  for (std::int64_t cand : {r - 1, r, r + 1}) {
    if (cand < 1) continue;
    Z pw = 1;
    for (std::int64_t i = 0; i < q; ++i) pw *= cand;
    if (pw == eta) {
      Z out = 1;
      for (std::int64_t i = 0; i < p; ++i) out *= cand;
      return static_cast<std::int64_t>(out);
    }
  }
  return std::nullopt;
}

namespace {

struct Interval {
  Q lo, hi;
};
using IntervalSet = std::vector<Interval>;  // sorted, disjoint, closed

constexpr double kEnclosure = 1e-12;

IntervalSet normalise(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet out;
  for (auto& iv : v) {
    if (iv.lo < 0) iv.lo = 0;
    if (iv.hi > 1) iv.hi = 1;
    if (iv.lo > iv.hi) continue;
    if (!out.empty() && iv.lo <= out.back().hi) {
      if (iv.hi > out.back().hi) out.back().hi = iv.hi;
    } else {
      out.push_back(std::move(iv));
    }
  }
  return out;
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  IntervalSet out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const Q& lo = std::max(a[i].lo, b[j].lo);
    const Q& hi = std::min(a[i].hi, b[j].hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi) ++i;
    else ++j;
  }
  return out;
}

// Neighbourhood {x in [0,1] : d(x, eta^-e Z) <= 1/eta}; `shrink` selects the
// inner (+1) or outer (-1) enclosure when the lattice step is irrational.
IntervalSet stage_set(std::int64_t eta, Rational e, int shrink, bool& exact) {
  const Q w = frac(1, eta);
  std::vector<Interval> v;
  if (auto q = exact_lattice_denominator(eta, e)) {
    exact = true;
    for (std::int64_t k = -1; k <= *q + 1; ++k) {
      const Q c = frac(k, *q);
      v.push_back({c - w, c + w});
    }
  } else {
    exact = false;
    const long double step =
        std::pow(static_cast<long double>(eta), -static_cast<long double>(e.numerator()) / e.denominator());
    const auto n = static_cast<std::int64_t>(std::ceil(1.0L / step)) + 1;
    const Q delta = Q(kEnclosure) * shrink;
    for (std::int64_t k = -1; k <= n; ++k) {
      const Q c(static_cast<double>(step * static_cast<long double>(k)));
      const Q d = k == 0 ? Q(0) : delta;  // the centre 0 is exact
      v.push_back({c - w + d, c + w - d});
    }
  }
  return normalise(std::move(v));
}

Z floor_q(const Q& x) {
  Z n = boost::multiprecision::numerator(x), d = boost::multiprecision::denominator(x);
  Z f = n / d;
  if (n < 0 && f * d != n) f -= 1;
  return f;
}

// Cells [c/N, (c+1)/N), c = 0..N-1 (the last one closed) meeting the set.
std::vector<std::pair<std::int64_t, std::int64_t>> cell_ranges(const IntervalSet& s, std::int64_t N) {
  std::vector<std::pair<std::int64_t, std::int64_t>> r;
  for (const auto& iv : s) {
    auto lo = static_cast<std::int64_t>(floor_q(iv.lo * N));
    auto hi = static_cast<std::int64_t>(floor_q(iv.hi * N));
    lo = std::clamp<std::int64_t>(lo, 0, N - 1);
    hi = std::clamp<std::int64_t>(hi, 0, N - 1);
    if (!r.empty() && lo <= r.back().second + 1) r.back().second = std::max(r.back().second, hi);
    else r.emplace_back(lo, hi);
  }
  return r;
}

std::int64_t count_cells(const std::vector<std::pair<std::int64_t, std::int64_t>>& r) {
  std::int64_t n = 0;
  for (auto [a, b] : r) n += b - a + 1;
  return n;
}

GridSet build_set(const std::string& name, Rational e, const LatticeSetParams& p) {
  GridSet g;
  g.name = name;
  g.exponent = e;
  IntervalSet inner{{Q(0), Q(1)}}, outer{{Q(0), Q(1)}};
  bool all_exact = true;
  std::vector<double> lx, ly;
  std::vector<std::pair<std::int64_t, std::int64_t>> last;
  for (int m = 1; m <= p.stages; ++m) {
    const std::int64_t eta = p.eta[static_cast<std::size_t>(m) - 1];
    bool ex = false;
    inner = intersect(inner, stage_set(eta, e, +1, ex));
    outer = intersect(outer, stage_set(eta, e, -1, ex));
    all_exact = all_exact && ex;
    const auto r_out = cell_ranges(outer, eta);
    StageCount sc;
    sc.m = m;
    sc.eta = eta;
    sc.count = count_cells(r_out);
    sc.exact = all_exact;
    sc.certified = all_exact || count_cells(cell_ranges(inner, eta)) == sc.count;
    const double le = std::log(static_cast<double>(eta));
    sc.exponent = sc.count > 0 ? std::log(static_cast<double>(sc.count)) / le : -std::numeric_limits<double>::infinity();
    sc.constant = static_cast<double>(sc.count) / std::pow(static_cast<double>(eta), boost::rational_cast<double>(e));
    g.stages.push_back(sc);
    if (sc.count > 0) {
      lx.push_back(le);
      ly.push_back(std::log(static_cast<double>(sc.count)));
    }
    last = r_out;
  }
  if (lx.size() >= 2) g.slope = fit_line(lx, ly).slope;
  constexpr std::int64_t kMaxListed = std::int64_t{1} << 24;
  if (count_cells(last) <= kMaxListed)
    for (auto [a, b] : last)
      for (std::int64_t c = a; c <= b; ++c) g.cells.push_back(c);
  return g;
}

}  // namespace

LatticeSets lattice_sets(const LatticeSetParams& params) {
  LatticeSets out;
  out.params = params;
  out.warnings = params.validate();
  const Rational& u = params.u;
  const Rational& s = params.s;
  out.A = build_set("A", u, params);
  out.B = build_set("B", s - u, params);
  out.C = build_set("C", u * 2 - s, params);
  return out;
}

ContainmentReport verify_projection_containment(const LatticeSetParams& params, int m, Rational slope_shift) {
  params.validate();
  require(m >= 1 && m <= params.stages, ErrorCode::invalid_argument, "stage out of range");
  const std::int64_t eta = params.eta[static_cast<std::size_t>(m) - 1];
  const Rational eu = params.u, eb = params.s - params.u, ec = params.u * 2 - params.s;
  const auto la = exact_lattice_denominator(eta, eu);
  const auto lb = exact_lattice_denominator(eta, eb);
  const auto lc = exact_lattice_denominator(eta, ec);
  require(la && lb && lc, ErrorCode::invalid_argument,
          "stage " + std::to_string(m) + " has an irrational lattice step");
  const double work = static_cast<double>(*la + 1) * static_cast<double>(*lb + 1) * static_cast<double>(*lc + 1);
  require(work <= 1e8, ErrorCode::budget, "stage " + std::to_string(m) + " is too large to enumerate");

  ContainmentReport rep;
  rep.m = m;
  const Q shift = frac(slope_shift.numerator(), slope_shift.denominator());
  for (std::int64_t z3 = 0; z3 <= *lc; ++z3) {
    const Q c = frac(z3, *lc) + shift;
    for (std::int64_t z2 = 0; z2 <= *lb; ++z2) {
      const Q bc = frac(z2, *lb) * c;
      for (std::int64_t z1 = 0; z1 <= *la; ++z1) {
        const Q a = frac(z1, *la);
        const Q scaled = (a + bc) * *la;
        ++rep.checked;
        if (boost::multiprecision::denominator(scaled) != 1) {
          if (rep.counterexamples++ == 0) rep.first_counterexample = a.str() + " " + frac(z2, *lb).str() + " " + c.str();
        }
      }
    }
  }
  rep.holds = rep.counterexamples == 0;
  return rep;
}

// ---- projected box counting ---------------------------------------------------

BoxDimension projected_box_dimension(const Measure& measure, const Frame& frame, int level, int j_min, int j_max) {
  require(frame.ambient_dim() == measure.dim(), ErrorCode::dimension_mismatch, "frame and measure dimensions differ");
  return box_dimension(project_points(measure.discretize(level), frame), j_min, j_max);
}

MarstrandSummary marstrand_sample(const Measure& measure, const MarstrandConfig& cfg) {
  const int d = measure.dim();
  require(cfg.k >= 1 && cfg.k < d, ErrorCode::dimension_mismatch, "need 1 <= k < d");
  require(cfg.frames >= 1, ErrorCode::invalid_argument, "need at least one frame");
  const AtomicMeasure atoms = measure.discretize(cfg.level);
  MarstrandSummary out;
  out.target = cfg.target;
  out.tolerance = cfg.tolerance;
  std::vector<double> dims;
  int within = 0;
  for (int i = 0; i < cfg.frames; ++i) {
    MarstrandRow row;
    row.index = i;
    row.seed = cfg.seed + static_cast<std::uint64_t>(i);
    row.frame = sample_grassmannian(d, cfg.k, row.seed);
    row.box = box_dimension(project_points(atoms, row.frame), cfg.j_min, cfg.j_max);
    dims.push_back(row.box.dimension);
    if (std::abs(row.box.dimension - cfg.target) <= cfg.tolerance) ++within;
    out.rows.push_back(std::move(row));
  }
  out.fraction_within = static_cast<double>(within) / cfg.frames;
  std::sort(dims.begin(), dims.end());
  auto q = [&](double p) {
    const double x = p * static_cast<double>(dims.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(x));
    const std::size_t j = std::min(i + 1, dims.size() - 1);
    return dims[i] + (x - static_cast<double>(i)) * (dims[j] - dims[i]);
  };
  out.min = dims.front();
  out.q10 = q(0.1);
  out.median = q(0.5);
  out.q90 = q(0.9);
  out.max = dims.back();
  return out;
}

}  // namespace fspec
