#include "fspec/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fspec/error.hpp"
#include "fspec/numparse.hpp"
#include "json.hpp"

namespace fspec {

using nlohmann::json;

namespace {

constexpr double kEps = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double grassmann_dim(int d, int k) { return static_cast<double>(k) * (d - k); }

double clamp_cap(double v, double cap) { return std::clamp(v, 0.0, cap); }

void check_dims(int d, int k) {
  require(d >= 2 && k >= 1 && k < d, ErrorCode::invalid_argument, "need 1 <= k < d");
}

void check_u(double u, int k, bool measure_form) {
  require(std::isfinite(u) && u >= 0, ErrorCode::invalid_argument, "u must be >= 0");
  require(measure_form || u <= k + kEps, ErrorCode::invalid_argument, "u must not exceed k for sets");
}

bool on_grid(const std::vector<double>& g, double t) {
  return std::any_of(g.begin(), g.end(), [&](double x) { return std::abs(x - t) < 1e-9; });
}

std::vector<double> positive_sorted(std::vector<double> g) {
  std::erase_if(g, [](double t) { return !(t > 0) || t > 1 + kEps; });
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double real_of(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_real(v.get<std::string>());
  fail(ErrorCode::parse, "expected a number");
}

}  // namespace

// ---- SpectrumModel ---------------------------------------------------------

SpectrumModel SpectrumModel::linear(double intercept, double slope, double cap) {
  require(std::isfinite(intercept) && std::isfinite(slope) && std::isfinite(cap), ErrorCode::invalid_argument,
          "spectrum parameters must be finite");
  SpectrumModel m;
  m.a_ = intercept;
  m.b_ = slope;
  m.cap_ = cap;
  return m;
}

SpectrumModel SpectrumModel::sampled(std::vector<Sample> samples) {
  require(!samples.empty(), ErrorCode::invalid_argument, "empty spectrum data");
  std::sort(samples.begin(), samples.end(), [](auto& x, auto& y) { return x.theta < y.theta; });
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    require(s.theta >= 0 && s.theta <= 1 && std::isfinite(s.value) && s.stderr_ >= 0, ErrorCode::invalid_argument,
            "spectrum samples need theta in [0,1], finite values and stderr >= 0");
    require(i == 0 || s.theta > samples[i - 1].theta, ErrorCode::invalid_argument, "duplicate spectrum theta");
  }
  SpectrumModel m;
  m.sampled_ = true;
  m.samples_ = std::move(samples);
  return m;
}

bool SpectrumModel::covers(double theta) const {
  if (!sampled_) return theta >= 0 && theta <= 1;
  return theta >= samples_.front().theta - 1e-12 && theta <= samples_.back().theta + 1e-12;
}

double SpectrumModel::value(double theta) const {
  require(covers(theta), ErrorCode::invalid_argument, "spectrum not available at theta = " + std::to_string(theta));
  if (!sampled_) return std::min(a_ + b_ * theta, cap_);
  auto hi = std::lower_bound(samples_.begin(), samples_.end(), theta - 1e-12,
                             [](const Sample& s, double t) { return s.theta < t; });
  if (hi == samples_.end()) return samples_.back().value;
  if (std::abs(hi->theta - theta) <= 1e-12 || hi == samples_.begin()) return hi->value;
  auto lo = hi - 1;
  const double w = (theta - lo->theta) / (hi->theta - lo->theta);
  return lo->value + w * (hi->value - lo->value);
}

double SpectrumModel::stderr_at(double theta) const {
  if (!sampled_) return 0.0;
  require(covers(theta), ErrorCode::invalid_argument, "spectrum not available at theta");
  auto hi = std::lower_bound(samples_.begin(), samples_.end(), theta - 1e-12,
                             [](const Sample& s, double t) { return s.theta < t; });
  if (hi == samples_.end()) return samples_.back().stderr_;
  if (std::abs(hi->theta - theta) <= 1e-12 || hi == samples_.begin()) return hi->stderr_;
  return std::max(hi->stderr_, (hi - 1)->stderr_);
}

std::vector<double> SpectrumModel::grid(const std::vector<double>& default_grid) const {
  if (!sampled_) return default_grid;
  std::vector<double> g;
  for (const auto& s : samples_) g.push_back(s.theta);
  return g;
}

// ---- SetProfile ------------------------------------------------------------

void SetProfile::validate(double tol) const {
  require(d >= 1, ErrorCode::invalid_argument, "profile dimension must be >= 1");
  require(dim_H >= -tol && dim_H <= d + tol, ErrorCode::invalid_argument, "dim_H must lie in [0, d]");
  require(dim_F >= -tol && dim_F <= dim_H + tol, ErrorCode::invalid_argument, "dim_F must lie in [0, dim_H]");
  const auto g = spectrum.grid(make_grid(0.0, 1.0, 0.01));
  double prev = -kInf, prev_err = 0;
  for (double t : g) {
    const double v = spectrum.value(t), e = spectrum.stderr_at(t);
    const double slack = tol + 2 * e;
    require(v >= prev - slack - 2 * prev_err, ErrorCode::invalid_argument, "spectrum must be non-decreasing");
    require(v <= dim_F + d * t + slack, ErrorCode::invalid_argument, "spectrum exceeds dim_F + d*theta");
    if (t == 0) require(std::abs(v - dim_F) <= slack, ErrorCode::invalid_argument, "spectrum(0) must equal dim_F");
    if (t == 1) require(v <= dim_H + slack, ErrorCode::invalid_argument, "spectrum(1) must not exceed dim_H");
    prev = v;
    prev_err = e;
  }
  for (const auto& [n, v] : sobolev_conv) {
    require(n >= 1, ErrorCode::invalid_argument, "convolution powers start at 1");
    require(std::isfinite(v), ErrorCode::invalid_argument, "Sobolev dimensions must be finite");
  }
}

std::string SetProfile::to_json() const {
  json j;
  j["d"] = d;
  j["dim_H"] = dim_H;
  j["dim_F"] = dim_F;
  if (spectrum.is_sampled()) {
    json pts = json::array();
    for (const auto& s : spectrum.samples()) pts.push_back({{"theta", s.theta}, {"value", s.value}, {"stderr", s.stderr_}});
    j["spectrum"] = {{"type", "samples"}, {"points", pts}};
  } else {
    j["spectrum"] = {{"type", "linear"},
                     {"intercept", spectrum.intercept()},
                     {"slope", spectrum.slope()},
                     {"cap", spectrum.cap()}};
  }
  json conv = json::object();
  for (const auto& [n, v] : sobolev_conv) conv[std::to_string(n)] = v;
  j["sobolev_conv"] = conv;
  return j.dump(2);
}

SetProfile SetProfile::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("profile JSON: ") + e.what());
  }
  try {
    SetProfile p;
    p.d = j.at("d").get<int>();
    p.dim_H = real_of(j.at("dim_H"));
    p.dim_F = j.contains("dim_F") ? real_of(j.at("dim_F")) : 0.0;
    const json& s = j.at("spectrum");
    const std::string type = s.at("type").get<std::string>();
    if (type == "constant") {
      p.spectrum = SpectrumModel::constant(real_of(s.at("value")));
    } else if (type == "linear") {
      const double cap = s.contains("cap") ? real_of(s.at("cap")) : kInf;
      p.spectrum = SpectrumModel::linear(real_of(s.at("intercept")), real_of(s.at("slope")),
                                         std::isfinite(cap) ? cap : std::numeric_limits<double>::max());
    } else if (type == "samples") {
      std::vector<SpectrumModel::Sample> pts;
      for (const auto& q : s.at("points")) {
        SpectrumModel::Sample x;
        x.theta = real_of(q.at("theta"));
        x.value = real_of(q.at("value"));
        x.stderr_ = q.contains("stderr") ? real_of(q.at("stderr")) : 0.0;
        pts.push_back(x);
      }
      p.spectrum = SpectrumModel::sampled(std::move(pts));
    } else {
      fail(ErrorCode::parse, "unknown spectrum type '" + type + "'");
    }
    if (j.contains("sobolev_conv"))
      for (const auto& [key, v] : j.at("sobolev_conv").items()) p.sobolev_conv[std::stoi(key)] = real_of(v);
    p.validate();
    return p;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("profile JSON: ") + e.what());
  } catch (const std::invalid_argument&) {
    fail(ErrorCode::parse, "profile JSON: bad convolution power key");
  }
}

// ---- grids -----------------------------------------------------------------

std::vector<double> make_grid(double lo, double hi, double step) {
  require(step > 0 && hi >= lo, ErrorCode::invalid_argument, "grid needs step > 0 and hi >= lo");
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 0.5));
  std::vector<double> g;
  for (long long i = 0; i <= n; ++i) g.push_back(std::min(hi, lo + static_cast<double>(i) * step));
  return g;
}

std::vector<double> linspace(double lo, double hi, int n) {
  require(n >= 2, ErrorCode::invalid_argument, "linspace needs at least two points");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  g.back() = hi;
  return g;
}

std::vector<double> default_theta_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 100; ++i) g.push_back(i / 100.0);
  return g;
}

PsVariant parse_ps_variant(const std::string& s) {
  // text and figure are accepted as older spellings
  if (s == "full" || s == "text") return PsVariant::full;
  if (s == "rank" || s == "figure") return PsVariant::rank;
  fail(ErrorCode::invalid_argument, "ps variant must be 'full' or 'rank'");
}

// ---- classical bounds --------------------------------------------------------

std::map<std::string, BoundValue> classical_bounds(const SetProfile& p, int k, double u, PsVariant ps) {
  check_dims(p.d, k);
  check_u(u, k, false);
  const int d = p.d;
  const double H = p.dim_H, cap = grassmann_dim(d, k);
  const bool plane_lines = d == 2 && k == 1;
  std::map<std::string, BoundValue> out;
  auto put = [&](const char* name, double v, bool ok) { out[name] = {clamp_cap(v, cap), ok}; };
  put("kaufman", u, plane_lines && u <= H + kEps);
  put("kaufman_general", d - 2 + u, k == 1 && H <= 1 + kEps && u <= H + kEps);
  put("bourgain_oberlin", 0.0, plane_lines && u < H / 2);
  put("ren_wang", 2 * u - H, plane_lines && u >= H / 2 - kEps && u <= std::min(H, 1.0) + kEps);
  put("mattila", k * (d - k - 1) + u, H <= k + kEps && u <= H + kEps);
  put("peres_schlag", ps == PsVariant::full ? cap + u - H : k + u - H, true);
  put("he", cap - 1, H < d && u < k * H / d);
  put("trivial", cap, true);
  return out;
}

double spectrum_bound(const SetProfile& p, int k, double u, double theta, bool measure_form) {
  check_dims(p.d, k);
  check_u(u, k, measure_form);
  require(theta > 0 && theta <= 1, ErrorCode::invalid_argument,
          "the spectrum bound needs theta in (0,1]; theta = 0 is handled by the emptiness threshold");
  const double cap = grassmann_dim(p.d, k);
  return clamp_cap(cap + u / theta - p.spectrum.value(theta) / theta, cap);
}

BestBound best_spectrum_bound(const SetProfile& p, int k, double u, const std::vector<double>& theta_grid,
                              bool measure_form) {
  check_dims(p.d, k);
  check_u(u, k, measure_form);
  const double cap = grassmann_dim(p.d, k);
  const auto grid = positive_sorted(p.spectrum.grid(theta_grid));
  require(!grid.empty() || !p.sobolev_conv.empty(), ErrorCode::invalid_argument, "empty spectrum data");

  BestBound best;
  best.value = kInf;
  double raw_lower = kInf;  // before clamping
  for (double t : grid) {
    const double v = spectrum_bound(p, k, u, t, measure_form);
    if (v < best.value) {
      best.value = v;
      best.argmin_theta = t;
      best.argmin_n = 0;
    }
  }
  // Between grid points the spectrum can grow at most like d * dtheta and never decreases.
  if (!grid.empty()) {
    const double s1 = p.spectrum.value(grid.front());
    raw_lower = u - s1 >= 0 ? (u - s1) / grid.front() : -kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double a = grid[i];
      const double b = i + 1 < grid.size() ? grid[i + 1] : 1.0;
      if (b <= a) {
        raw_lower = std::min(raw_lower, (u - p.spectrum.value(a)) / a);
        continue;
      }
      double top = p.spectrum.value(a) + p.d * (b - a);
      if (i + 1 < grid.size()) top = std::min(top, p.spectrum.value(b));
      const double num = u - top;
      raw_lower = std::min(raw_lower, num < 0 ? num / a : num / b);
    }
  }
  best.lower = grid.empty() ? kInf : clamp_cap(cap + raw_lower, cap);
  for (const auto& [n, dim_s] : p.sobolev_conv) {
    const double v = clamp_cap(cap + n * u - dim_s, cap);
    if (v < best.value) {
      best.value = v;
      best.argmin_theta = 0;
      best.argmin_n = n;
    }
    best.lower = std::min(best.lower, v);
  }
  return best;
}

Threshold emptiness_threshold(const SetProfile& p, int k, const std::vector<double>& theta_grid) {
  check_dims(p.d, k);
  auto grid = p.spectrum.grid(theta_grid);
  std::sort(grid.begin(), grid.end());
  const double codim = p.d - k;
  Threshold th;
  th.value = std::min<double>(k, p.dim_F);
  th.argmax_theta = 0;
  for (double t : grid) {
    const double v = p.spectrum.value(t) - codim * t;
    if (v > th.value) {
      th.value = v;
      th.argmax_theta = t;
    }
  }
  // monotone spectrum: on [a, b] the objective is at most s(b) - codim * a
  double upper = th.value;
  double prev_t = 0, prev_s = p.dim_F;
  for (double t : grid) {
    if (t <= 0) continue;
    const double s = p.spectrum.value(t);
    upper = std::max(upper, s - codim * prev_t);
    prev_t = t;
    prev_s = s;
  }
  if (prev_t < 1) upper = std::max(upper, prev_s + p.d * (1 - prev_t) - codim * prev_t);
  th.upper = upper;
  return th;
}

// ---- predicates and regions --------------------------------------------------

std::string to_string(Truth t) {
  switch (t) {
    case Truth::holds: return "holds";
    case Truth::fails: return "fails";
    case Truth::uncertain: return "uncertain";
  }
  return "?";
}

Truth strictly_greater(double lhs, double rhs, double sigma, double margin) {
  const double diff = lhs - rhs;
  if (diff - 2 * sigma > margin) return Truth::holds;
  if (diff + 2 * sigma <= margin) return Truth::fails;
  return Truth::uncertain;
}

Baseline parse_baseline(const std::string& s) {
  if (s == "ren_wang") return Baseline::ren_wang;
  if (s == "mattila") return Baseline::mattila;
  if (s == "peres_schlag") return Baseline::peres_schlag;
  fail(ErrorCode::invalid_argument, "baseline must be ren_wang, mattila or peres_schlag");
}

std::string to_string(Baseline b) {
  switch (b) {
    case Baseline::ren_wang: return "ren_wang";
    case Baseline::mattila: return "mattila";
    case Baseline::peres_schlag: return "peres_schlag";
  }
  return "?";
}

ImprovementRegion improvement_region(const SetProfile& p, int k, Baseline baseline,
                                     const std::vector<double>& theta_grid, const std::vector<double>& u_grid,
                                     double margin) {
  check_dims(p.d, k);
  const double H = p.dim_H;
  double u_lo = 0, u_hi = 0;
  bool lo_open = false;
  switch (baseline) {
    case Baseline::ren_wang:
      require(p.d == 2 && k == 1, ErrorCode::invalid_argument, "the planar sharp bound needs d = 2, k = 1");
      u_lo = H / 2;
      u_hi = std::min(H, 1.0);
      lo_open = true;
      break;
    case Baseline::mattila:
      require(H <= k + kEps, ErrorCode::invalid_argument, "this baseline needs dim_H <= k");
      u_lo = 0;
      u_hi = H;
      lo_open = true;
      break;
    case Baseline::peres_schlag:
      require(H >= k - kEps, ErrorCode::invalid_argument, "this baseline needs dim_H >= k");
      u_lo = 0;
      u_hi = k;
      break;
  }
  // improvement at (theta, u) iff spectrum(theta) > threshold(theta, u)
  auto threshold = [&](double t, double u) {
    switch (baseline) {
      case Baseline::ren_wang: return u + t * (1 - 2 * u + H);
      case Baseline::mattila: return u * (1 - t) + k * t;
      case Baseline::peres_schlag: return u * (1 - t) + t * H;
    }
    return kInf;
  };
  ImprovementRegion r;
  r.baseline = baseline;
  r.ceiling = H;
  const auto thetas = positive_sorted(p.spectrum.grid(theta_grid));
  for (double t : thetas) {
    const double s = p.spectrum.value(t), e = p.spectrum.stderr_at(t);
    for (double u : u_grid) {
      if (u > u_hi + kEps || u < u_lo - kEps || (lo_open && u <= u_lo)) continue;
      r.cells.push_back({t, u, strictly_greater(s, threshold(t, u), e, margin)});
    }
    r.boundary.emplace_back(t, std::min(threshold(t, u_lo), threshold(t, u_hi)));
  }
  return r;
}

EmptyInteriorBound empty_interior_bound(const SetProfile& p, int k, const std::vector<double>& theta_grid) {
  check_dims(p.d, k);
  EmptyInteriorBound out;
  double best = kInf;
  for (double t : positive_sorted(p.spectrum.grid(theta_grid))) {
    const double s = p.spectrum.value(t);
    if (s > 2 * k + 1e-9) out.applicable = true;
    const double q = (2 * k - s) / t;
    if (q < best) {
      best = q;
      out.argmin_theta = t;
    }
  }
  if (out.applicable) out.value = std::max(0.0, grassmann_dim(p.d, k) + best);
  return out;
}

namespace {

// Richardson step from quotients at h and h/2.
SemiDerivative richardson(double qh, double qh2, double sigma, double h) {
  SemiDerivative r;
  r.value = 2 * qh2 - qh;
  r.uncertainty = std::abs(qh2 - qh) + sigma;
  r.h = h;
  return r;
}

double pick_step(const std::vector<double>& grid, int end) {
  int near = 0;
  for (double t : grid)
    if (end == 0 ? (t > 0 && t <= 0.1 + kEps) : (t < 1 && t >= 0.9 - kEps)) ++near;
  require(near >= 4, ErrorCode::invalid_argument, "semi-derivative needs at least 4 grid points within 0.1 of the end");
  for (int i = 100; i >= 2; --i) {
    const double h = i / 1000.0;
    const double a = end == 0 ? h : 1 - h, b = end == 0 ? h / 2 : 1 - h / 2;
    if (on_grid(grid, a) && on_grid(grid, b)) return h;
  }
  fail(ErrorCode::invalid_argument, "semi-derivative needs grid points at h and h/2 from the end");
}

}  // namespace

SemiDerivative semi_derivative(const SetProfile& p, int end, const std::vector<double>& theta_grid) {
  require(end == 0 || end == 1, ErrorCode::invalid_argument, "end must be 0 or 1");
  const auto grid = p.spectrum.grid(theta_grid);
  const double h = pick_step(grid, end);
  const auto& s = p.spectrum;
  if (end == 0) {
    const double q1 = (s.value(h) - p.dim_F) / h, q2 = (s.value(h / 2) - p.dim_F) / (h / 2);
    const double sig = std::hypot(2 * s.stderr_at(h / 2) / (h / 2), s.stderr_at(h) / h);
    return richardson(q1, q2, sig, h);
  }
  const double q1 = (p.dim_H - s.value(1 - h)) / h, q2 = (p.dim_H - s.value(1 - h / 2)) / (h / 2);
  const double sig = std::hypot(2 * s.stderr_at(1 - h / 2) / (h / 2), s.stderr_at(1 - h) / h);
  return richardson(q1, q2, sig, h);
}

SemiDerivative small_theta_ratio(const SetProfile& p, const std::vector<double>& theta_grid) {
  const auto grid = p.spectrum.grid(theta_grid);
  const double h = pick_step(grid, 0);
  const auto& s = p.spectrum;
  const double q1 = s.value(h) / h, q2 = s.value(h / 2) / (h / 2);
  const double sig = std::hypot(2 * s.stderr_at(h / 2) / (h / 2), s.stderr_at(h) / h);
  return richardson(q1, q2, sig, h);
}

namespace {

// lhs >= rhs, with the semi-derivative's uncertainty as the undecided band
Truth at_least(double lhs, double rhs, double band, double margin) {
  if (lhs - band >= rhs - margin) return Truth::holds;
  if (lhs + band < rhs - margin) return Truth::fails;
  return Truth::uncertain;
}

Truth less_than(double lhs, double rhs, double band, double margin) {
  if (lhs + band < rhs - margin) return Truth::holds;
  if (lhs - band >= rhs - margin) return Truth::fails;
  return Truth::uncertain;
}

}  // namespace

Truth continuity_ok(const SemiDerivative& d0, int d, int k, double margin) {
  check_dims(d, k);
  return at_least(d0.value, grassmann_dim(d, k), d0.uncertainty, margin);
}

Truth rw_improvement_ok(const SemiDerivative& d1, double dim_H, double margin) {
  return less_than(d1.value, dim_H - 1, d1.uncertainty, margin);
}

Truth ps_improvement_ok(const SemiDerivative& d1, double dim_H, double u, double margin) {
  return less_than(d1.value, dim_H - u, d1.uncertainty, margin);
}

BoundProfile bound_profile(const SetProfile& p, int k, const std::vector<double>& u_grid, PsVariant ps,
                           const std::vector<double>& theta_grid) {
  check_dims(p.d, k);
  require(!u_grid.empty(), ErrorCode::invalid_argument, "empty u grid");
  BoundProfile bp;
  bp.d = p.d;
  bp.k = k;
  bp.cap = grassmann_dim(p.d, k);
  bp.u = u_grid;
  static const char* kOrder[] = {"kaufman", "kaufman_general", "bourgain_oberlin", "ren_wang",
                                 "mattila", "peres_schlag",    "he",               "trivial"};
  for (const char* name : kOrder) bp.methods.push_back({name, {}, {}});
  bp.methods.push_back({"fourier_spectrum", {}, {}});
  for (double u : u_grid) {
    auto cb = classical_bounds(p, k, u, ps);
    for (std::size_t m = 0; m + 1 < bp.methods.size(); ++m) {
      const auto& v = cb.at(bp.methods[m].name);
      bp.methods[m].values.push_back(v.value);
      bp.methods[m].valid.push_back(v.valid);
    }
    auto best = best_spectrum_bound(p, k, u, theta_grid);
    bp.methods.back().values.push_back(best.value);
    bp.methods.back().valid.push_back(true);
  }
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    double env = bp.cap;
    for (const auto& m : bp.methods)
      if (m.valid[i]) env = std::min(env, m.values[i]);
    bp.envelope.push_back(env);
  }
  return bp;
}

EnvelopeValue union_exceptional_envelope(double s, double t, double u) {
  require(s > 0 && s <= 1, ErrorCode::invalid_argument, "s must lie in (0,1]");
  require(t > s / 2 && t < s, ErrorCode::invalid_argument, "t must lie in (s/2, s)");
  require(u >= 0, ErrorCode::invalid_argument, "u must be >= 0");
  if (u < t) return {0.0, false};
  return {2 * t - s, true};
}

}  // namespace fspec
