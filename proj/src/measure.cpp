#include "fspec/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "measure_nodes.hpp"

namespace fspec {

namespace {

constexpr std::size_t kResync = 256;  // exact phase recomputation period
constexpr std::size_t kSizeMax = std::numeric_limits<std::size_t>::max();

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kSizeMax / a) return kSizeMax;
  return a * b;
}

std::size_t sat_pow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r = sat_mul(r, base);
  return r;
}

// exp(-2 pi i x) with x reduced modulo 1 in extended precision first.
Complex unit_phase(long double cycles) {
  long double f = cycles - std::floor(cycles);
  double a = -2.0 * std::numbers::pi * static_cast<double>(f);
  return {std::cos(a), std::sin(a)};
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void intersect_into(detail::Dilations& acc, const detail::Dilations& other) {
  if (other.any) return;
  if (acc.any) {
    acc = other;
    return;
  }
  std::vector<double> kept;
  for (double a : acc.values)
    for (double b : other.values)
      if (std::abs(a - b) <= 1e-9 * std::max(a, b)) {
        kept.push_back(a);
        break;
      }
  acc.values = std::move(kept);
}

}  // namespace

// Sort atoms lexicographically and merge those closer than tol in every coordinate.
AtomicMeasure merge_coincident(const AtomicMeasure& in, double tol) {
  const auto d = static_cast<std::size_t>(in.dim);
  std::vector<std::size_t> idx(in.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    auto pa = in.point(a), pb = in.point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  AtomicMeasure out;
  out.dim = in.dim;
  for (std::size_t i : idx) {
    auto p = in.point(i);
    if (!out.weights.empty()) {
      const double* last = out.coords.data() + (out.size() - 1) * d;
      bool same = true;
      for (std::size_t c = 0; c < d && same; ++c) same = std::abs(last[c] - p[c]) <= tol;
      if (same) {
        out.weights.back() += in.weights[i];
        continue;
      }
    }
    out.add(p, in.weights[i]);
  }
  return out;
}

double AtomicMeasure::total_mass() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void AtomicMeasure::add(std::span<const double> p, double w) {
  require(static_cast<int>(p.size()) == dim, ErrorCode::dimension_mismatch, "atom has wrong dimension");
  coords.insert(coords.end(), p.begin(), p.end());
  weights.push_back(w);
}

double Box::diameter() const {
  double s = 0;
  for (std::size_t i = 0; i < lo.size(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  return std::sqrt(s);
}

double Box::radius() const {
  double s = 0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    double m = std::max(std::abs(lo[i]), std::abs(hi[i]));
    s += m * m;
  }
  return std::sqrt(s);
}

int truncation_depth(double ratio, double translation_moment, double abs_xi, double tail_tol) {
  double c = 2.0 * std::numbers::pi * translation_moment * abs_xi;
  if (c == 0.0) return 0;
  // exp(c r^M / (1-r)) - 1 <= tol  <=>  r^M <= log1p(tol) (1-r) / c
  double bound = std::log1p(tail_tol) * (1.0 - ratio) / c;
  if (bound >= 1.0) return 0;
  double m = std::ceil(std::log(bound) / std::log(ratio));
  if (!(m <= kMaxProductDepth))
    fail(ErrorCode::truncation, "Fourier transform needs more than " + std::to_string(kMaxProductDepth) +
                                    " product factors for the requested tolerance");
  return static_cast<int>(m);
}

namespace detail {

void Node::ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len, double tol,
                     Complex* out) const {
  const auto d = static_cast<std::size_t>(dim());
  for (std::size_t b = 0; b < nb; ++b) ft_line(starts + b * d, step, len, tol, out + b * len);
}

// ---- self-similar ------------------------------------------------------------

double SelfSimilarNode::mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

Box SelfSimilarNode::box() const {
  auto [lo, hi] = std::minmax_element(translations.begin(), translations.end());
  return {{*lo / (1 - ratio)}, {*hi / (1 - ratio)}};
}

Dilations SelfSimilarNode::dilations() const {
  if (translations.size() == 1) return {true, {}};
  return {false, {1.0 / ratio}};
}

void SelfSimilarNode::ft_line(const double* z0, const double* step, std::size_t n, double tol,
                              Complex* out) const {
  if (n == 0) return;
  const double x0 = z0[0], dx = step[0];
  const double far = std::max(std::abs(x0), std::abs(x0 + static_cast<double>(n - 1) * dx));
  const int depth = truncation_depth(ratio, moment, far, tol);

  // a zero translation contributes a constant to every factor
  double w_zero = 0;
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < translations.size(); ++j) {
    if (translations[j] == 0.0)
      w_zero += weights[j];
    else
      live.push_back(j);
  }
  const std::size_t J = live.size();
  const std::size_t L = static_cast<std::size_t>(depth) * J;

  std::vector<long double> scaled(L);  // t_j r^m
  {
    long double rm = 1;
    for (int m = 0; m < depth; ++m, rm *= static_cast<long double>(ratio))
      for (std::size_t j = 0; j < J; ++j)
        scaled[static_cast<std::size_t>(m) * J + j] = rm * static_cast<long double>(translations[live[j]]);
  }
  std::vector<double> w(J);
  for (std::size_t j = 0; j < J; ++j) w[j] = weights[live[j]];
  std::vector<Complex> cur(L), rot(L);
  for (std::size_t l = 0; l < L; ++l) rot[l] = unit_phase(scaled[l] * static_cast<long double>(dx));

  for (std::size_t i = 0; i < n; ++i) {
    if (i % kResync == 0) {
      long double xi = static_cast<long double>(x0) + static_cast<long double>(i) * dx;
      for (std::size_t l = 0; l < L; ++l) cur[l] = unit_phase(scaled[l] * xi);
    }
    Complex prod = 1.0;
    for (std::size_t base = 0; base < L; base += J) {
      Complex g = w_zero;
      for (std::size_t j = 0; j < J; ++j) {
        g += w[j] * cur[base + j];
        cur[base + j] *= rot[base + j];
      }
      prod *= g;
    }
    out[i] = prod;
  }
}

void SelfSimilarNode::ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len,
                                double tol, Complex* out) const {
  if (nb == 0 || len == 0) return;
  const double dx = step[0];
  double far = 0;
  for (std::size_t b = 0; b < nb; ++b)
    far = std::max({far, std::abs(starts[b]), std::abs(starts[b] + static_cast<double>(len - 1) * dx)});
  const int depth = truncation_depth(ratio, moment, far, tol);

  double w_zero = 0;
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < translations.size(); ++j) {
    if (translations[j] == 0.0)
      w_zero += weights[j];
    else
      live.push_back(j);
  }
  const std::size_t J = live.size();
  const std::size_t L = static_cast<std::size_t>(depth) * J;
  std::vector<long double> scaled(L);
  std::vector<double> w(L);
  {
    long double rm = 1;
    for (int m = 0; m < depth; ++m, rm *= static_cast<long double>(ratio))
      for (std::size_t j = 0; j < J; ++j) {
        scaled[static_cast<std::size_t>(m) * J + j] = rm * static_cast<long double>(translations[live[j]]);
        w[static_cast<std::size_t>(m) * J + j] = weights[live[j]];
      }
  }
  // shared in-line phase tables exp(-2 pi i t_j r^m dx i), split re/im
  std::vector<double> tr(L * len), ti(L * len);
  for (std::size_t l = 0; l < L; ++l) {
    const Complex rot = unit_phase(scaled[l] * static_cast<long double>(dx));
    Complex cur;
    for (std::size_t i = 0; i < len; ++i) {
      if (i % 64 == 0) cur = unit_phase(scaled[l] * static_cast<long double>(dx) * static_cast<long double>(i));
      tr[l * len + i] = cur.real();
      ti[l * len + i] = cur.imag();
      cur *= rot;
    }
  }
  std::vector<double> pr(len), pim(len), gr(len), gi(len);
  for (std::size_t b = 0; b < nb; ++b) {
    std::fill(pr.begin(), pr.end(), 1.0);
    std::fill(pim.begin(), pim.end(), 0.0);
    const long double x0 = starts[b];
    for (std::size_t base = 0; base < L; base += J) {
      std::fill(gr.begin(), gr.end(), w_zero);
      std::fill(gi.begin(), gi.end(), 0.0);
      for (std::size_t j = 0; j < J; ++j) {
        const std::size_t l = base + j;
        const Complex c0 = unit_phase(scaled[l] * x0);
        const double br = w[l] * c0.real(), bi = w[l] * c0.imag();
        const double* a = &tr[l * len];
        const double* c = &ti[l * len];
        for (std::size_t i = 0; i < len; ++i) {
          gr[i] += br * a[i] - bi * c[i];
          gi[i] += br * c[i] + bi * a[i];
        }
      }
      for (std::size_t i = 0; i < len; ++i) {
        const double r = pr[i] * gr[i] - pim[i] * gi[i];
        pim[i] = pr[i] * gi[i] + pim[i] * gr[i];
        pr[i] = r;
      }
    }
    Complex* o = out + b * len;
    for (std::size_t i = 0; i < len; ++i) o[i] = {pr[i], pim[i]};
  }
}

AtomicMeasure SelfSimilarNode::discretize(int level, std::size_t cap) const {
  require(atom_count(level) <= cap, ErrorCode::budget, "discretization exceeds the atom cap");
  AtomicMeasure a;
  a.dim = 1;
  a.coords = {0.0};
  a.weights = {1.0};
  double rm = 1;
  for (int m = 0; m < level; ++m, rm *= ratio) {
    AtomicMeasure next;
    next.dim = 1;
    next.coords.reserve(a.size() * translations.size());
    next.weights.reserve(a.size() * translations.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < translations.size(); ++j) {
        next.coords.push_back(a.coords[i] + rm * translations[j]);
        next.weights.push_back(a.weights[i] * weights[j]);
      }
    a = std::move(next);
  }
  return a;
}

std::size_t SelfSimilarNode::atom_count(int level) const { return sat_pow(translations.size(), level); }

// ---- atomic ------------------------------------------------------------------

Box AtomicNode::box() const {
  const auto d = static_cast<std::size_t>(atoms.dim);
  Box b{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  if (atoms.size() == 0) return b;
  for (std::size_t c = 0; c < d; ++c) b.lo[c] = b.hi[c] = atoms.coords[c];
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto p = atoms.point(i);
    for (std::size_t c = 0; c < d; ++c) {
      b.lo[c] = std::min(b.lo[c], p[c]);
      b.hi[c] = std::max(b.hi[c], p[c]);
    }
  }
  return b;
}

Dilations AtomicNode::dilations() const {
  if (atoms.size() <= 1) return {true, {}};
  return {};
}

void AtomicNode::ft_line(const double* z0, const double* step, std::size_t n, double, Complex* out) const {
  std::fill(out, out + n, Complex{});
  const auto d = static_cast<std::size_t>(atoms.dim);
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    auto p = atoms.point(a);
    long double c0 = 0, cs = 0;
    for (std::size_t c = 0; c < d; ++c) {
      c0 += static_cast<long double>(z0[c]) * p[c];
      cs += static_cast<long double>(step[c]) * p[c];
    }
    const double w = atoms.weights[a];
    const Complex rot = unit_phase(cs);
    Complex cur;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % kResync == 0) cur = unit_phase(c0 + static_cast<long double>(i) * cs);
      out[i] += w * cur;
      cur *= rot;
    }
  }
}

// ---- product -----------------------------------------------------------------

double ProductNode::mass() const {
  double m = 1;
  for (const auto& f : factors) m *= f.mass();
  return m;
}

Box ProductNode::box() const {
  Box b;
  for (const auto& f : factors) {
    Box fb = f.bounding_box();
    b.lo.insert(b.lo.end(), fb.lo.begin(), fb.lo.end());
    b.hi.insert(b.hi.end(), fb.hi.begin(), fb.hi.end());
  }
  return b;
}

Dilations ProductNode::dilations() const {
  Dilations acc{true, {}};
  for (const auto& f : factors) intersect_into(acc, f.node().dilations());
  return acc;
}

void ProductNode::ft_line(const double* z0, const double* step, std::size_t n, double tol,
                          Complex* out) const {
  std::fill(out, out + n, Complex{1.0});
  std::vector<Complex> tmp(n);
  const double each = tol / static_cast<double>(factors.size());
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const auto off = static_cast<std::size_t>(offsets[f]);
    factors[f].node().ft_line(z0 + off, step + off, n, each, tmp.data());
    for (std::size_t i = 0; i < n; ++i) out[i] *= tmp[i];
  }
}

void ProductNode::ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len, double tol,
                            Complex* out) const {
  const std::size_t total = nb * len;
  std::fill(out, out + total, Complex{1.0});
  std::vector<Complex> tmp(total);
  const double each = tol / static_cast<double>(factors.size());
  const auto d = static_cast<std::size_t>(total_dim);
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const auto off = static_cast<std::size_t>(offsets[f]);
    const auto df = static_cast<std::size_t>(factors[f].dim());
    std::vector<double> sub(nb * df);
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t c = 0; c < df; ++c) sub[b * df + c] = starts[b * d + off + c];
    factors[f].node().ft_blocks(sub.data(), nb, step + off, len, each, tmp.data());
    for (std::size_t i = 0; i < total; ++i) out[i] *= tmp[i];
  }
}

AtomicMeasure ProductNode::discretize(int level, std::size_t cap) const {
  require(atom_count(level) <= cap, ErrorCode::budget, "discretization exceeds the atom cap");
  AtomicMeasure acc;
  acc.dim = 0;
  acc.weights = {1.0};
  for (const auto& f : factors) {
    AtomicMeasure fa = f.discretize(level, cap);
    AtomicMeasure next;
    next.dim = acc.dim + fa.dim;
    std::vector<double> pt(static_cast<std::size_t>(next.dim));
    for (std::size_t i = 0; i < acc.size(); ++i)
      for (std::size_t j = 0; j < fa.size(); ++j) {
        auto pi = acc.point(i);
        auto pj = fa.point(j);
        std::copy(pi.begin(), pi.end(), pt.begin());
        std::copy(pj.begin(), pj.end(), pt.begin() + acc.dim);
        next.add(pt, acc.weights[i] * fa.weights[j]);
      }
    acc = std::move(next);
  }
  return acc;
}

std::size_t ProductNode::atom_count(int level) const {
  std::size_t c = 1;
  for (const auto& f : factors) c = sat_mul(c, f.atom_count(level));
  return c;
}

// ---- convolution power ---------------------------------------------------------

double ConvPowerNode::mass() const { return std::pow(base.mass(), n); }

Box ConvPowerNode::box() const {
  Box b = base.bounding_box();
  for (auto& x : b.lo) x *= n;
  for (auto& x : b.hi) x *= n;
  return b;
}

Dilations ConvPowerNode::dilations() const { return base.node().dilations(); }

void ConvPowerNode::ft_line(const double* z0, const double* step, std::size_t count, double tol,
                            Complex* out) const {
  base.node().ft_line(z0, step, count, tol / n, out);
  for (std::size_t i = 0; i < count; ++i) {
    Complex v = out[i], r = 1.0;
    for (int p = 0; p < n; ++p) r *= v;
    out[i] = r;
  }
}

void ConvPowerNode::ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len,
                              double tol, Complex* out) const {
  base.node().ft_blocks(starts, nb, step, len, tol / n, out);
  for (std::size_t i = 0; i < nb * len; ++i) {
    Complex v = out[i], r = 1.0;
    for (int p = 0; p < n; ++p) r *= v;
    out[i] = r;
  }
}

AtomicMeasure ConvPowerNode::discretize(int level, std::size_t cap) const {
  AtomicMeasure b = base.discretize(level, cap);
  AtomicMeasure acc = b;
  const auto d = static_cast<std::size_t>(b.dim);
  std::vector<double> pt(d);
  for (int p = 1; p < n; ++p) {
    require(sat_mul(acc.size(), b.size()) <= sat_mul(cap, 4), ErrorCode::budget,
            "convolution discretization exceeds the atom cap");
    AtomicMeasure next;
    next.dim = b.dim;
    for (std::size_t i = 0; i < acc.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        auto pi = acc.point(i);
        auto pj = b.point(j);
        for (std::size_t c = 0; c < d; ++c) pt[c] = pi[c] + pj[c];
        next.add(pt, acc.weights[i] * b.weights[j]);
      }
    acc = merge_coincident(next, 1e-12);
    require(acc.size() <= cap, ErrorCode::budget, "convolution discretization exceeds the atom cap");
  }
  return acc;
}

std::size_t ConvPowerNode::atom_count(int level) const { return sat_pow(base.atom_count(level), n); }

// ---- mixture -----------------------------------------------------------------

double MixtureNode::mass() const {
  double m = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) m += coefficients[i] * parts[i].mass();
  return m;
}

Box MixtureNode::box() const {
  Box b = parts.front().bounding_box();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    Box o = parts[i].bounding_box();
    for (std::size_t c = 0; c < b.lo.size(); ++c) {
      b.lo[c] = std::min(b.lo[c], o.lo[c]);
      b.hi[c] = std::max(b.hi[c], o.hi[c]);
    }
  }
  return b;
}

Dilations MixtureNode::dilations() const {
  Dilations acc{true, {}};
  for (const auto& p : parts) intersect_into(acc, p.node().dilations());
  return acc;
}

void MixtureNode::ft_line(const double* z0, const double* step, std::size_t n, double tol,
                          Complex* out) const {
  std::fill(out, out + n, Complex{});
  std::vector<Complex> tmp(n);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (coefficients[p] == 0.0) continue;
    parts[p].node().ft_line(z0, step, n, tol, tmp.data());
    for (std::size_t i = 0; i < n; ++i) out[i] += coefficients[p] * tmp[i];
  }
}

void MixtureNode::ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len, double tol,
                            Complex* out) const {
  const std::size_t total = nb * len;
  std::fill(out, out + total, Complex{});
  std::vector<Complex> tmp(total);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (coefficients[p] == 0.0) continue;
    parts[p].node().ft_blocks(starts, nb, step, len, tol, tmp.data());
    for (std::size_t i = 0; i < total; ++i) out[i] += coefficients[p] * tmp[i];
  }
}

AtomicMeasure MixtureNode::discretize(int level, std::size_t cap) const {
  require(atom_count(level) <= cap, ErrorCode::budget, "discretization exceeds the atom cap");
  AtomicMeasure acc;
  acc.dim = dim();
  for (std::size_t p = 0; p < parts.size(); ++p) {
    AtomicMeasure a = parts[p].discretize(level, cap);
    for (std::size_t i = 0; i < a.size(); ++i) acc.add(a.point(i), coefficients[p] * a.weights[i]);
  }
  return acc;
}

std::size_t MixtureNode::atom_count(int level) const {
  std::size_t c = 0;
  for (const auto& p : parts) {
    std::size_t k = p.atom_count(level);
    c = (c > kSizeMax - k) ? kSizeMax : c + k;
  }
  return c;
}

// ---- affine image --------------------------------------------------------------

Box AffineNode::box() const {
  Box b = base.bounding_box();
  for (std::size_t c = 0; c < b.lo.size(); ++c) {
    double a = scale[c] * b.lo[c] + shift[c], e = scale[c] * b.hi[c] + shift[c];
    b.lo[c] = std::min(a, e);
    b.hi[c] = std::max(a, e);
  }
  return b;
}

Dilations AffineNode::dilations() const { return base.node().dilations(); }

void AffineNode::ft_line(const double* z0, const double* step, std::size_t n, double tol,
                         Complex* out) const {
  const std::size_t d = scale.size();
  std::vector<double> a0(d), as(d);
  long double c0 = 0, cs = 0;
  for (std::size_t c = 0; c < d; ++c) {
    a0[c] = scale[c] * z0[c];
    as[c] = scale[c] * step[c];
    c0 += static_cast<long double>(z0[c]) * shift[c];
    cs += static_cast<long double>(step[c]) * shift[c];
  }
  base.node().ft_line(a0.data(), as.data(), n, tol, out);
  const Complex rot = unit_phase(cs);
  Complex cur;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % kResync == 0) cur = unit_phase(c0 + static_cast<long double>(i) * cs);
    out[i] *= cur;
    cur *= rot;
  }
}

void AffineNode::ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len, double tol,
                           Complex* out) const {
  const std::size_t d = scale.size();
  std::vector<double> a0(nb * d), as(d);
  long double cs = 0;
  for (std::size_t c = 0; c < d; ++c) {
    as[c] = scale[c] * step[c];
    cs += static_cast<long double>(step[c]) * shift[c];
  }
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t c = 0; c < d; ++c) a0[b * d + c] = scale[c] * starts[b * d + c];
  base.node().ft_blocks(a0.data(), nb, as.data(), len, tol, out);
  const Complex rot = unit_phase(cs);
  for (std::size_t b = 0; b < nb; ++b) {
    long double c0 = 0;
    for (std::size_t c = 0; c < d; ++c) c0 += static_cast<long double>(starts[b * d + c]) * shift[c];
    Complex cur;
    for (std::size_t i = 0; i < len; ++i) {
      if (i % kResync == 0) cur = unit_phase(c0 + static_cast<long double>(i) * cs);
      out[b * len + i] *= cur;
      cur *= rot;
    }
  }
}

AtomicMeasure AffineNode::discretize(int level, std::size_t cap) const {
  AtomicMeasure a = base.discretize(level, cap);
  const auto d = static_cast<std::size_t>(a.dim);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t c = 0; c < d; ++c) a.coords[i * d + c] = scale[c] * a.coords[i * d + c] + shift[c];
  return a;
}

// ---- projection ----------------------------------------------------------------

Box ProjectedNode::box() const {
  // Ball around the projected centre of the base box.
  Box b = base.bounding_box();
  Point centre(b.lo.size());
  for (std::size_t c = 0; c < centre.size(); ++c) centre[c] = 0.5 * (b.lo[c] + b.hi[c]);
  Point pc = frame.project(centre);
  const double r = 0.5 * b.diameter();
  Box out;
  for (double x : pc) {
    out.lo.push_back(x - r);
    out.hi.push_back(x + r);
  }
  return out;
}

Dilations ProjectedNode::dilations() const { return base.node().dilations(); }

void ProjectedNode::ft_line(const double* z0, const double* step, std::size_t n, double tol,
                            Complex* out) const {
  const auto k = static_cast<std::size_t>(frame.dim());
  Point a = frame.lift({z0, k});
  Point s = frame.lift({step, k});
  base.node().ft_line(a.data(), s.data(), n, tol, out);
}

void ProjectedNode::ft_blocks(const double* starts, std::size_t nb, const double* step, std::size_t len,
                              double tol, Complex* out) const {
  const auto k = static_cast<std::size_t>(frame.dim());
  const auto d = static_cast<std::size_t>(frame.ambient_dim());
  std::vector<double> lifted(nb * d);
  for (std::size_t b = 0; b < nb; ++b) {
    Point z = frame.lift({starts + b * k, k});
    std::copy(z.begin(), z.end(), lifted.begin() + static_cast<long>(b * d));
  }
  Point s = frame.lift({step, k});
  base.node().ft_blocks(lifted.data(), nb, s.data(), len, tol, out);
}

AtomicMeasure ProjectedNode::discretize(int, std::size_t) const {
  fail(ErrorCode::invalid_argument, "cannot discretize a projected measure; discretize the base and project the atoms");
}

}  // namespace detail

// ---- Measure -----------------------------------------------------------------

Measure Measure::self_similar(double ratio, std::vector<double> translations, std::vector<double> weights,
                              bool open_set_condition) {
  require(std::isfinite(ratio) && ratio > 0.0 && ratio < 1.0, ErrorCode::invalid_argument,
          "ratio must lie strictly inside (0,1)");
  require(!translations.empty() && translations.size() == weights.size(), ErrorCode::invalid_argument,
          "translations and weights must be non-empty and of equal length");
  require(all_finite(translations) && all_finite(weights), ErrorCode::invalid_argument,
          "non-finite translation or weight");
  double total = 0;
  for (double w : weights) {
    require(w >= 0.0, ErrorCode::invalid_argument, "weights must be nonnegative");
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::invalid_argument, "weights must sum to 1");
  {
    auto sorted = translations;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorCode::invalid_argument,
            "translations must be pairwise distinct");
  }
  auto node = std::make_shared<detail::SelfSimilarNode>();
  node->ratio = ratio;
  node->moment = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) node->moment += weights[j] * std::abs(translations[j]);
  node->translations = std::move(translations);
  node->weights = std::move(weights);
  node->osc = open_set_condition;
  return Measure(std::move(node));
}

Measure Measure::atomic(AtomicMeasure atoms) {
  require(atoms.dim >= 1, ErrorCode::invalid_argument, "atomic measure needs dimension >= 1");
  require(atoms.coords.size() == atoms.weights.size() * static_cast<std::size_t>(atoms.dim),
          ErrorCode::dimension_mismatch, "atom coordinates do not match the dimension");
  require(all_finite(atoms.coords) && all_finite(atoms.weights), ErrorCode::invalid_argument,
          "non-finite atom");
  for (double w : atoms.weights) require(w >= 0.0, ErrorCode::invalid_argument, "atom weights must be nonnegative");
  require(atoms.total_mass() <= 1.0 + 1e-12, ErrorCode::invalid_argument, "atomic mass exceeds 1");
  auto node = std::make_shared<detail::AtomicNode>();
  node->atoms = std::move(atoms);
  return Measure(std::move(node));
}

Measure Measure::dirac(std::vector<double> point) {
  AtomicMeasure a;
  a.dim = static_cast<int>(point.size());
  a.add(point, 1.0);
  return atomic(std::move(a));
}

Measure Measure::product(std::vector<Measure> factors) {
  require(!factors.empty(), ErrorCode::invalid_argument, "product needs at least one factor");
  auto node = std::make_shared<detail::ProductNode>();
  int off = 0;
  for (const auto& f : factors) {
    node->offsets.push_back(off);
    off += f.dim();
  }
  node->total_dim = off;
  node->factors = std::move(factors);
  return Measure(std::move(node));
}

Measure Measure::conv_power(Measure base, int n) {
  require(n >= 1, ErrorCode::invalid_argument, "convolution power must be >= 1");
  return Measure(std::make_shared<detail::ConvPowerNode>(std::move(base), n));
}

Measure Measure::mixture(std::vector<double> coefficients, std::vector<Measure> parts) {
  require(!parts.empty() && parts.size() == coefficients.size(), ErrorCode::invalid_argument,
          "mixture needs matching non-empty coefficient and part lists");
  double total = 0;
  for (double c : coefficients) {
    require(std::isfinite(c) && c >= 0.0, ErrorCode::invalid_argument, "mixture coefficients must be nonnegative");
    total += c;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::invalid_argument, "mixture coefficients must sum to 1");
  for (const auto& p : parts)
    require(p.dim() == parts.front().dim(), ErrorCode::dimension_mismatch, "mixture parts differ in dimension");
  auto node = std::make_shared<detail::MixtureNode>();
  node->coefficients = std::move(coefficients);
  node->parts = std::move(parts);
  return Measure(std::move(node));
}

Measure Measure::affine(Measure base, std::vector<double> scale, std::vector<double> shift) {
  const auto d = static_cast<std::size_t>(base.dim());
  require(scale.size() == d && shift.size() == d, ErrorCode::dimension_mismatch,
          "affine scale/shift must match the measure dimension");
  require(all_finite(scale) && all_finite(shift), ErrorCode::invalid_argument, "non-finite affine map");
  return Measure(std::make_shared<detail::AffineNode>(std::move(base), std::move(scale), std::move(shift)));
}

Measure Measure::projected(Measure base, Frame frame) {
  require(frame.ambient_dim() == base.dim(), ErrorCode::dimension_mismatch,
          "frame ambient dimension differs from the measure dimension");
  return Measure(std::make_shared<detail::ProjectedNode>(std::move(base), std::move(frame)));
}

NodeKind Measure::kind() const { return node_->kind(); }
int Measure::dim() const { return node_->dim(); }
double Measure::mass() const { return node_->mass(); }
bool Measure::is_probability(double tol) const { return std::abs(mass() - 1.0) <= tol; }
Box Measure::bounding_box() const { return node_->box(); }
double Measure::support_diameter() const { return bounding_box().diameter(); }
double Measure::support_radius() const { return bounding_box().radius(); }

std::vector<double> Measure::dilation_hints() const {
  auto d = node_->dilations();
  return d.any ? std::vector<double>{} : d.values;
}

Complex Measure::ft(std::span<const double> z, double tail_tol) const {
  Complex out;
  std::vector<double> zero(z.size(), 0.0);
  ft_line(z, zero, tail_tol, {&out, 1});
  return out;
}

void Measure::ft_line(std::span<const double> z0, std::span<const double> step, double tail_tol,
                      std::span<Complex> out) const {
  const auto d = static_cast<std::size_t>(dim());
  require(z0.size() == d && step.size() == d, ErrorCode::dimension_mismatch, "frequency has wrong dimension");
  require(all_finite(z0) && all_finite(step), ErrorCode::invalid_argument, "non-finite frequency");
  require(tail_tol > 0.0 && tail_tol <= 1e-3, ErrorCode::invalid_argument, "tail_tol must lie in (0, 1e-3]");
  if (out.size() > 1) {
    std::vector<double> last(d);
    for (std::size_t c = 0; c < d; ++c) last[c] = z0[c] + static_cast<double>(out.size() - 1) * step[c];
    require(all_finite(last), ErrorCode::invalid_argument, "non-finite frequency");
  }
  node_->ft_line(z0.data(), step.data(), out.size(), tail_tol, out.data());
}

void Measure::ft_grid(std::span<const double> starts, std::span<const double> step, std::size_t len,
                      double tail_tol, std::span<Complex> out) const {
  const auto d = static_cast<std::size_t>(dim());
  require(starts.size() % d == 0 && step.size() == d, ErrorCode::dimension_mismatch, "frequency has wrong dimension");
  const std::size_t nb = starts.size() / d;
  require(out.size() == nb * len, ErrorCode::dimension_mismatch, "output size must be lines * len");
  require(all_finite(starts) && all_finite(step), ErrorCode::invalid_argument, "non-finite frequency");
  require(tail_tol > 0.0 && tail_tol <= 1e-3, ErrorCode::invalid_argument, "tail_tol must lie in (0, 1e-3]");
  if (nb == 0 || len == 0) return;
  for (std::size_t c = 0; c < d; ++c)
    require(std::isfinite(static_cast<double>(len - 1) * step[c]), ErrorCode::invalid_argument, "non-finite frequency");
  node_->ft_blocks(starts.data(), nb, step.data(), len, tail_tol, out.data());
}

AtomicMeasure Measure::discretize(int level, std::size_t max_atoms) const {
  require(level >= 0, ErrorCode::invalid_argument, "level must be nonnegative");
  return node_->discretize(level, max_atoms);
}

std::size_t Measure::atom_count(int level) const { return node_->atom_count(level); }

Measure cantor_measure(double alpha) {
  require(alpha > 0.0 && alpha < 0.5, ErrorCode::invalid_argument, "alpha must lie in (0, 1/2)");
  return Measure::self_similar(alpha, {0.0, 1.0 - alpha}, {0.5, 0.5}, true);
}

Measure lebesgue_unit_interval() { return Measure::self_similar(0.5, {0.0, 0.5}, {0.5, 0.5}, true); }

}  // namespace fspec
