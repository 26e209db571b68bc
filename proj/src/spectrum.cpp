#include "fspec/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "fspec/regression.hpp"
#include "measure_nodes.hpp"

namespace fspec {

namespace {

constexpr std::size_t kBlock = 256;
constexpr double kFloor = 1e-300;
constexpr double kGolden = 0.6180339887498949;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t shell_seed(std::uint64_t seed, int j) {
  return splitmix(seed ^ splitmix(static_cast<std::uint64_t>(j) + 0x51ED));
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  t = static_cast<unsigned>(std::min<std::size_t>(t, n));
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex guard;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < t; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(guard);
          if (!first) first = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

double sphere_area(int d) {
  const double h = 0.5 * d;
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

// |ft|^2 raised to 1/theta, i.e. |ft|^(2/theta)
double energy_power(double a2, double inv_theta) {
  if (inv_theta == 1.0) return a2;
  if (inv_theta == 2.0) return a2 * a2;
  return std::pow(a2, inv_theta);
}

std::vector<Point> rotation_3d(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double q[4], n = 0;
  for (double& x : q) {
    x = g(rng);
    n += x * x;
  }
  n = std::sqrt(n);
  const double w = q[0] / n, x = q[1] / n, y = q[2] / n, z = q[3] / n;
  return {{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
          {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
          {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
}

// Unit directions covering the sphere modulo z -> -z.
std::vector<Point> sample_directions(int d, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Point> dirs;
  if (d == 1) return {{1.0}};
  if (d == 2) {
    const double u = U(rng);
    for (int k = 0; k < count; ++k) {
      double phi = (k + u) * std::numbers::pi / count;
      dirs.push_back({std::cos(phi), std::sin(phi)});
    }
    return dirs;
  }
  if (d == 3) {
    // Fibonacci sphere under a seeded random rotation
    const double u = U(rng);
    auto rot = rotation_3d(rng);
    const double turn = 2 * std::numbers::pi * (1 - kGolden);
    for (int k = 0; k < count; ++k) {
      double z = 1 - 2 * (k + u) / count;
      double r = std::sqrt(std::max(0.0, 1 - z * z));
      Point p = {r * std::cos(turn * k), r * std::sin(turn * k), z};
      Point q(3, 0.0);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) q[a] += rot[a][b] * p[b];
      dirs.push_back(q);
    }
    return dirs;
  }
  std::normal_distribution<double> g;
  for (int k = 0; k < count; ++k) {
    Point p(static_cast<std::size_t>(d));
    double n = 0;
    for (double& x : p) {
      x = g(rng);
      n += x * x;
    }
    n = std::sqrt(n);
    for (double& x : p) x /= n;
    dirs.push_back(p);
  }
  return dirs;
}

struct Candidate {
  double a2;
  double rho;
  std::size_t dir;
};

struct ShellWork {
  int j = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  bool dense = false;
  double h = 0;                 // radial spacing
  std::vector<double> energy;   // per positive theta
  double sup2 = -1;
  Point argmax;
};

struct GridShape {
  int directions = 1;
  std::size_t radial = 0;
  bool dense = false;
};

std::size_t round_up(std::size_t n) { return (n + kBlock - 1) / kBlock * kBlock; }

std::size_t point_budget(int d, const SamplingPlan& plan) {
  if (plan.max_points) return plan.max_points;
  return d == 1 ? std::size_t{1} << 25 : std::size_t{1} << 22;
}

GridShape grid_shape(int d, int j, double diameter, double theta_grid, const SamplingPlan& plan) {
  const std::size_t max_points = point_budget(d, plan);
  const double width = std::ldexp(1.0, j);
  const double per_unit = plan.oversample * diameter / theta_grid;
  const std::size_t n_min =
      std::max(plan.min_points, plan.points_per_j2 * static_cast<std::size_t>(j) * static_cast<std::size_t>(j));
  require(n_min <= max_points, ErrorCode::budget,
          "shell " + std::to_string(j) + " needs more samples than the per-shell budget");
  const double dense_r = std::ceil(per_unit * width);
  GridShape g;
  if (d == 1) {
    double n = std::max(static_cast<double>(n_min), dense_r);
    g.dense = n <= static_cast<double>(max_points);
    g.radial = round_up(g.dense ? static_cast<std::size_t>(n) : max_points);
    return g;
  }
  const double dense_dirs = std::ceil(plan.oversample * std::numbers::pi * 2 * width * diameter / theta_grid);
  double dirs = std::clamp(dense_dirs, static_cast<double>(plan.min_directions), static_cast<double>(plan.max_directions));
  double radial = std::max(std::ceil(static_cast<double>(n_min) / dirs), dense_r);
  bool dense = d == 2 && dirs >= dense_dirs;
  const double budget = static_cast<double>(max_points);
  if (dirs * radial > budget) {
    const double f = std::sqrt(budget / (dirs * radial));
    dirs = std::max(static_cast<double>(plan.min_directions), std::floor(dirs * f));
    radial = std::max(static_cast<double>(kBlock), std::floor(budget / dirs));
    dense = false;
  }
  g.directions = static_cast<int>(dirs);
  g.radial = round_up(static_cast<std::size_t>(radial));
  g.dense = dense;
  return g;
}

double modulus2_at(const Measure& m, const Point& z, double tol) { return std::norm(m.ft(z, tol)); }

// Golden-section search for the largest |ft(rho e)|^2 on [lo, hi].
std::pair<double, double> refine_radius(const Measure& m, const Point& e, double lo, double hi, double tol) {
  auto at = [&](double rho) {
    Point z(e.size());
    for (std::size_t c = 0; c < e.size(); ++c) z[c] = rho * e[c];
    return modulus2_at(m, z, tol);
  };
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = at(x1), f2 = at(x2);
  for (int it = 0; it < 40 && b - a > 1e-12 * b; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = at(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = at(x1);
    }
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

void keep_candidate(std::vector<Candidate>& top, std::size_t cap, Candidate c, double h) {
  for (auto& t : top)
    if (t.dir == c.dir && std::abs(t.rho - c.rho) < 4 * h) {
      if (c.a2 > t.a2) t = c;
      return;
    }
  if (top.size() < cap) {
    top.push_back(c);
    return;
  }
  auto worst = std::min_element(top.begin(), top.end(), [](auto& x, auto& y) { return x.a2 < y.a2; });
  if (c.a2 > worst->a2) *worst = c;
}

ShellWork sample_shell_polar(const Measure& m, int j, const std::vector<double>& thetas, bool want_sup,
                             double theta_grid, const SamplingPlan& plan) {
  const int d = m.dim();
  ShellWork w;
  w.j = j;
  w.seed = shell_seed(plan.seed, j);
  std::mt19937_64 rng(w.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  const GridShape g = grid_shape(d, j, std::max(m.support_diameter(), 1e-12), theta_grid, plan);
  std::vector<Point> dirs = sample_directions(d, g.directions, rng);
  const std::size_t n_energy_dirs = dirs.size();
  if (want_sup && d >= 2)
    for (int c = 0; c < d; ++c) {
      Point e(static_cast<std::size_t>(d), 0.0);
      e[static_cast<std::size_t>(c)] = 1.0;
      dirs.push_back(e);
    }

  const double lo = std::ldexp(1.0, j);
  const double h = lo / static_cast<double>(g.radial);
  w.h = h;
  w.dense = g.dense;
  w.n = g.radial * n_energy_dirs;

  std::vector<double> inv(thetas.size());
  for (std::size_t t = 0; t < thetas.size(); ++t) inv[t] = 1.0 / thetas[t];
  std::vector<double> acc(thetas.size(), 0.0);
  std::vector<Candidate> top;
  const auto cap = static_cast<std::size_t>(std::max(1, plan.refine_candidates));

  constexpr std::size_t kChunk = 64;  // blocks per evaluation call
  std::vector<Complex> buf(kChunk * kBlock);
  std::vector<double> starts;
  std::vector<double> offsets;
  Point step(static_cast<std::size_t>(d));
  const std::size_t n_blocks = g.radial / kBlock;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const Point& e = dirs[k];
    const bool energy_dir = k < n_energy_dirs;
    for (std::size_t c = 0; c < e.size(); ++c) step[c] = h * e[c];
    for (std::size_t b0 = 0; b0 < n_blocks; b0 += kChunk) {
      const std::size_t nb = std::min(kChunk, n_blocks - b0);
      starts.assign(nb * e.size(), 0.0);
      offsets.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        offsets[b] = lo + (static_cast<double>((b0 + b) * kBlock) + U(rng)) * h;
        for (std::size_t c = 0; c < e.size(); ++c) starts[b * e.size() + c] = offsets[b] * e[c];
      }
      m.ft_grid(starts, step, kBlock, plan.tail_tol, {buf.data(), nb * kBlock});
      for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t i = 0; i < kBlock; ++i) {
          const double rho = offsets[b] + static_cast<double>(i) * h;
          const double a2 = std::norm(buf[b * kBlock + i]);
          if (energy_dir)
            for (std::size_t t = 0; t < inv.size(); ++t) acc[t] += energy_power(a2, inv[t]) / rho;
          if (want_sup) keep_candidate(top, cap, {a2, rho, k}, h);
        }
    }
  }

  const double factor = (d == 1 ? 2.0 : sphere_area(d) / static_cast<double>(n_energy_dirs)) * h;
  for (double& a : acc) a *= factor;
  w.energy = std::move(acc);

  if (want_sup) {
    const double hi = 2 * lo;
    for (const auto& c : top) {
      auto [rho, a2] = refine_radius(m, dirs[c.dir], std::max(lo, c.rho - h), std::min(hi, c.rho + h), plan.tail_tol);
      if (c.a2 > a2) {
        rho = c.rho;
        a2 = c.a2;
      }
      if (a2 > w.sup2) {
        w.sup2 = a2;
        w.argmax.assign(dirs[c.dir].begin(), dirs[c.dir].end());
        for (double& x : w.argmax) x *= rho;
      }
    }
  }
  return w;
}

// ---- products of one-dimensional factors ----
//
// The integrand factorises, so each axis gets its own dense 1-D grid on
// [0, 2^(j+1)). Per-axis values are summed into B bins and contracted with the
// cell average of |u|^-d over the unit-scaled shell 1 <= |u| < 2. This keeps
// the thin slabs around the coordinate hyperplanes, which angular sampling
// misses at high frequency.

bool tensor_eligible(const Measure& m) {
  if (m.kind() != NodeKind::product || m.dim() < 2 || m.dim() > 3) return false;
  for (const auto& f : static_cast<const detail::ProductNode&>(m.node()).factors)
    if (f.dim() != 1) return false;
  return true;
}

int tensor_bins(int d) { return d == 2 ? 1024 : 128; }

std::vector<double> build_shell_kernel(int d, int B) {
  const double cell = 2.0 / B;
  const int sub = d == 2 ? 16 : 8;
  std::size_t total = 1;
  for (int c = 0; c < d; ++c) total *= static_cast<std::size_t>(B);
  std::vector<double> K(total, 0.0);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (int c = d - 1; c >= 0; --c) {
      idx[static_cast<std::size_t>(c)] = static_cast<int>(rest % static_cast<std::size_t>(B));
      rest /= static_cast<std::size_t>(B);
    }
    double lo2 = 0, hi2 = 0, mid2 = 0;
    for (int i : idx) {
      lo2 += (i * cell) * (i * cell);
      hi2 += ((i + 1) * cell) * ((i + 1) * cell);
      mid2 += ((i + 0.5) * cell) * ((i + 0.5) * cell);
    }
    if (hi2 <= 1.0 || lo2 >= 4.0) continue;
    if (lo2 >= 1.0 && hi2 < 4.0) {
      K[flat] = std::pow(mid2, -0.5 * d);
      continue;
    }
    // straddles the boundary: midpoint rule on a sub x sub (x sub) grid
    double acc = 0;
    std::size_t n = 1;
    for (int c = 0; c < d; ++c) n *= static_cast<std::size_t>(sub);
    for (std::size_t q = 0; q < n; ++q) {
      std::size_t r = q;
      double u2 = 0;
      for (int c = 0; c < d; ++c) {
        const double u = (idx[static_cast<std::size_t>(c)] + (static_cast<double>(r % sub) + 0.5) / sub) * cell;
        r /= sub;
        u2 += u * u;
      }
      if (u2 >= 1.0 && u2 < 4.0) acc += std::pow(u2, -0.5 * d);
    }
    K[flat] = acc / static_cast<double>(n);
  }
  return K;
}

const std::vector<double>& shell_kernel(int d) {
  static const std::vector<double> k2 = build_shell_kernel(2, tensor_bins(2));
  static const std::vector<double> k3 = build_shell_kernel(3, tensor_bins(3));
  return d == 2 ? k2 : k3;
}

ShellWork sample_shell_tensor(const Measure& m, int j, const std::vector<double>& thetas, double theta_grid,
                              const SamplingPlan& plan) {
  const auto& factors = static_cast<const detail::ProductNode&>(m.node()).factors;
  const int d = m.dim();
  const int B = tensor_bins(d);
  ShellWork w;
  w.j = j;
  w.seed = shell_seed(plan.seed, j);
  std::mt19937_64 rng(w.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  double diameter = 1e-12;
  for (const auto& f : factors) diameter = std::max(diameter, f.support_diameter());
  const std::size_t max_points = point_budget(1, plan);
  const std::size_t n_min =
      std::max(plan.min_points, plan.points_per_j2 * static_cast<std::size_t>(j) * static_cast<std::size_t>(j));
  const double top = std::ldexp(1.0, j + 1);
  const double dense_n = std::ceil(plan.oversample * diameter / theta_grid * top);
  const double want = std::max(static_cast<double>(n_min), dense_n);
  w.dense = want <= static_cast<double>(max_points);
  const std::size_t N = round_up(w.dense ? static_cast<std::size_t>(want) : max_points);
  const double h = top / static_cast<double>(N);
  const double bin = top / B;
  w.h = h;
  w.n = N * static_cast<std::size_t>(d);

  const std::size_t nt = thetas.size();
  // bins[c][t * B + b]
  std::vector<std::vector<double>> bins(static_cast<std::size_t>(d), std::vector<double>(nt * B, 0.0));
  constexpr std::size_t kChunk = 64;
  std::vector<Complex> buf(kChunk * kBlock);
  std::vector<double> starts;
  const double step[1] = {h};
  const std::size_t n_blocks = N / kBlock;
  const double tol = plan.tail_tol / d;
  for (int c = 0; c < d; ++c) {
    auto& F = bins[static_cast<std::size_t>(c)];
    for (std::size_t b0 = 0; b0 < n_blocks; b0 += kChunk) {
      const std::size_t nb = std::min(kChunk, n_blocks - b0);
      starts.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) starts[b] = (static_cast<double>((b0 + b) * kBlock) + U(rng)) * h;
      factors[static_cast<std::size_t>(c)].ft_grid(starts, step, kBlock, tol, {buf.data(), nb * kBlock});
      for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t i = 0; i < kBlock; ++i) {
          const double x = starts[b] + static_cast<double>(i) * h;
          const auto k = std::min(static_cast<std::size_t>(x / bin), static_cast<std::size_t>(B - 1));
          const double a2 = std::norm(buf[b * kBlock + i]);
          for (std::size_t t = 0; t < nt; ++t) F[t * B + k] += energy_power(a2, 1.0 / thetas[t]);
        }
    }
    for (double& v : F) v *= h;
  }

  const auto& K = shell_kernel(d);
  const double scale = std::ldexp(1.0, d) * std::pow(std::ldexp(1.0, j), -d);  // orthant symmetry, kernel scaling
  const auto Bs = static_cast<std::size_t>(B);
  w.energy.assign(nt, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    const double* F0 = bins[0].data() + t * Bs;
    const double* F1 = bins[1].data() + t * Bs;
    double sum = 0;
    if (d == 2) {
      for (std::size_t a = 0; a < Bs; ++a) {
        double inner = 0;
        const double* row = K.data() + a * Bs;
        for (std::size_t b = 0; b < Bs; ++b) inner += row[b] * F1[b];
        sum += F0[a] * inner;
      }
    } else {
      const double* F2 = bins[2].data() + t * Bs;
      for (std::size_t a = 0; a < Bs; ++a) {
        double mid = 0;
        for (std::size_t b = 0; b < Bs; ++b) {
          double inner = 0;
          const double* row = K.data() + (a * Bs + b) * Bs;
          for (std::size_t c = 0; c < Bs; ++c) inner += row[c] * F2[c];
          mid += F1[b] * inner;
        }
        sum += F0[a] * mid;
      }
    }
    w.energy[t] = scale * sum;
  }
  return w;
}

ShellWork sample_shell(const Measure& m, int j, const std::vector<double>& thetas, bool want_sup, double theta_grid,
                       const SamplingPlan& plan) {
  if (thetas.empty() || !tensor_eligible(m)) return sample_shell_polar(m, j, thetas, want_sup, theta_grid, plan);
  ShellWork w = sample_shell_tensor(m, j, thetas, theta_grid, plan);
  if (want_sup) {
    ShellWork s = sample_shell_polar(m, j, {}, true, 1.0, plan);
    w.sup2 = s.sup2;
    w.argmax = std::move(s.argmax);
    w.h = s.h;
  }
  return w;
}

// Seeds each shell's supremum search with dilations of lower shells' maximisers.
void propagate_dilations(const Measure& m, std::vector<ShellWork>& shells, double tol) {
  const auto hints = m.dilation_hints();
  if (hints.empty()) return;
  for (std::size_t s = 0; s < shells.size(); ++s) {
    auto& w = shells[s];
    const double lo = std::ldexp(1.0, w.j), hi = 2 * lo;
    for (std::size_t p = 0; p < s; ++p) {
      const Point& base = shells[p].argmax;
      if (base.empty()) continue;
      double r = 0;
      for (double x : base) r += x * x;
      r = std::sqrt(r);
      for (double lambda : hints) {
        double f = 1;
        while (r * f < lo) f *= lambda;
        if (!(r * f < hi) || f == 1) continue;
        Point e(base);
        for (double& x : e) x /= r;
        auto [rho, a2] = refine_radius(m, e, std::max(lo, r * f - w.h), std::min(hi, r * f + w.h), tol);
        Point z(e);
        for (double& x : z) x *= r * f;
        double direct = modulus2_at(m, z, tol);
        if (direct >= a2) {
          rho = r * f;
          a2 = direct;
        }
        if (a2 > w.sup2) {
          w.sup2 = a2;
          w.argmax = e;
          for (double& x : w.argmax) x *= rho;
        }
      }
    }
  }
}

void check_range(int j_lo, int j_hi) {
  require(j_lo >= 0, ErrorCode::invalid_argument, "shell indices must be nonnegative");
  require(j_hi - j_lo + 1 >= 6, ErrorCode::invalid_argument, "shell range must span at least 6 shells");
  require(j_hi <= 60, ErrorCode::invalid_argument, "shell index too large");
}

SpectrumEstimate regress(double theta, std::vector<ShellEstimate> shells, int j_lo, int j_hi) {
  SpectrumEstimate est;
  est.theta = theta;
  const int span = j_hi - j_lo + 1;
  const int width = std::max(6, (span + 1) / 2);
  est.window_lo = j_hi - width + 1;
  est.window_hi = j_hi;
  std::vector<double> xs, ys;
  bool dropped = false, sparse = false;
  for (const auto& s : shells) {
    if (s.j < est.window_lo) continue;
    if (!(s.value > kFloor) || !std::isfinite(s.value)) {
      dropped = true;
      continue;
    }
    if (!s.dense) sparse = true;
    xs.push_back(s.j);
    ys.push_back(std::log2(s.value));
  }
  require(xs.size() >= 3, ErrorCode::degenerate, "fewer than three shells above the floating-point floor");
  LineFit f = fit_line(xs, ys);
  const double scale = theta > 0 ? theta : 2.0;
  est.slope = f.slope;
  est.intercept = f.intercept;
  est.s_hat = -scale * f.slope;
  est.stderr_ = scale * f.slope_stderr;
  est.residuals = std::move(f.residuals);
  est.shells = std::move(shells);
  if (dropped)
    est.quality = Quality::truncated;
  else if (sparse || est.stderr_ > 0.05)
    est.quality = Quality::noisy;
  return est;
}

}  // namespace

std::string to_string(Quality q) {
  switch (q) {
    case Quality::ok: return "ok";
    case Quality::noisy: return "noisy";
    case Quality::truncated: return "truncated";
  }
  return "?";
}

ShellEstimate shell_energy(const Measure& measure, double theta, int j, const SamplingPlan& plan) {
  require(theta > 0 && theta <= 1, ErrorCode::invalid_argument, "shell_energy needs theta in (0,1]");
  require(j >= 0, ErrorCode::invalid_argument, "shell index must be nonnegative");
  ShellWork w = sample_shell(measure, j, {theta}, false, theta, plan);
  return {j, w.energy[0], w.n, w.seed, w.dense, {}};
}

ShellEstimate shell_supremum(const Measure& measure, int j, const SamplingPlan& plan) {
  require(j >= 0, ErrorCode::invalid_argument, "shell index must be nonnegative");
  ShellWork w = sample_shell(measure, j, {}, true, 1.0, plan);
  return {j, std::sqrt(std::max(0.0, w.sup2)), w.n, w.seed, w.dense, w.argmax};
}

std::vector<SpectrumEstimate> estimate_spectra(const Measure& measure, const std::vector<double>& thetas, int j_lo,
                                               int j_hi, const SamplingPlan& plan) {
  require(!thetas.empty(), ErrorCode::invalid_argument, "no theta values requested");
  check_range(j_lo, j_hi);
  std::vector<double> positive;
  bool want_sup = false;
  for (double t : thetas) {
    require(t >= 0 && t <= 1, ErrorCode::invalid_argument, "theta must lie in [0,1]");
    if (t == 0)
      want_sup = true;
    else if (std::find(positive.begin(), positive.end(), t) == positive.end())
      positive.push_back(t);
  }
  const double theta_grid = positive.empty() ? 1.0 : *std::min_element(positive.begin(), positive.end());

  const auto count = static_cast<std::size_t>(j_hi - j_lo + 1);
  std::vector<ShellWork> work(count);
  parallel_for(count, plan.threads, [&](std::size_t i) {
    work[i] = sample_shell(measure, j_lo + static_cast<int>(i), positive, want_sup, theta_grid, plan);
  });
  if (want_sup) propagate_dilations(measure, work, plan.tail_tol);

  std::vector<SpectrumEstimate> out;
  for (double t : thetas) {
    std::vector<ShellEstimate> shells;
    const auto idx = static_cast<std::size_t>(std::find(positive.begin(), positive.end(), t) - positive.begin());
    for (const auto& w : work) {
      ShellEstimate s{w.j, 0.0, w.n, w.seed, w.dense, {}};
      if (t == 0) {
        s.value = std::sqrt(std::max(0.0, w.sup2));
        s.argmax = w.argmax;
      } else {
        s.value = w.energy[idx];
      }
      shells.push_back(std::move(s));
    }
    out.push_back(regress(t, std::move(shells), j_lo, j_hi));
  }
  return out;
}

SpectrumEstimate estimate_spectrum(const Measure& measure, double theta, int j_lo, int j_hi,
                                   const SamplingPlan& plan) {
  return estimate_spectra(measure, {theta}, j_lo, j_hi, plan).front();
}

ConvolutionEstimate estimate_via_convolution(const Measure& measure, int n, int j_lo, int j_hi,
                                             const SamplingPlan& plan) {
  require(n >= 1, ErrorCode::invalid_argument, "convolution power must be >= 1");
  ConvolutionEstimate c;
  c.sobolev = estimate_spectrum(Measure::conv_power(measure, n), 1.0, j_lo, j_hi, plan);
  c.value = c.sobolev.s_hat / n;
  c.stderr_ = c.sobolev.stderr_ / n;
  return c;
}

double l2_dimension_self_similar(const std::vector<double>& weights, double ratio, bool open_set_condition) {
  require(open_set_condition, ErrorCode::invalid_argument,
          "the L2-dimension formula needs the open set condition");
  require(ratio > 0 && ratio < 1, ErrorCode::invalid_argument, "ratio must lie in (0,1)");
  require(!weights.empty(), ErrorCode::invalid_argument, "no weights");
  double total = 0, sq = 0;
  for (double p : weights) {
    require(p >= 0, ErrorCode::invalid_argument, "weights must be nonnegative");
    total += p;
    sq += p * p;
  }
  require(std::abs(total - 1) <= 1e-12, ErrorCode::invalid_argument, "weights must sum to 1");
  return std::log(sq) / std::log(ratio);
}

namespace {

// n-fold self-convolution of a 1-d self-similar measure is self-similar with
// the same ratio, translations t_1 + ... + t_n and product weights.
double l2_dimension_power(const Measure& measure, int power) {
  const auto& n = measure.node();
  if (n.kind() == NodeKind::self_similar) {
    const auto& s = static_cast<const detail::SelfSimilarNode&>(n);
    if (power == 1) return l2_dimension_self_similar(s.weights, s.ratio, s.osc);
    std::vector<std::pair<double, double>> dist{{0.0, 1.0}};
    for (int k = 0; k < power; ++k) {
      std::vector<std::pair<double, double>> next;
      for (auto [t, w] : dist)
        for (std::size_t j = 0; j < s.weights.size(); ++j) next.emplace_back(t + s.translations[j], w * s.weights[j]);
      std::sort(next.begin(), next.end());
      dist.clear();
      for (auto [t, w] : next) {
        if (!dist.empty() && std::abs(t - dist.back().first) <= 1e-12) dist.back().second += w;
        else dist.emplace_back(t, w);
      }
    }
    // open set condition with the convex hull as the open set
    const double hull = (dist.back().first - dist.front().first) / (1 - s.ratio);
    bool osc = s.osc;
    for (std::size_t j = 1; j < dist.size(); ++j)
      osc = osc && dist[j].first - dist[j - 1].first >= s.ratio * hull - 1e-12;
    std::vector<double> w;
    for (auto [t, p] : dist) w.push_back(p);
    return l2_dimension_self_similar(w, s.ratio, osc);
  }
  if (n.kind() == NodeKind::product) {
    double sum = 0;
    for (const auto& f : static_cast<const detail::ProductNode&>(n).factors) sum += l2_dimension_power(f, power);
    return sum;
  }
  if (n.kind() == NodeKind::conv_power) {
    const auto& c = static_cast<const detail::ConvPowerNode&>(n);
    return l2_dimension_power(c.base, power * c.n);
  }
  fail(ErrorCode::invalid_argument,
       "L2 dimension formula applies to self-similar leaves, products and convolution powers only");
}

}  // namespace

double l2_dimension(const Measure& measure) { return l2_dimension_power(measure, 1); }

// ---- lattice sums ----------------------------------------------------------------

namespace {

// Calls row(prefix, m_lo, m_hi) for every run of lattice points alpha*(prefix, m)
// with r_lo <= |z| < r_hi (boundary rows may contain a few points outside;
// callers filter exactly). Prefix has d-1 integer coordinates.
template <class Row>
void lattice_rows(int d, double alpha, double r_lo, double r_hi, Row&& row) {
  std::vector<long long> prefix(static_cast<std::size_t>(d - 1), 0);
  const auto bound = static_cast<long long>(std::floor(r_hi / alpha));
  auto emit = [&](double q2) {
    const double top2 = r_hi * r_hi - q2;
    if (top2 < 0) return;
    const auto m_max = static_cast<long long>(std::floor(std::sqrt(top2) / alpha));
    const double bot2 = r_lo * r_lo - q2;
    const auto m_min = bot2 > 0 ? static_cast<long long>(std::ceil(std::sqrt(bot2) / alpha)) : 0LL;
    if (m_min > m_max) return;
    if (m_min == 0) {
      row(prefix, -m_max, m_max);
    } else {
      row(prefix, -m_max, -m_min);
      row(prefix, m_min, m_max);
    }
  };
  if (d == 1) {
    emit(0.0);
    return;
  }
  // odometer over the prefix cube, pruned by the ball
  std::fill(prefix.begin(), prefix.end(), -bound);
  while (true) {
    double q2 = 0;
    for (long long p : prefix) q2 += (alpha * static_cast<double>(p)) * (alpha * static_cast<double>(p));
    if (q2 <= r_hi * r_hi) emit(q2);
    std::size_t c = 0;
    while (c < prefix.size() && prefix[c] == bound) prefix[c++] = -bound;
    if (c == prefix.size()) break;
    ++prefix[c];
  }
}

struct LatticeAccumulator {
  double sum = 0;
  std::size_t points = 0;
};

// sum of |ft(z)|^(2/theta) * |z|^power over alpha Z^d in r_lo <= |z| < r_hi (or <= when closed), z != 0
LatticeAccumulator lattice_accumulate(const Measure& m, double theta, double power, double alpha, double r_lo,
                                      double r_hi, bool closed, std::size_t max_points, double tol) {
  const int d = m.dim();
  std::size_t total = 0;
  lattice_rows(d, alpha, r_lo, r_hi, [&](const std::vector<long long>&, long long a, long long b) {
    total += static_cast<std::size_t>(b - a + 1);
  });
  require(total <= max_points, ErrorCode::budget, "lattice-point budget exceeded");
  LatticeAccumulator acc;
  const double inv = 1.0 / theta;
  std::vector<Complex> buf(kBlock);
  Point z0(static_cast<std::size_t>(d)), step(static_cast<std::size_t>(d), 0.0);
  step.back() = alpha;
  lattice_rows(d, alpha, r_lo, r_hi, [&](const std::vector<long long>& prefix, long long a, long long b) {
    double q2 = 0;
    for (std::size_t c = 0; c < prefix.size(); ++c) {
      z0[c] = alpha * static_cast<double>(prefix[c]);
      q2 += z0[c] * z0[c];
    }
    for (long long s = a; s <= b; s += static_cast<long long>(kBlock)) {
      const auto cnt = static_cast<std::size_t>(std::min<long long>(static_cast<long long>(kBlock), b - s + 1));
      z0.back() = alpha * static_cast<double>(s);
      m.ft_line(z0, step, tol, {buf.data(), cnt});
      for (std::size_t i = 0; i < cnt; ++i) {
        const double last = alpha * static_cast<double>(s + static_cast<long long>(i));
        const double r2 = q2 + last * last;
        if (r2 == 0) continue;
        const double r = std::sqrt(r2);
        if (r < r_lo || r > r_hi || (!closed && r == r_hi)) continue;
        acc.sum += energy_power(std::norm(buf[i]), inv) * std::pow(r, power);
        ++acc.points;
      }
    }
  });
  return acc;
}

}  // namespace

LatticeSum lattice_energy(const Measure& measure, double theta, double s, double alpha, double radius,
                          std::size_t max_points, double tail_tol) {
  require(theta > 0 && theta <= 1, ErrorCode::invalid_argument, "lattice_energy needs theta in (0,1]");
  require(radius >= 1, ErrorCode::invalid_argument, "lattice radius must be >= 1");
  require(alpha > 0 && alpha * measure.support_diameter() < 1, ErrorCode::invalid_argument,
          "lattice spacing must satisfy 0 < alpha < 1/diameter");
  const int d = measure.dim();
  const double e = s / theta - d;
  LatticeAccumulator acc = lattice_accumulate(measure, theta, e, alpha, 0.0, radius, true, max_points, tail_tol);
  LatticeSum out;
  out.value = 1.0 + acc.sum;
  out.points = acc.points;
  if (e + d < 0 && radius >= alpha) {
    out.tail_valid = true;
    out.tail_bound = (-e) * std::pow(3.0 / alpha, d) * std::pow(radius, e + d) / (-e - d);
  }
  return out;
}

SpectrumEstimate lattice_threshold(const Measure& measure, double theta, double alpha, int j_lo, int j_hi,
                                   std::size_t max_points, double tail_tol) {
  require(theta > 0 && theta <= 1, ErrorCode::invalid_argument, "lattice_threshold needs theta in (0,1]");
  require(alpha > 0 && alpha * measure.support_diameter() < 1, ErrorCode::invalid_argument,
          "lattice spacing must satisfy 0 < alpha < 1/diameter");
  check_range(j_lo, j_hi);
  std::vector<ShellEstimate> shells;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double lo = std::ldexp(1.0, j);
    LatticeAccumulator a = lattice_accumulate(measure, theta, -measure.dim(), alpha, lo, 2 * lo, false, max_points,
                                              tail_tol);
    shells.push_back({j, a.sum, a.points, 0, true, {}});
  }
  return regress(theta, std::move(shells), j_lo, j_hi);
}

}  // namespace fspec
