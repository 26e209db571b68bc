// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [data-dir]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fspec/bounds.hpp"
#include "fspec/constructions.hpp"
#include "fspec/error.hpp"
#include "fspec/frame.hpp"
#include "fspec/projection.hpp"
#include "fspec/report.hpp"
#include "fspec/spectrum.hpp"

using namespace fspec;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failed = 0;

void run(int id, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %2d %s  %s  [%.2f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++g_failed;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

// dimensions of the three-Cantor product written out directly
double closed_dim_H(double a, double b, double c) {
  return std::log(2.0) * (1 / -std::log(a) + 1 / -std::log(b) + 1 / -std::log(c));
}
double closed_dim_S2(double a, double b, double c) {
  return std::log(8.0 / 3) * (1 / -std::log(a) + 1 / -std::log(b) + 1 / -std::log(c));
}

// ---- 1 ----------------------------------------------------------------------------
Outcome closed_forms() {
  const auto t0 = std::chrono::steady_clock::now();
  const CantorTriple ex = build_example(1.0 / 3, 1.0 / 4, 1.0 / 5);
  const double us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  const bool h_ok = std::abs(ex.dim_H - 1.56160) <= 1e-4;
  const bool s_ok = std::abs(ex.dim_S_conv2 - 2.20890) <= 1e-4;
  const bool oracle_ok = std::abs(ex.dim_S_conv2 - closed_dim_S2(1.0 / 3, 0.25, 0.2)) <= 1e-12 &&
                         std::abs(ex.dim_H - closed_dim_H(1.0 / 3, 0.25, 0.2)) <= 1e-12;
  const bool fast = us < 1000;
  return {h_ok && s_ok && oracle_ok && fast,
          fmt("dim_H=%.7f (1.56160: %s) dim_S(mu*mu)=%.7f (2.20890 +- 1e-4: %s; formula recomputed here gives "
              "%.7f) build %.0f us",
              ex.dim_H, h_ok ? "ok" : "off", ex.dim_S_conv2, s_ok ? "ok" : "off",
              closed_dim_S2(1.0 / 3, 0.25, 0.2), us)};
}

// ---- 2 ----------------------------------------------------------------------------
Outcome curve_data() {
  const double a = 1.0 / 3, b = 0.25, c = 0.2;
  const CantorTriple ex = build_example(a, b, c);
  const std::string csv = report::curves_csv(exceptional_curves(ex, PsVariant::full, 201));
  const double H = closed_dim_H(a, b, c), S = closed_dim_S2(a, b, c);

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  if (line != "k,u,method,value") return {false, "unexpected header " + line};
  int rows = 0, mismatches = 0, per_k[3] = {0, 0, 0};
  double edge[3] = {-1, -1, -1}, first_pos[3] = {9, 9, 9};
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kk, uu, method, vv;
    std::getline(ls, kk, ',');
    std::getline(ls, uu, ',');
    std::getline(ls, method, ',');
    std::getline(ls, vv, ',');
    const int k = std::stoi(kk);
    const double u = std::stod(uu), v = std::stod(vv);
    double want = 0;
    if (method == "fourier_spectrum") {
      want = std::clamp(2 + 2 * u - S, 0.0, 2.0);
      ++per_k[k];
      if (v == 0) edge[k] = std::max(edge[k], u);
      else first_pos[k] = std::min(first_pos[k], u);
    } else if (method == "mattila") {
      want = std::min(2.0, k == 1 ? 1 + u : u);
    } else if (method == "peres_schlag") {
      want = std::clamp(2 + u - H, 0.0, 2.0);
    } else {
      ++mismatches;
    }
    if (std::abs(v - want) > 1e-12) ++mismatches;
    ++rows;
  }
  // the zero set ends between the last zero grid point and the first positive one
  const double e = (S - 2) / 2;
  bool bracket = true;
  for (int k : {1, 2}) bracket = bracket && edge[k] <= e && e < first_pos[k];
  const bool edge_ok = std::abs(e - 0.10445) <= 5e-4;
  return {rows == 1206 && per_k[1] == 201 && per_k[2] == 201 && mismatches == 0 && bracket && edge_ok,
          fmt("%d rows, %d mismatches vs closed forms; zero edge %.7f (0.10445 +- 5e-4: %s), grid brackets it: %s",
              rows, mismatches, e, edge_ok ? "ok" : "off", bracket ? "yes" : "no")};
}

// ---- 3 and 4 ----------------------------------------------------------------------
struct CantorRun {
  SpectrumEstimate half;
};
CantorRun g_cantor;

Outcome calibration() {
  const int jlo = 0, jhi = 24;
  SamplingPlan plan;
  const auto leb = estimate_spectrum(lebesgue_unit_interval(), 1.0, jlo, jhi, plan);
  const auto cs = estimate_spectra(cantor_measure(1.0 / 3), {0.0, 0.5, 1.0}, jlo, jhi, plan);
  g_cantor.half = cs[1];
  const double oracle_half = l2_dimension(Measure::conv_power(cantor_measure(1.0 / 3), 2)) / 2;
  const double oracle_one = std::log(2.0) / std::log(3.0);
  const bool l_ok = std::abs(leb.s_hat - 2.0) <= 0.1;
  const bool c1 = std::abs(cs[2].s_hat - 0.6309) <= 0.05;
  const bool c0 = cs[0].s_hat <= 0.05;
  const bool ch = std::abs(cs[1].s_hat - 0.4464) <= 0.05 && std::abs(oracle_half - 0.4464) <= 5e-5;
  return {l_ok && c1 && c0 && ch && std::abs(oracle_one - 0.6309) < 5e-5,
          fmt("Lebesgue th=1 %.4f; Cantor th=1 %.4f, th=0 %.4f, th=1/2 %.4f (convolution oracle %.5f), j [%d,%d]",
              leb.s_hat, cs[2].s_hat, cs[0].s_hat, cs[1].s_hat, oracle_half, jlo, jhi)};
}

Outcome convolution_identity() {
  SamplingPlan plan;
  const auto conv = estimate_via_convolution(cantor_measure(1.0 / 3), 2, 0, 24, plan);
  const auto& direct = g_cantor.half.shells.empty()
                           ? estimate_spectrum(cantor_measure(1.0 / 3), 0.5, 0, 24, plan)
                           : g_cantor.half;
  const double diff = std::abs(2 * conv.value - 2 * direct.s_hat);
  const double tol = 3 * combined(2 * conv.stderr_, 2 * direct.stderr_);
  return {diff <= tol, fmt("2*conv %.4f vs 2*direct %.4f: |diff| %.4f <= 3 sigma %.4f", 2 * conv.value,
                           2 * direct.s_hat, diff, tol)};
}

// ---- 5 ----------------------------------------------------------------------------
Outcome projection_inequality() {
  const Measure C = cantor_measure(1.0 / 3);
  const Measure P = Measure::product({C, C});
  const std::vector<double> th = {0.25, 0.5, 0.75, 1.0};
  const int jlo = 4, jhi = 16;
  const auto base = estimate_spectra(P, th, jlo, jhi);
  int violations = 0, checks = 0;
  double worst = 1e9;
  for (int i = 0; i < 20; ++i) {
    const Frame f = sample_grassmannian(2, 1, kDefaultSeed + static_cast<std::uint64_t>(i));
    const auto proj = estimate_spectra(project_measure(P, f), th, jlo, jhi);
    for (std::size_t t = 0; t < th.size(); ++t) {
      const double margin =
          proj[t].s_hat - (base[t].s_hat - th[t] - 3 * combined(base[t].stderr_, proj[t].stderr_));
      worst = std::min(worst, margin);
      violations += margin < 0;
      ++checks;
    }
  }
  return {violations == 0, fmt("%d/%d checks violate projected >= base - theta - 3 sigma; smallest margin %.4f",
                               violations, checks, worst)};
}

// ---- 6 ----------------------------------------------------------------------------
Outcome marstrand() {
  const Measure C = cantor_measure(1.0 / 3);
  MarstrandConfig cfg;
  cfg.frames = 30;
  cfg.target = std::min(1.0, 2 * std::log(2.0) / std::log(3.0));
  cfg.tolerance = 0.1;
  const auto s = marstrand_sample(Measure::product({C, C}), cfg);
  int within = 0;
  for (const auto& r : s.rows) within += std::abs(r.box.dimension - cfg.target) <= cfg.tolerance;
  const double frac = static_cast<double>(within) / static_cast<double>(s.rows.size());
  return {s.rows.size() == 30 && frac >= 0.9,
          fmt("%d/30 frames within 0.1 of %.4f (median %.4f, min %.4f)", within, cfg.target, s.median, s.min)};
}

// ---- 7 ----------------------------------------------------------------------------
Outcome lattice_set_checks() {
  LatticeSetParams p;  // s = 3/4, u = 1/2, eta = (8, 64, 4096)
  const auto sets = lattice_sets(p);
  const double u = boost::rational_cast<double>(p.u);
  std::string exps;
  bool all_close = true;
  for (const auto& st : sets.A.stages) {
    const bool close = std::abs(st.exponent - u) <= 0.15;
    all_close = all_close && close;
    exps += fmt("%s%.3f%s", exps.empty() ? "" : " ", st.exponent, close ? "" : "*");
  }
  bool contain = true;
  int exact = 0;
  std::int64_t checked = 0;
  for (int m = 1; m <= p.stages; ++m) {
    ContainmentReport rep;
    try {
      rep = verify_projection_containment(p, m);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::invalid_argument) throw;
      continue;  // stage not exactly representable
    }
    ++exact;
    contain = contain && rep.holds && rep.counterexamples == 0;
    checked += rep.checked;
  }
  // negative control: a wrong slope must be caught
  const auto bad = verify_projection_containment(p, p.stages, Rational(1, 16));
  const bool control = !bad.holds && bad.counterexamples > 0;
  double cmax = 0;
  for (const auto& st : sets.A.stages) cmax = std::max(cmax, st.constant);
  return {all_close && contain && exact > 0 && control,
          fmt("A exponents per stage %s (|e-u| <= 0.15; * marks misses), covering constants <= %.2f; containment "
              "at %d exact stage(s): %s over %lld checks; shifted slope caught: %s",
              exps.c_str(), cmax, exact, contain ? "holds" : "FAILS", static_cast<long long>(checked),
              control ? "yes" : "no")};
}

// ---- 8 ----------------------------------------------------------------------------
double atomic_mod2(const AtomicMeasure& a, std::span<const double> z) {
  double re = 0, im = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double dot = 0;
    for (int c = 0; c < a.dim; ++c) dot += a.point(i)[static_cast<std::size_t>(c)] * z[static_cast<std::size_t>(c)];
    re += a.weights[i] * std::cos(2 * kPi * dot);
    im -= a.weights[i] * std::sin(2 * kPi * dot);
  }
  return re * re + im * im;
}

AtomicMeasure random_atoms(std::mt19937_64& rng, int dim, int n) {
  std::uniform_real_distribution<double> U(0, 1);
  AtomicMeasure a;
  a.dim = dim;
  double total = 0;
  std::vector<double> w(static_cast<std::size_t>(n));
  for (auto& x : w) total += (x = 0.05 + U(rng));
  for (int i = 0; i < n; ++i) {
    std::vector<double> p(static_cast<std::size_t>(dim));
    for (auto& x : p) x = U(rng);
    a.add(p, w[static_cast<std::size_t>(i)] / total);
  }
  return a;
}

// midpoint sum of |ft|^(2/theta) |xi|^-1 over 2^j <= |xi| < 2^(j+1), 64 nodes per unit frequency
double oracle_1d(const AtomicMeasure& a, double theta, int j) {
  const double lo = std::ldexp(1.0, j);
  const int n = static_cast<int>(lo * 64);
  const double h = lo / n;
  double s = 0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (i + 0.5) * h;
    s += std::pow(atomic_mod2(a, std::span<const double>(&x, 1)), 1 / theta) / x;
  }
  return 2 * s * h;  // the shell has two symmetric halves
}

// planar version: midpoint grid over the square, restricted to the annulus
double oracle_2d(const AtomicMeasure& a, double theta, int j) {
  const double lo = std::ldexp(1.0, j), hi = 2 * lo;
  const int n = std::max(400, static_cast<int>(2 * hi * 24));
  const double h = 2 * hi / n;
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double z[2] = {-hi + (i + 0.5) * h, -hi + (k + 0.5) * h};
      const double r2 = z[0] * z[0] + z[1] * z[1];
      if (r2 >= lo * lo && r2 < hi * hi) s += std::pow(atomic_mod2(a, z), 1 / theta) / r2;
    }
  return s * h * h;
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(kDefaultSeed);
  int shells = 0, bad = 0;
  double worst = 0;
  for (int n : {1, 2, 3, 5, 8, 13, 20}) {
    const auto a = random_atoms(rng, 1, n);
    const Measure m = Measure::atomic(a);
    for (double theta : {1.0, 0.5})
      for (int j = 0; j <= 12; ++j) {
        const double want = oracle_1d(a, theta, j);
        const double got = shell_energy(m, theta, j).value;
        const double rel = std::abs(got - want) / want;
        worst = std::max(worst, rel);
        bad += rel > 0.01;
        ++shells;
      }
  }
  for (int n : {3, 20}) {
    const auto a = random_atoms(rng, 2, n);
    const Measure m = Measure::atomic(a);
    SamplingPlan plan;
    plan.max_points = std::size_t{1} << 24;
    for (int j = 0; j <= 4; ++j) {
      const double want = oracle_2d(a, 1.0, j);
      const double got = shell_energy(m, 1.0, j, plan).value;
      const double rel = std::abs(got - want) / want;
      worst = std::max(worst, rel);
      bad += rel > 0.01;
      ++shells;
    }
  }
  return {bad == 0, fmt("%d shells (d = 1 up to j = 12, d = 2 up to j = 4), %d above 1%%, worst %.3g%%", shells,
                        bad, 100 * worst)};
}

// ---- 9 ----------------------------------------------------------------------------
SetProfile salem(int d, double H) {
  SetProfile p;
  p.d = d;
  p.dim_H = H;
  p.dim_F = H;
  p.spectrum = SpectrumModel::constant(H);
  p.validate();
  return p;
}

Outcome bound_table() {
  struct Row {
    int d;
    double H;
    int k;
    double u;
    const char* method;
    double value;
  };
  // hand-computed: kaufman u; ren_wang 2u - H; mattila k(d-k-1) + u; peres_schlag k(d-k) + u - H
  const Row table[] = {
      {2, 0.8, 1, 0.8, "kaufman", 0.8},          {2, 0.8, 1, 0.5, "kaufman", 0.5},
      {2, 1.0, 1, 0.6, "ren_wang", 0.2},         {2, 1.3, 1, 1.0, "ren_wang", 0.7},
      {3, 1.5616, 2, 1.0, "mattila", 1.0},       {3, 0.9, 1, 0.5, "mattila", 1.5},
      {2, 0.8, 1, 0.3, "mattila", 0.3},          {3, 1.5616, 2, 0.5, "peres_schlag", 0.9384},
      {3, 1.5616, 1, 0.5, "peres_schlag", 0.9384}, {2, 1.3, 1, 0.9, "peres_schlag", 0.6},
  };
  int misses = 0;
  for (const auto& r : table) {
    const auto all = classical_bounds(salem(r.d, r.H), r.k, r.u);
    const auto& b = all.at(r.method);
    if (!b.valid || std::abs(b.value - r.value) > 1e-12) ++misses;
  }
  int range_bad = 0, mono_bad = 0, values = 0;
  for (const auto& [d, H] : std::vector<std::pair<int, double>>{{2, 0.8}, {2, 1.3}, {3, 1.5616}, {3, 2.5}}) {
    const SetProfile p = salem(d, H);
    for (int k = 1; k < d; ++k) {
      const auto bp = bound_profile(p, k, make_grid(0, k, 0.01));
      const double cap = k * (d - k);
      for (const auto& m : bp.methods) {
        double prev = -1;
        for (std::size_t i = 0; i < bp.u.size(); ++i) {
          ++values;
          range_bad += m.values[i] < 0 || m.values[i] > cap;
          if (!m.valid[i]) continue;
          mono_bad += m.values[i] < prev - 1e-12;
          prev = m.values[i];
        }
      }
    }
  }
  return {misses == 0 && range_bad == 0 && mono_bad == 0,
          fmt("%d/%zu table entries off; %d values: %d outside [0, k(d-k)], %d monotonicity breaks", misses,
              std::size(table), values, range_bad, mono_bad)};
}

// ---- 10 ---------------------------------------------------------------------------
struct Named {
  std::string name;
  Measure m;
};

std::vector<Named> corpus(const fs::path& data) {
  std::vector<Named> out;
  if (fs::is_directory(data))
    for (const auto& e : fs::directory_iterator(data)) {
      if (e.path().extension() != ".json") continue;
      std::ifstream f(e.path());
      std::stringstream ss;
      ss << f.rdbuf();
      try {
        out.push_back({e.path().filename().string(), Measure::from_json(ss.str())});
      } catch (const Error&) {
        // set profiles live in the same directory
      }
    }
  std::sort(out.begin(), out.end(), [](const Named& a, const Named& b) { return a.name < b.name; });
  const Measure C = cantor_measure(1.0 / 3);
  AtomicMeasure atoms;
  atoms.dim = 1;
  for (int i = 0; i < 5; ++i) atoms.add(std::vector<double>{0.2 * i}, 0.2);
  out.push_back({"cantor(1/4)", cantor_measure(0.25)});
  out.push_back({"atomic(5)", Measure::atomic(atoms)});
  out.push_back({"mixture", Measure::mixture({0.5, 0.5}, {C, lebesgue_unit_interval()})});
  out.push_back({"affine", Measure::affine(C, {2.0}, {-1.0})});
  out.push_back({"cantor x lebesgue", Measure::product({C, lebesgue_unit_interval()})});
  out.push_back({"projected square", project_measure(Measure::product({C, C}), sample_grassmannian(2, 1, 3))});
  return out;
}

Outcome property_suite(const fs::path& data) {
  const auto items = corpus(data);
  const std::vector<double> th = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::mt19937_64 rng(kDefaultSeed);
  std::normal_distribution<double> N(0, 1);
  int checks = 0;
  std::vector<std::string> failures;
  auto note = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  };
  for (const auto& [name, m] : items) {
    const int d = m.dim();
    // transform invariants at random frequencies up to |z| ~ 2^12
    for (int t = 0; t < 100; ++t) {
      std::vector<double> z(static_cast<std::size_t>(d)), mz(z.size());
      const double scale = std::ldexp(1.0, static_cast<int>(rng() % 13));
      for (std::size_t c = 0; c < z.size(); ++c) mz[c] = -(z[c] = scale * N(rng));
      const Complex f = m.ft(z), g = m.ft(mz);
      note(std::abs(f) <= m.mass() + 1e-9, name + ": |ft| > mass");
      note(std::abs(g - std::conj(f)) <= 1e-9, name + ": conjugate symmetry");
      note(std::abs(m.ft(std::vector<double>(z.size(), 0.0)) - m.mass()) <= 1e-12, name + ": ft(0) != mass");
      note(std::abs(Measure::conv_power(m, 2).ft(z) - f * f) <= 1e-9, name + ": convolution law");
      if (d == 1) {
        const Measure C = cantor_measure(1.0 / 3);
        const double w = scale * N(rng);
        const double zw[2] = {z[0], w};
        note(std::abs(Measure::product({m, C}).ft(zw) - f * C.ft(std::span<const double>(&w, 1))) <= 1e-9,
             name + ": product law");
      }
    }
    // spectrum: monotone in theta, and spectrum(theta) <= spectrum(0) + d theta
    const auto est = estimate_spectra(m, th, 2, d == 1 ? 16 : 12);
    for (std::size_t i = 1; i < th.size(); ++i) {
      const double tol = 0.02 + 3 * combined(est[i].stderr_, est[i - 1].stderr_);
      note(est[i].s_hat >= est[i - 1].s_hat - tol, name + fmt(": spectrum drops at theta %.2f", th[i]));
      const double tol0 = 0.02 + 3 * combined(est[i].stderr_, est[0].stderr_);
      note(est[i].s_hat <= est[0].s_hat + d * th[i] + tol0, name + fmt(": above spectrum(0) + d theta at %.2f", th[i]));
    }
  }
  std::string detail = fmt("%zu measures, %d checks, %zu failed", items.size(), checks, failures.size());
  for (std::size_t i = 0; i < std::min<std::size_t>(3, failures.size()); ++i) detail += "; " + failures[i];
  return {failures.empty() && items.size() >= 10, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path data = argc > 1 ? fs::path(argv[1]) : fs::path("data");
  run(1, closed_forms);
  run(2, curve_data);
  run(3, calibration);
  run(4, convolution_identity);
  run(5, projection_inequality);
  run(6, marstrand);
  run(7, lattice_set_checks);
  run(8, oracle_equivalence);
  run(9, bound_table);
  run(10, [&] { return property_suite(data); });
  std::printf("%d of 10 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
