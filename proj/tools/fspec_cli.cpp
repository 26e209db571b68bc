// Command-line front end. Talks to the library only through fspec.h.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fspec/fspec.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Failure : std::runtime_error {
  int code;
  Failure(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

int exit_code_for(fspec_status s) {
  switch (s) {
    case FSPEC_OK: return 0;
    case FSPEC_E_INVALID_ARGUMENT:
    case FSPEC_E_PARSE:
    case FSPEC_E_DIMENSION_MISMATCH: return kExitUsage;
    default: return kExitNumerical;
  }
}

void check(fspec_status s) {
  if (s != FSPEC_OK) throw Failure(exit_code_for(s), std::string(fspec_status_name(s)) + ": " + fspec_last_error());
}

// Owned C string from the library.
struct CStr {
  char* p = nullptr;
  ~CStr() { fspec_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct MeasureHandle {
  fspec_measure* p = nullptr;
  ~MeasureHandle() { fspec_measure_free(p); }
};

struct ProfileHandle {
  fspec_profile* p = nullptr;
  ~ProfileHandle() { fspec_profile_free(p); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(kExitUsage, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure(kExitUsage, "cannot write '" + path + "'");
  out << text;
}

double real(const std::string& s) {
  double v = 0;
  check(fspec_parse_real(s.c_str(), &v));
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// "a,b,c" or "lo:step:hi"; fractions allowed.
std::vector<double> grid(const std::string& spec, const char* what) {
  std::vector<double> g;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw Failure(kExitUsage, std::string(what) + ": range must be lo:step:hi");
    const double lo = real(parts[0]), step = real(parts[1]), hi = real(parts[2]);
    if (!(step > 0) || hi < lo) throw Failure(kExitUsage, std::string(what) + ": need step > 0 and hi >= lo");
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 0.5));
    for (long long i = 0; i <= n; ++i) g.push_back(std::min(hi, lo + static_cast<double>(i) * step));
  } else {
    for (const auto& p : split(spec, ','))
      if (!p.empty()) g.push_back(real(p));
  }
  if (g.empty()) throw Failure(kExitUsage, std::string(what) + " grid is empty");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) throw Failure(kExitUsage, std::string(what) + " grid must be strictly increasing");
  return g;
}

std::pair<int, int> int_range(const std::string& spec, const char* what) {
  const auto parts = split(spec, ':');
  try {
    if (parts.size() == 2) {
      const int a = std::stoi(parts[0]), b = std::stoi(parts[1]);
      if (a <= b) return {a, b};
    }
  } catch (const std::exception&) {
  }
  throw Failure(kExitUsage, std::string(what) + " must be lo:hi with lo <= hi");
}

struct Common {
  std::string seed = "0x5EED";
  std::string out;
  std::string format = "csv";
  std::string svg;
  std::string ps_variant = "full";

  std::uint64_t seed_value() const {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(seed, &used, 0);
      if (used == seed.size()) return v;
    } catch (const std::exception&) {
    }
    throw Failure(kExitUsage, "--seed must be an unsigned integer (decimal or 0x hex)");
  }
  fspec_ps_variant ps() const {
    if (ps_variant == "full" || ps_variant == "text") return FSPEC_PS_FULL;
    if (ps_variant == "rank" || ps_variant == "figure") return FSPEC_PS_RANK;
    throw Failure(kExitUsage, "--ps-variant must be full or rank");
  }
  // Format requested from the library: SVG is drawn from CSV.
  fspec_format data_format() const { return format == "json" ? FSPEC_JSON : FSPEC_CSV; }

  void emit(const std::string& data) const {
    std::string text = data;
    if (format == "svg") text = svg_of(data);
    if (out.empty()) std::cout << text;
    else write_file(out, text);
    if (!svg.empty()) {
      if (format == "json") throw Failure(kExitUsage, "--svg needs CSV data (drop --format json)");
      write_file(svg, svg_of(data));
    }
  }
  static std::string svg_of(const std::string& csv) {
    CStr s;
    check(fspec_svg_from_csv(csv.c_str(), &s.p));
    return s.str();
  }
};

void add_common(CLI::App* cmd, Common& c, bool svg_capable = true) {
  cmd->add_option("--seed", c.seed, "RNG seed (decimal or 0x hex)")->capture_default_str();
  cmd->add_option("--out", c.out, "output file (default: stdout)");
  auto* f = cmd->add_option("--format", c.format, "csv, json or svg")->capture_default_str();
  if (svg_capable) {
    f->check(CLI::IsMember({"csv", "json", "svg"}));
    cmd->add_option("--svg", c.svg, "also write an SVG chart drawn from the CSV");
  } else {
    f->check(CLI::IsMember({"csv", "json"}));
  }
}

MeasureHandle load_measure(const std::string& path) {
  MeasureHandle m;
  check(fspec_measure_from_json(read_file(path).c_str(), &m.p));
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier spectrum estimates and exceptional-set projection bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fspec_version()));

  // spectrum
  Common sp_c;
  std::string sp_measure, sp_theta = "1", sp_j = "0:20";
  unsigned sp_threads = 0;
  std::uint64_t sp_max_points = 0;
  auto* sp = app.add_subcommand("spectrum", "estimate the Fourier spectrum of a measure over a theta grid");
  sp->add_option("--measure", sp_measure, "measure description (JSON file)")->required();
  sp->add_option("--theta", sp_theta, "theta grid: list a,b,c or lo:step:hi")->capture_default_str();
  sp->add_option("--j-range", sp_j, "dyadic shells lo:hi")->capture_default_str();
  sp->add_option("--threads", sp_threads, "worker threads (0: all cores)");
  sp->add_option("--max-points", sp_max_points, "sample budget per shell (0: default)");
  add_common(sp, sp_c);

  // bounds
  Common bd_c;
  std::string bd_profile, bd_u;
  int bd_k = 1;
  auto* bd = app.add_subcommand("bounds", "exceptional-set bounds of every method over a u grid");
  bd->add_option("--profile", bd_profile, "set profile (JSON file); default: the three-Cantor example");
  bd->add_option("--k", bd_k, "projection rank")->capture_default_str();
  bd->add_option("--u", bd_u, "u grid (default 0:1/100:k)");
  bd->add_option("--ps-variant", bd_c.ps_variant, "full (k(d-k) + u - dim_H) or rank (k + u - dim_H)")->capture_default_str();
  add_common(bd, bd_c);

  // curves
  Common f3_c;
  std::string f3_a = "1/3", f3_b = "1/4", f3_g = "1/5";
  int f3_n = 201;
  auto* f3 = app.add_subcommand("curves", "exceptional-set curves of the three-Cantor example (k = 1 and k = 2)");
  f3->alias("figure3");
  f3->add_option("--alpha", f3_a)->capture_default_str();
  f3->add_option("--beta", f3_b)->capture_default_str();
  f3->add_option("--gamma", f3_g)->capture_default_str();
  f3->add_option("--points", f3_n, "u values per panel")->capture_default_str();
  f3->add_option("--ps-variant", f3_c.ps_variant, "full (k(d-k) + u - dim_H) or rank (k + u - dim_H)")->capture_default_str();
  add_common(f3, f3_c);

  // regions
  Common rg_c;
  std::string rg_profile, rg_baseline = "peres_schlag", rg_theta = "1/100:1/100:1", rg_u;
  int rg_k = 1;
  auto* rg = app.add_subcommand("regions", "theta-u regions where the spectrum bound beats a baseline");
  rg->add_option("--profile", rg_profile, "set profile (JSON file)")->required();
  rg->add_option("--k", rg_k)->capture_default_str();
  rg->add_option("--baseline", rg_baseline, "comma list of ren_wang, mattila, peres_schlag")->capture_default_str();
  rg->add_option("--theta", rg_theta)->capture_default_str();
  rg->add_option("--u", rg_u, "u grid (default 0:1/100:k)");
  add_common(rg, rg_c);

  // lattice
  Common lm_c;
  std::string lm_s = "3/4", lm_u = "1/2", lm_eta = "8,64,4096";
  int lm_stages = 3;
  auto* lm = app.add_subcommand("lattice", "grid approximations of the lattice-neighbourhood sets A, B, C and exact containment checks");
  lm->alias("lemma31");
  lm->add_option("--s", lm_s)->capture_default_str();
  lm->add_option("--u", lm_u)->capture_default_str();
  lm->add_option("--eta", lm_eta, "comma list of integer scales")->capture_default_str();
  lm->add_option("--stages", lm_stages)->capture_default_str();
  add_common(lm, lm_c);

  // example
  Common ex_c;
  std::string ex_a = "1/3", ex_b = "1/4", ex_g = "1/5", ex_emit;
  auto* ex = app.add_subcommand("example", "closed-form dimensions and profile of the three-Cantor example");
  ex->add_option("--alpha", ex_a)->capture_default_str();
  ex->add_option("--beta", ex_b)->capture_default_str();
  ex->add_option("--gamma", ex_g)->capture_default_str();
  ex->add_option("--emit", ex_emit, "write the set profile JSON here");
  ex->add_option("--out", ex_c.out, "summary JSON file (default: stdout)");

  // marstrand
  Common ms_c;
  std::string ms_measure, ms_j = "2:12", ms_target = "1", ms_tol = "0.1";
  int ms_k = 1, ms_frames = 30, ms_level = 9;
  auto* ms = app.add_subcommand("marstrand", "projected box dimension over random frames");
  ms->add_option("--measure", ms_measure, "measure description (JSON file)")->required();
  ms->add_option("--k", ms_k)->capture_default_str();
  ms->add_option("--frames", ms_frames)->capture_default_str();
  ms->add_option("--level", ms_level, "discretisation level")->capture_default_str();
  ms->add_option("--j-range", ms_j, "box-counting scales lo:hi")->capture_default_str();
  ms->add_option("--target", ms_target, "expected dimension")->capture_default_str();
  ms->add_option("--tolerance", ms_tol)->capture_default_str();
  add_common(ms, ms_c);

  // project
  Common pj_c;
  std::string pj_measure, pj_basis, pj_ft;
  int pj_k = 1;
  auto* pj = app.add_subcommand("project", "push a measure forward onto a k-plane");
  pj->add_option("--measure", pj_measure, "measure description (JSON file)")->required();
  pj->add_option("--k", pj_k)->capture_default_str();
  pj->add_option("--basis", pj_basis, "orthonormal rows 'a,b;c,d' (default: random from --seed)");
  pj->add_option("--ft", pj_ft, "also print the transform at these frame coordinates 'y1,y2;...'");
  pj->add_option("--seed", pj_c.seed)->capture_default_str();
  pj->add_option("--out", pj_c.out, "projected measure JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sp) {
      MeasureHandle m = load_measure(sp_measure);
      const auto thetas = grid(sp_theta, "theta");
      fspec_spectrum_options opt;
      fspec_spectrum_options_default(&opt);
      opt.seed = sp_c.seed_value();
      std::tie(opt.j_lo, opt.j_hi) = int_range(sp_j, "--j-range");
      opt.threads = sp_threads;
      opt.max_points = sp_max_points;
      CStr s;
      check(fspec_spectrum_report(m.p, thetas.data(), thetas.size(), &opt, sp_c.data_format(), &s.p));
      sp_c.emit(s.str());
    } else if (*bd) {
      ProfileHandle p;
      if (bd_profile.empty()) check(fspec_example_profile(1.0 / 3, 1.0 / 4, 1.0 / 5, &p.p));
      else check(fspec_profile_from_json(read_file(bd_profile).c_str(), &p.p));
      const auto u = grid(bd_u.empty() ? "0:1/100:" + std::to_string(bd_k) : bd_u, "u");
      CStr s;
      check(fspec_bounds_report(p.p, bd_k, u.data(), u.size(), bd_c.ps(), bd_c.data_format(), &s.p));
      bd_c.emit(s.str());
    } else if (*f3) {
      CStr s;
      check(fspec_curves_report(real(f3_a), real(f3_b), real(f3_g), f3_c.ps(), f3_n, f3_c.data_format(), &s.p));
      f3_c.emit(s.str());
    } else if (*rg) {
      ProfileHandle p;
      check(fspec_profile_from_json(read_file(rg_profile).c_str(), &p.p));
      const auto th = grid(rg_theta, "theta");
      const auto u = grid(rg_u.empty() ? "0:1/100:" + std::to_string(rg_k) : rg_u, "u");
      CStr s;
      check(fspec_regions_report(p.p, rg_k, rg_baseline.c_str(), th.data(), th.size(), u.data(), u.size(),
                                 rg_c.data_format(), &s.p));
      rg_c.emit(s.str());
    } else if (*lm) {
      std::vector<std::int64_t> eta;
      try {
        for (const auto& e : split(lm_eta, ','))
          if (!e.empty()) eta.push_back(std::stoll(e));
      } catch (const std::exception&) {
        throw Failure(kExitUsage, "--eta must be a comma list of integers");
      }
      if (static_cast<int>(eta.size()) < lm_stages) throw Failure(kExitUsage, "--eta needs one scale per stage");
      CStr s;
      check(fspec_lattice_report(lm_s.c_str(), lm_u.c_str(), eta.data(), lm_stages, lm_c.data_format(), &s.p));
      lm_c.emit(s.str());
    } else if (*ex) {
      const double a = real(ex_a), b = real(ex_b), g = real(ex_g);
      CStr s;
      check(fspec_example_report(a, b, g, &s.p));
      if (!ex_emit.empty()) {
        ProfileHandle p;
        check(fspec_example_profile(a, b, g, &p.p));
        CStr pj;
        check(fspec_profile_to_json(p.p, &pj.p));
        write_file(ex_emit, pj.str());
      }
      if (ex_c.out.empty()) std::cout << s.str();
      else write_file(ex_c.out, s.str());
    } else if (*ms) {
      MeasureHandle m = load_measure(ms_measure);
      fspec_marstrand_options opt;
      fspec_marstrand_options_default(&opt);
      opt.k = ms_k;
      opt.frames = ms_frames;
      opt.level = ms_level;
      std::tie(opt.j_min, opt.j_max) = int_range(ms_j, "--j-range");
      opt.seed = ms_c.seed_value();
      opt.target = real(ms_target);
      opt.tolerance = real(ms_tol);
      CStr s;
      double frac = 0;
      check(fspec_marstrand_report(m.p, &opt, ms_c.data_format(), &s.p, &frac));
      ms_c.emit(s.str());
      std::cerr << "fraction within tolerance: " << frac << "\n";
    } else if (*pj) {
      MeasureHandle m = load_measure(pj_measure);
      const int d = fspec_measure_dim(m.p);
      MeasureHandle out;
      if (pj_basis.empty()) {
        check(fspec_measure_project_random(m.p, pj_k, pj_c.seed_value(), &out.p, nullptr));
      } else {
        std::vector<double> basis;
        const auto rows = split(pj_basis, ';');
        if (static_cast<int>(rows.size()) != pj_k) throw Failure(kExitUsage, "--basis needs k rows");
        for (const auto& r : rows) {
          const auto cells = split(r, ',');
          if (static_cast<int>(cells.size()) != d) throw Failure(kExitUsage, "--basis rows need d entries");
          for (const auto& c : cells) basis.push_back(real(c));
        }
        check(fspec_measure_project(m.p, pj_k, basis.data(), &out.p));
      }
      CStr s;
      check(fspec_measure_to_json(out.p, &s.p));
      if (pj_c.out.empty()) std::cout << s.str() << "\n";
      else write_file(pj_c.out, s.str() + "\n");
      if (!pj_ft.empty()) {
        for (const auto& pt : split(pj_ft, ';')) {
          std::vector<double> y;
          for (const auto& c : split(pt, ',')) y.push_back(real(c));
          if (static_cast<int>(y.size()) != pj_k) throw Failure(kExitUsage, "--ft points need k coordinates");
          double re = 0, im = 0;
          check(fspec_measure_ft(out.p, y.data(), 1e-10, &re, &im));
          std::printf("ft(%s) = %.17g %+.17gi\n", pt.c_str(), re, im);
        }
      }
    }
  } catch (const Failure& f) {
    std::cerr << "fspec: " << f.what() << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "fspec: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
