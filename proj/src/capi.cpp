#include "fspec/fspec.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "fspec/bounds.hpp"
#include "fspec/constructions.hpp"
#include "fspec/numparse.hpp"
#include "fspec/projection.hpp"
#include "fspec/report.hpp"
#include "fspec/spectrum.hpp"

struct fspec_measure {
  fspec::Measure m;
};

struct fspec_profile {
  fspec::SetProfile p;
};

namespace {

using namespace fspec;

thread_local std::string g_last_error;

fspec_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return FSPEC_E_INVALID_ARGUMENT;
    case ErrorCode::parse: return FSPEC_E_PARSE;
    case ErrorCode::dimension_mismatch: return FSPEC_E_DIMENSION_MISMATCH;
    case ErrorCode::truncation: return FSPEC_E_TRUNCATION;
    case ErrorCode::budget: return FSPEC_E_BUDGET;
    case ErrorCode::degenerate: return FSPEC_E_DEGENERATE;
    case ErrorCode::numerical: return FSPEC_E_NUMERICAL;
  }
  return FSPEC_E_INTERNAL;
}

template <class F>
fspec_status guard(F&& f) {
  g_last_error.clear();
  try {
    f();
    return FSPEC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FSPEC_E_BUDGET;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FSPEC_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FSPEC_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::invalid_argument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

SamplingPlan plan_from(const fspec_spectrum_options* opt) {
  SamplingPlan plan;
  plan.seed = opt->seed;
  plan.threads = opt->threads;
  plan.max_points = static_cast<std::size_t>(opt->max_points);
  return plan;
}

PsVariant ps_from(fspec_ps_variant v) {
  require(v == FSPEC_PS_FULL || v == FSPEC_PS_RANK, ErrorCode::invalid_argument, "unknown ps variant");
  return v == FSPEC_PS_FULL ? PsVariant::full : PsVariant::rank;
}

void check_format(fspec_format f) {
  require(f == FSPEC_CSV || f == FSPEC_JSON, ErrorCode::invalid_argument, "format must be csv or json");
}

LatticeSetParams lattice_params(const char* s, const char* u, const int64_t* eta, int stages) {
  need(s, "s");
  need(u, "u");
  need(eta, "eta");
  require(stages >= 1 && stages <= kMaxLatticeStages, ErrorCode::invalid_argument, "stages out of range");
  LatticeSetParams p;
  p.s = parse_rational(s);
  p.u = parse_rational(u);
  p.eta.assign(eta, eta + stages);
  p.stages = stages;
  return p;
}

std::vector<double> copy(const double* a, size_t n, const char* what) {
  require(n > 0, ErrorCode::invalid_argument, std::string(what) + " grid is empty");
  need(a, what);
  return std::vector<double>(a, a + n);
}

}  // namespace

extern "C" {

const char* fspec_version(void) { return "1.0.0"; }

const char* fspec_last_error(void) { return g_last_error.c_str(); }

const char* fspec_status_name(fspec_status s) {
  switch (s) {
    case FSPEC_OK: return "ok";
    case FSPEC_E_INVALID_ARGUMENT: return "invalid_argument";
    case FSPEC_E_PARSE: return "parse";
    case FSPEC_E_DIMENSION_MISMATCH: return "dimension_mismatch";
    case FSPEC_E_TRUNCATION: return "truncation";
    case FSPEC_E_BUDGET: return "budget";
    case FSPEC_E_DEGENERATE: return "degenerate";
    case FSPEC_E_NUMERICAL: return "numerical";
    case FSPEC_E_INTERNAL: return "internal";
  }
  return "unknown";
}

void fspec_string_free(char* s) { std::free(s); }

fspec_status fspec_parse_real(const char* text, double* out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = parse_real(text);
  });
}

// ---- measures ----

fspec_status fspec_measure_from_json(const char* text, fspec_measure** out) {
  return guard([&] {
    need(text, "json");
    need(out, "out");
    *out = nullptr;
    *out = new fspec_measure{Measure::from_json(text)};
  });
}

fspec_status fspec_measure_to_json(const fspec_measure* m, char** out) {
  return guard([&] {
    need(m, "measure");
    need(out, "out");
    *out = dup(m->m.to_json());
  });
}

void fspec_measure_free(fspec_measure* m) { delete m; }

int fspec_measure_dim(const fspec_measure* m) { return m ? m->m.dim() : 0; }

fspec_status fspec_measure_ft(const fspec_measure* m, const double* z, double tail_tol, double* re, double* im) {
  return guard([&] {
    need(m, "measure");
    need(z, "z");
    need(re, "re");
    need(im, "im");
    const Complex v = m->m.ft(std::span<const double>(z, static_cast<std::size_t>(m->m.dim())), tail_tol);
    *re = v.real();
    *im = v.imag();
  });
}

fspec_status fspec_measure_project(const fspec_measure* m, int k, const double* basis, fspec_measure** out) {
  return guard([&] {
    need(m, "measure");
    need(basis, "basis");
    need(out, "out");
    const int d = m->m.dim();
    require(k >= 1 && k < d, ErrorCode::dimension_mismatch, "need 1 <= k < d");
    std::vector<Point> rows;
    for (int i = 0; i < k; ++i) rows.emplace_back(basis + i * d, basis + (i + 1) * d);
    *out = new fspec_measure{project_measure(m->m, Frame(d, std::move(rows)))};
  });
}

fspec_status fspec_measure_project_random(const fspec_measure* m, int k, uint64_t seed, fspec_measure** out,
                                          double* basis_out) {
  return guard([&] {
    need(m, "measure");
    need(out, "out");
    const int d = m->m.dim();
    require(k >= 1 && k < d, ErrorCode::dimension_mismatch, "need 1 <= k < d");
    Frame f = sample_grassmannian(d, k, seed);
    if (basis_out)
      for (int i = 0; i < k; ++i)
        for (int c = 0; c < d; ++c) basis_out[i * d + c] = f.vector(i)[static_cast<std::size_t>(c)];
    *out = new fspec_measure{project_measure(m->m, f)};
  });
}

// ---- spectrum ----

void fspec_spectrum_options_default(fspec_spectrum_options* opt) {
  if (!opt) return;
  opt->seed = kDefaultSeed;
  opt->j_lo = 0;
  opt->j_hi = 20;
  opt->threads = 0;
  opt->max_points = 0;
}

fspec_status fspec_spectrum_estimate(const fspec_measure* m, const double* thetas, size_t n,
                                     const fspec_spectrum_options* opt, double* s_hat, double* stderr_out,
                                     int* quality) {
  return guard([&] {
    need(m, "measure");
    need(opt, "options");
    const auto est = estimate_spectra(m->m, copy(thetas, n, "theta"), opt->j_lo, opt->j_hi, plan_from(opt));
    for (std::size_t i = 0; i < est.size(); ++i) {
      if (s_hat) s_hat[i] = est[i].s_hat;
      if (stderr_out) stderr_out[i] = est[i].stderr_;
      if (quality) quality[i] = static_cast<int>(est[i].quality);
    }
  });
}

fspec_status fspec_spectrum_report(const fspec_measure* m, const double* thetas, size_t n,
                                   const fspec_spectrum_options* opt, fspec_format fmt, char** out) {
  return guard([&] {
    need(m, "measure");
    need(opt, "options");
    need(out, "out");
    check_format(fmt);
    const auto est = estimate_spectra(m->m, copy(thetas, n, "theta"), opt->j_lo, opt->j_hi, plan_from(opt));
    *out = dup(fmt == FSPEC_CSV ? report::spectrum_csv(est) : report::spectrum_json(est));
  });
}

fspec_status fspec_spectrum_via_convolution(const fspec_measure* m, int n, const fspec_spectrum_options* opt,
                                            double* value, double* stderr_out) {
  return guard([&] {
    need(m, "measure");
    need(opt, "options");
    const auto c = estimate_via_convolution(m->m, n, opt->j_lo, opt->j_hi, plan_from(opt));
    if (value) *value = c.value;
    if (stderr_out) *stderr_out = c.stderr_;
  });
}

// ---- profiles and bounds ----

fspec_status fspec_profile_from_json(const char* text, fspec_profile** out) {
  return guard([&] {
    need(text, "json");
    need(out, "out");
    *out = nullptr;
    *out = new fspec_profile{SetProfile::from_json(text)};
  });
}

fspec_status fspec_profile_to_json(const fspec_profile* p, char** out) {
  return guard([&] {
    need(p, "profile");
    need(out, "out");
    *out = dup(p->p.to_json());
  });
}

void fspec_profile_free(fspec_profile* p) { delete p; }

fspec_status fspec_example_profile(double alpha, double beta, double gamma, fspec_profile** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    *out = new fspec_profile{build_example(alpha, beta, gamma).profile};
  });
}

fspec_status fspec_example_report(double alpha, double beta, double gamma, char** out) {
  return guard([&] {
    need(out, "out");
    *out = dup(report::example_json(build_example(alpha, beta, gamma)));
  });
}

fspec_status fspec_classical_bound(const fspec_profile* p, const char* name, int k, double u, fspec_ps_variant ps,
                                   double* value, int* valid) {
  return guard([&] {
    need(p, "profile");
    need(name, "name");
    const auto all = classical_bounds(p->p, k, u, ps_from(ps));
    const auto it = all.find(name);
    require(it != all.end(), ErrorCode::invalid_argument, std::string("unknown bound '") + name + "'");
    if (value) *value = it->second.value;
    if (valid) *valid = it->second.valid ? 1 : 0;
  });
}

fspec_status fspec_best_spectrum_bound(const fspec_profile* p, int k, double u, double* value, double* argmin_theta) {
  return guard([&] {
    need(p, "profile");
    const BestBound b = best_spectrum_bound(p->p, k, u);
    if (value) *value = b.value;
    if (argmin_theta) *argmin_theta = b.argmin_theta;
  });
}

fspec_status fspec_emptiness_threshold(const fspec_profile* p, int k, double* value) {
  return guard([&] {
    need(p, "profile");
    need(value, "value");
    *value = emptiness_threshold(p->p, k).value;
  });
}

fspec_status fspec_bounds_report(const fspec_profile* p, int k, const double* u, size_t n, fspec_ps_variant ps,
                                 fspec_format fmt, char** out) {
  return guard([&] {
    need(p, "profile");
    need(out, "out");
    check_format(fmt);
    report::BoundsSummary b;
    const auto ug = copy(u, n, "u");
    b.profile = bound_profile(p->p, k, ug, ps_from(ps));
    for (double x : ug) b.best.push_back(best_spectrum_bound(p->p, k, x));
    b.emptiness = emptiness_threshold(p->p, k);
    *out = dup(fmt == FSPEC_CSV ? report::bounds_csv(b) : report::bounds_json(b));
  });
}

fspec_status fspec_regions_report(const fspec_profile* p, int k, const char* baselines, const double* thetas,
                                  size_t n_theta, const double* u, size_t n_u, fspec_format fmt, char** out) {
  return guard([&] {
    need(p, "profile");
    need(baselines, "baselines");
    need(out, "out");
    check_format(fmt);
    const auto tg = copy(thetas, n_theta, "theta");
    const auto ug = copy(u, n_u, "u");
    std::vector<ImprovementRegion> regions;
    std::stringstream ss(baselines);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) regions.push_back(improvement_region(p->p, k, parse_baseline(item), tg, ug));
    require(!regions.empty(), ErrorCode::invalid_argument, "no baseline given");
    std::vector<std::pair<double, double>> sp;
    for (double t : p->p.spectrum.grid(tg))
      if (p->p.spectrum.covers(t)) sp.emplace_back(t, p->p.spectrum.value(t));
    *out = dup(fmt == FSPEC_CSV ? report::regions_csv(regions, sp) : report::regions_json(regions, sp));
  });
}

// ---- constructions ----

fspec_status fspec_curves_report(double alpha, double beta, double gamma, fspec_ps_variant ps, int n_points,
                                  fspec_format fmt, char** out) {
  return guard([&] {
    need(out, "out");
    check_format(fmt);
    const CantorTriple ex = build_example(alpha, beta, gamma);
    const auto pts = exceptional_curves(ex, ps_from(ps), n_points);
    *out = dup(fmt == FSPEC_CSV ? report::curves_csv(pts) : report::curves_json(ex, pts));
  });
}

fspec_status fspec_lattice_report(const char* s, const char* u, const int64_t* eta, int stages, fspec_format fmt,
                                  char** out) {
  return guard([&] {
    need(out, "out");
    check_format(fmt);
    const LatticeSetParams p = lattice_params(s, u, eta, stages);
    const LatticeSets sets = lattice_sets(p);
    if (fmt == FSPEC_CSV) {
      *out = dup(report::lattice_csv(sets));
      return;
    }
    std::vector<ContainmentReport> cont;
    for (int m = 1; m <= stages; ++m) {
      try {
        cont.push_back(verify_projection_containment(p, m));
      } catch (const Error& e) {
        ContainmentReport r;
        r.m = m;
        r.checked = -1;
        r.first_counterexample = e.what();
        cont.push_back(r);
      }
    }
    *out = dup(report::lattice_json(sets, cont));
  });
}

fspec_status fspec_lattice_containment(const char* s, const char* u, const int64_t* eta, int stages, int m,
                                       const char* slope_shift, int* holds, int64_t* counterexamples) {
  return guard([&] {
    const LatticeSetParams p = lattice_params(s, u, eta, stages);
    const Rational shift = slope_shift ? parse_rational(slope_shift) : Rational(0);
    const ContainmentReport r = verify_projection_containment(p, m, shift);
    if (holds) *holds = r.holds ? 1 : 0;
    if (counterexamples) *counterexamples = r.counterexamples;
  });
}

void fspec_marstrand_options_default(fspec_marstrand_options* opt) {
  if (!opt) return;
  const MarstrandConfig c;
  opt->k = c.k;
  opt->frames = c.frames;
  opt->level = c.level;
  opt->j_min = c.j_min;
  opt->j_max = c.j_max;
  opt->seed = c.seed;
  opt->target = c.target;
  opt->tolerance = c.tolerance;
}

fspec_status fspec_marstrand_report(const fspec_measure* m, const fspec_marstrand_options* opt, fspec_format fmt,
                                    char** out, double* fraction_within) {
  return guard([&] {
    need(m, "measure");
    need(opt, "options");
    check_format(fmt);
    MarstrandConfig c;
    c.k = opt->k;
    c.frames = opt->frames;
    c.level = opt->level;
    c.j_min = opt->j_min;
    c.j_max = opt->j_max;
    c.seed = opt->seed;
    c.target = opt->target;
    c.tolerance = opt->tolerance;
    const MarstrandSummary s = marstrand_sample(m->m, c);
    if (fraction_within) *fraction_within = s.fraction_within;
    if (out) *out = dup(fmt == FSPEC_CSV ? report::marstrand_csv(s) : report::marstrand_json(s));
  });
}

fspec_status fspec_svg_from_csv(const char* csv, char** out) {
  return guard([&] {
    need(csv, "csv");
    need(out, "out");
    *out = dup(report::svg_from_csv(csv));
  });
}

}  // extern "C"
