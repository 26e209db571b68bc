/* C interface to the fspec library. All functions are thread-safe; error
 * messages are kept per thread. Strings returned through char** out
 * parameters are owned by the caller and must be released with
 * fspec_string_free. */
#ifndef FSPEC_FSPEC_H
#define FSPEC_FSPEC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FSPEC_API __declspec(dllexport)
#else
#define FSPEC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fspec_status {
  FSPEC_OK = 0,
  FSPEC_E_INVALID_ARGUMENT = 1,
  FSPEC_E_PARSE = 2,
  FSPEC_E_DIMENSION_MISMATCH = 3,
  FSPEC_E_TRUNCATION = 4,
  FSPEC_E_BUDGET = 5,
  FSPEC_E_DEGENERATE = 6,
  FSPEC_E_NUMERICAL = 7,
  FSPEC_E_INTERNAL = 8
} fspec_status;

typedef enum fspec_format { FSPEC_CSV = 0, FSPEC_JSON = 1 } fspec_format;

typedef enum fspec_ps_variant { FSPEC_PS_FULL = 0, FSPEC_PS_RANK = 1 } fspec_ps_variant;

typedef struct fspec_measure fspec_measure;
typedef struct fspec_profile fspec_profile;

FSPEC_API const char* fspec_version(void);
/* Message of the last failing call on this thread ("" if none). */
FSPEC_API const char* fspec_last_error(void);
FSPEC_API const char* fspec_status_name(fspec_status status);
FSPEC_API void fspec_string_free(char* s);

/* Exact value of "p/q" or a decimal, rounded once to double. */
FSPEC_API fspec_status fspec_parse_real(const char* text, double* out);

/* ---- measures ---- */
FSPEC_API fspec_status fspec_measure_from_json(const char* json, fspec_measure** out);
FSPEC_API fspec_status fspec_measure_to_json(const fspec_measure* m, char** out);
FSPEC_API void fspec_measure_free(fspec_measure* m);
FSPEC_API int fspec_measure_dim(const fspec_measure* m);
FSPEC_API fspec_status fspec_measure_ft(const fspec_measure* m, const double* z, double tail_tol, double* re,
                                        double* im);
/* Push-forward onto the span of k orthonormal rows (basis is k*d, row-major). */
FSPEC_API fspec_status fspec_measure_project(const fspec_measure* m, int k, const double* basis,
                                             fspec_measure** out);
/* Same with a Haar-random k-plane from the seed; basis_out (k*d) may be NULL. */
FSPEC_API fspec_status fspec_measure_project_random(const fspec_measure* m, int k, uint64_t seed,
                                                    fspec_measure** out, double* basis_out);

/* ---- spectrum estimation ---- */
typedef struct fspec_spectrum_options {
  uint64_t seed;
  int j_lo, j_hi;
  unsigned threads;      /* 0: all cores */
  uint64_t max_points;   /* per shell, 0: default */
} fspec_spectrum_options;

FSPEC_API void fspec_spectrum_options_default(fspec_spectrum_options* opt);

/* quality: 0 ok, 1 noisy, 2 truncated. Output arrays hold n entries. */
FSPEC_API fspec_status fspec_spectrum_estimate(const fspec_measure* m, const double* thetas, size_t n,
                                               const fspec_spectrum_options* opt, double* s_hat, double* stderr_out,
                                               int* quality);
FSPEC_API fspec_status fspec_spectrum_report(const fspec_measure* m, const double* thetas, size_t n,
                                             const fspec_spectrum_options* opt, fspec_format fmt, char** out);
/* Spectrum at 1/n from the Sobolev dimension of the n-fold convolution. */
FSPEC_API fspec_status fspec_spectrum_via_convolution(const fspec_measure* m, int n,
                                                      const fspec_spectrum_options* opt, double* value,
                                                      double* stderr_out);

/* ---- profiles and bounds ---- */
FSPEC_API fspec_status fspec_profile_from_json(const char* json, fspec_profile** out);
FSPEC_API fspec_status fspec_profile_to_json(const fspec_profile* p, char** out);
FSPEC_API void fspec_profile_free(fspec_profile* p);

/* Product of three Cantor measures; parameters in (0, 1/3]. */
FSPEC_API fspec_status fspec_example_profile(double alpha, double beta, double gamma, fspec_profile** out);
FSPEC_API fspec_status fspec_example_report(double alpha, double beta, double gamma, char** json_out);

/* Classical bound by name (kaufman, kaufman_general, bourgain_oberlin,
 * ren_wang, mattila, peres_schlag, he, trivial); valid reports whether its
 * hypotheses hold. */
FSPEC_API fspec_status fspec_classical_bound(const fspec_profile* p, const char* name, int k, double u,
                                             fspec_ps_variant ps, double* value, int* valid);
FSPEC_API fspec_status fspec_best_spectrum_bound(const fspec_profile* p, int k, double u, double* value,
                                                 double* argmin_theta);
FSPEC_API fspec_status fspec_emptiness_threshold(const fspec_profile* p, int k, double* value);
/* All methods over a u-grid. */
FSPEC_API fspec_status fspec_bounds_report(const fspec_profile* p, int k, const double* u, size_t n,
                                           fspec_ps_variant ps, fspec_format fmt, char** out);
/* baselines: comma separated subset of ren_wang, mattila, peres_schlag. */
FSPEC_API fspec_status fspec_regions_report(const fspec_profile* p, int k, const char* baselines,
                                            const double* thetas, size_t n_theta, const double* u, size_t n_u,
                                            fspec_format fmt, char** out);

/* ---- constructions ---- */
FSPEC_API fspec_status fspec_curves_report(double alpha, double beta, double gamma, fspec_ps_variant ps,
                                            int n_points, fspec_format fmt, char** out);
/* s and u as exact strings ("3/4", "0.5"); eta has `stages` entries. */
FSPEC_API fspec_status fspec_lattice_report(const char* s, const char* u, const int64_t* eta, int stages,
                                            fspec_format fmt, char** out);
FSPEC_API fspec_status fspec_lattice_containment(const char* s, const char* u, const int64_t* eta, int stages,
                                                 int m, const char* slope_shift, int* holds,
                                                 int64_t* counterexamples);

typedef struct fspec_marstrand_options {
  int k, frames, level, j_min, j_max;
  uint64_t seed;
  double target, tolerance;
} fspec_marstrand_options;

FSPEC_API void fspec_marstrand_options_default(fspec_marstrand_options* opt);
FSPEC_API fspec_status fspec_marstrand_report(const fspec_measure* m, const fspec_marstrand_options* opt,
                                              fspec_format fmt, char** out, double* fraction_within);

/* ---- plotting ---- */
/* SVG chart rendered from any CSV report above. */
FSPEC_API fspec_status fspec_svg_from_csv(const char* csv, char** out);

#ifdef __cplusplus
}
#endif

#endif
