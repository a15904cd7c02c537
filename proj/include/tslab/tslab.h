#ifndef TSLAB_H
#define TSLAB_H

/* C interface to the periodic-slab scattering library.
 *
 * Every function returns a tslab_status. On failure the message is available
 * from tslab_last_error() on the calling thread until the next call on that
 * thread. Strings handed out through char** parameters are owned by the
 * caller and released with tslab_string_free. */

#include <stddef.h>

#if defined(_WIN32)
#define TSLAB_API __declspec(dllexport)
#else
#define TSLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tslab_status {
  TSLAB_OK = 0,
  TSLAB_ERR_INVALID_SPEC = 1,
  TSLAB_ERR_DOMAIN = 2,
  TSLAB_ERR_SINGULARITY = 3,
  TSLAB_ERR_ACCURACY = 4,
  TSLAB_ERR_SCALE_EXCEEDED = 5,
  TSLAB_ERR_NUMERIC_DEGENERACY = 6,
  TSLAB_ERR_CLASSIFICATION = 7,
  TSLAB_ERR_NEAR_EDGE = 8,
  TSLAB_ERR_EDGE_SINGULARITY = 9,
  TSLAB_ERR_REFINEMENT = 10,
  TSLAB_ERR_CONFIGURATION = 11,
  TSLAB_ERR_STABILITY = 12,
  TSLAB_ERR_DOMAIN_SIZE = 13,
  TSLAB_ERR_INVALID_ARGUMENT = 20,
  TSLAB_ERR_IO = 21,
  TSLAB_ERR_INTERNAL = 22
} tslab_status;

typedef enum tslab_format { TSLAB_FORMAT_CSV = 0, TSLAB_FORMAT_JSON = 1 } tslab_format;

typedef enum tslab_regime { TSLAB_REGIME_BAND = 0, TSLAB_REGIME_GAP = 1, TSLAB_REGIME_EDGE = 2 } tslab_regime;

typedef struct tslab_spec tslab_spec;
typedef struct tslab_settings tslab_settings;

TSLAB_API const char* tslab_version(void);
TSLAB_API const char* tslab_last_error(void);
TSLAB_API const char* tslab_status_name(tslab_status status);
TSLAB_API void tslab_string_free(char* s);

/* Potentials */
TSLAB_API tslab_status tslab_spec_from_json(const char* json, tslab_spec** out);
TSLAB_API tslab_status tslab_spec_single_comb(double amplitude, double period, tslab_spec** out);
TSLAB_API tslab_status tslab_spec_alternating_comb(double amplitude, double half_period, tslab_spec** out);
TSLAB_API tslab_status tslab_spec_free_medium(double period, tslab_spec** out);
TSLAB_API tslab_status tslab_spec_with_amplitude(const tslab_spec* spec, double amplitude, tslab_spec** out);
TSLAB_API tslab_status tslab_spec_to_json(const tslab_spec* spec, char** out);
TSLAB_API tslab_status tslab_spec_period(const tslab_spec* spec, double* out);
TSLAB_API void tslab_spec_destroy(tslab_spec* spec);

/* Settings: namespaced overrides such as "transfer.rtol" or "verify.chebyshev". */
TSLAB_API tslab_status tslab_settings_create(tslab_settings** out);
TSLAB_API tslab_status tslab_settings_set(tslab_settings* s, const char* key, const char* value);
/* "key=value" */
TSLAB_API tslab_status tslab_settings_assign(tslab_settings* s, const char* assignment);
TSLAB_API tslab_status tslab_settings_get(const tslab_settings* s, const char* key, char** out);
/* newline-separated key list */
TSLAB_API tslab_status tslab_settings_keys(char** out);
TSLAB_API void tslab_settings_destroy(tslab_settings* s);

/* Point evaluations. settings may be NULL for defaults. Complex frequencies
 * are passed as (re, im) with im >= 0. */

/* out = {re a, im a, re b, im b, re c, im c, re d, im d} for M = [[a, b], [c, d]] */
TSLAB_API tslab_status tslab_monodromy(const tslab_spec* spec, const tslab_settings* s, double re, double im,
                                       double out[8]);

typedef struct tslab_dispersion {
  double F_re, F_im;
  double k_re, k_im;
  double mu_re, mu_im;
  tslab_regime regime;
} tslab_dispersion;

TSLAB_API tslab_status tslab_bloch(const tslab_spec* spec, const tslab_settings* s, double re, double im,
                                   tslab_dispersion* out);

TSLAB_API tslab_status tslab_group_velocity(const tslab_spec* spec, const tslab_settings* s, double omega,
                                            double* out);

typedef struct tslab_scatter_point {
  double r_re, r_im;
  double t_re, t_im;
  double conservation_defect; /* NaN for complex frequencies */
  double t_sq_from_norm;
} tslab_scatter_point;

TSLAB_API tslab_status tslab_scatter(const tslab_spec* spec, const tslab_settings* s, double re, double im,
                                     int periods, tslab_scatter_point* out);

/* r_N from the Bloch phase, out = {re, im} */
TSLAB_API tslab_status tslab_reflection_formula(const tslab_spec* spec, const tslab_settings* s, double re,
                                                double im, int periods, double out[2]);

TSLAB_API tslab_status tslab_transmittance_formula(const tslab_spec* spec, const tslab_settings* s, double omega,
                                                   int periods, double* out);

typedef struct tslab_semi_point {
  double r_re, r_im;
  double r_weyl_re, r_weyl_im;
  double m_plus_re, m_plus_im;
} tslab_semi_point;

TSLAB_API tslab_status tslab_semi_infinite(const tslab_spec* spec, const tslab_settings* s, double re, double im,
                                           tslab_semi_point* out);

/* Tables, rendered as CSV or JSON text. */

/* under_resolved receives the number of intervals narrower than the scan can
 * resolve, warnings a newline-separated list (either may be NULL). */
TSLAB_API tslab_status tslab_bands_table(const tslab_spec* spec, const tslab_settings* s, double omega_min,
                                         double omega_max, tslab_format format, char** out, int* under_resolved,
                                         char** warnings);

TSLAB_API tslab_status tslab_dispersion_table(const tslab_spec* spec, const tslab_settings* s, double omega_min,
                                              double omega_max, int steps, double omega_imag, tslab_format format,
                                              char** out);

/* One row per (omega, N); rows that fail carry their message in the error column. */
TSLAB_API tslab_status tslab_scatter_table(const tslab_spec* spec, const tslab_settings* s, double omega_min,
                                           double omega_max, int steps, const int* periods, size_t n_periods,
                                           double omega_imag, tslab_format format, char** out);

TSLAB_API tslab_status tslab_transparency_table(const tslab_spec* spec, const tslab_settings* s, double omega_min,
                                                double omega_max, const int* periods, size_t n_periods,
                                                tslab_format format, char** out);

TSLAB_API tslab_status tslab_semi_table(const tslab_spec* spec, const tslab_settings* s, double omega_min,
                                        double omega_max, int steps, double omega_imag, tslab_format format,
                                        char** out);

/* Time-domain run of a pulse against the comb `spec` (pulse.* settings).
 * snapshot_path may be NULL. */
TSLAB_API tslab_status tslab_pulse(const tslab_spec* spec, const tslab_settings* s, tslab_format series_format,
                                   const char* snapshot_path, char** series, char** summary_json);

/* Acceptance suite. only/n_only select criteria by id (NULL/0 for all). The
 * callback, if given, receives one formatted line per finished criterion. */
typedef void (*tslab_progress_fn)(const char* line, int passed, void* user);

TSLAB_API tslab_status tslab_verify(const tslab_settings* s, unsigned long long seed, const int* only, size_t n_only,
                                    tslab_progress_fn progress, void* user, char** report_json, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
