/* nodalchaos: chaos decomposition of nodal lengths of Gaussian random
 * fields on the 2-sphere and the flat 2-torus.
 *
 * C interface to the shared library. All functions return NCX_OK (0) on
 * success or a nonzero error code; ncx_last_error() describes the most
 * recent failure on the calling thread. Objects are opaque handles with
 * explicit destroy functions. Strings returned through char** are owned by
 * the caller and released with ncx_string_free().
 */
#ifndef NODALCHAOS_H
#define NODALCHAOS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define NCX_OK 0
#define NCX_ERR_INVALID_ARGUMENT 1
#define NCX_ERR_DOMAIN 2
#define NCX_ERR_PARSE 3
#define NCX_ERR_IO 4
#define NCX_ERR_CHECK_FAILED 5
#define NCX_ERR_INTERNAL 6

typedef struct ncx_spec ncx_spec;
typedef struct ncx_sample ncx_sample;

const char* ncx_version(void);
/* Thread-local message for the last failing call on this thread. */
const char* ncx_last_error(void);
void ncx_string_free(char* s);

/* ---- special functions and constants ---- */
int ncx_hermite(int q, double x, double* out);
int ncx_hermite_at_zero(int a, double* out);
int ncx_laguerre(int k, double alpha, double x, double* out);
int ncx_sphere_area(int n, double* out);
int ncx_beta_const(int n, int q, double* out);
int ncx_c_chi(int b, double* out);
int ncx_a_coeff(int n, int b, double* out);
int ncx_theta(int a, int b, double* out);
int ncx_c_dq(int d, int q, double* out);
/* E[H_a H_b H_a2 H_b2] with C12 = C34 = 0. */
int ncx_diagram4(int a, int b, int a2, int b2, double c13, double c14, double c23, double c24,
                 double* out);
/* Brute-force diagram enumeration; cov is a row-major 4x4 matrix with unit
 * diagonal. */
int ncx_wick_oracle(const int deg[4], const double cov[16], double* out);
int ncx_coefficient_bound(int q, double* sum, double* bound);
int ncx_level_factor(double t, int a, double* out);

/* ---- field specs ---- */
int ncx_spec_rsh(int ell, ncx_spec** out);
int ncx_spec_arw(int m, ncx_spec** out);
int ncx_spec_band_torus(const int* ms, size_t n_ms, int normalize, ncx_spec** out);
int ncx_spec_band_sphere(const int* ells, size_t n_ells, int normalize, ncx_spec** out);
int ncx_spec_anisotropic(const int* k1, const int* k2, const double* stds, size_t n,
                         ncx_spec** out);
int ncx_spec_from_json(const char* text, ncx_spec** out);
int ncx_spec_to_json(const ncx_spec* spec, char** out);
void ncx_spec_free(ncx_spec* spec);
int ncx_spec_n_modes(const ncx_spec* spec, size_t* out);
/* sigma, lambda, eps of the field (quadrature resolution, fiber size K). */
int ncx_spec_global_params(const ncx_spec* spec, int resolution, int K, double* sigma,
                           double* lambda, double* eps);

/* ---- sampling and per-sample statistics ---- */
int ncx_sample_create(const ncx_spec* spec, uint64_t seed, ncx_sample** out);
void ncx_sample_free(ncx_sample* sample);
/* Chart coordinates: torus (u, v) in [0,1)^2; sphere (colatitude, longitude). */
int ncx_sample_eval(const ncx_sample* sample, double u, double v, double* value, double grad[2]);
/* form: "general" | "lambda_form" | "inverse_form" | "tilde" | "closed2" |
 * "closed4". level applies to the general/lambda/inverse forms. */
int ncx_chaos_q(const ncx_sample* sample, int q, int resolution, int K, const char* form,
                double level, double* out);
int ncx_nodal_length(const ncx_sample* sample, int resolution, double level, double* length,
                     int* degenerate_vertices);

/* ---- variances ---- */
int ncx_var_exact(const ncx_spec* spec, int q, int resolution, int K, double* out);
int ncx_var_bound(const ncx_spec* spec, int q, int resolution, int K, double* out);
int ncx_var2_closed(const ncx_spec* spec, int resolution, double* out);
int ncx_var4_closed(const ncx_spec* spec, int resolution, double* out);
int ncx_jet_norm(const ncx_spec* spec, double xu, double xv, double yu, double yv, double* out);

/* ---- experiment runners ----
 * config_json follows the documented schema (schema_version 1; unknown keys
 * rejected). Artifacts are written under out_dir; a JSON summary is returned
 * through summary_json. Runners with built-in checks return the summary and
 * NCX_ERR_CHECK_FAILED when a check fails: verify (any invariant), constants
 * (oracle deviation above 1e-8), variance (bound domination). */
int ncx_run_constants(const char* config_json, const char* out_dir, char** summary_json);
int ncx_run_verify(const char* config_json, char** report_json);
int ncx_run_simulate(const char* config_json, const char* out_dir, char** summary_json);
int ncx_run_variance(const char* config_json, const char* out_dir, char** summary_json);
int ncx_run_berry(const char* config_json, const char* out_dir, char** summary_json);
int ncx_run_nodal(const char* config_json, const char* out_dir, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* NODALCHAOS_H */
