/* photonkit C API: pulsed single-photon-source simulation, timetag
 * correlation and model fitting behind a stable ABI. All functions return
 * pk_status; on failure pk_last_error() carries a message (thread-local).
 * Status values match the CLI exit-code contract. */
#ifndef PHOTONKIT_H
#define PHOTONKIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pk_status {
  PK_OK = 0,
  PK_ERR_CONFIG = 2, /* bad configuration or domain error */
  PK_ERR_NUMERIC = 3, /* non-convergence, undefined result */
  PK_ERR_IO = 4       /* file format or filesystem failure */
} pk_status;

const char* pk_version(void);
const char* pk_last_error(void);

/* ---- run configuration (opaque handle) ---- */
typedef struct pk_config pk_config;

pk_status pk_config_create(pk_config** out);
pk_status pk_config_load(const char* path, pk_config** out);
pk_status pk_config_parse(const char* json_text, pk_config** out);
/* dotted key, e.g. "emitter.leak_rate", "seed", "bench.topology" */
pk_status pk_config_override(pk_config* cfg, const char* dotted_key,
                             const char* value);
pk_status pk_config_hash_hex(const pk_config* cfg, char out_hex[65]);
/* returns a newly allocated JSON document; free with pk_string_free */
pk_status pk_config_to_json(const pk_config* cfg, char** out_text);
void pk_config_free(pk_config* cfg);

void pk_string_free(char* text);

/* ---- pipelines ---- */
/* writes ch1.ptt / ch2.ptt (+ truth.csv, run_summary.json) into out_dir */
pk_status pk_run_simulate(const pk_config* cfg, const char* out_dir);
/* rate-multiplication sweep; writes rate_sweep.csv into out_dir */
pk_status pk_run_sweep(const pk_config* cfg, const int* multipliers,
                       size_t n_multipliers, const char* out_dir);
/* preset in {fig4a, fig4d, fig5f, fig2e}; seed may be NULL for the pinned
 * default; if all_pass is non-NULL it receives 1/0 for the preset's internal
 * tolerance checks */
pk_status pk_run_reproduce(const char* preset, const char* out_dir,
                           const uint64_t* seed, int threads, int* all_pass);

/* ---- correlation ---- */
typedef struct pk_histogram pk_histogram;

pk_status pk_correlate_files(const char* file_a, const char* file_b,
                             double bin_width_ps, double range_ps, int threads,
                             pk_histogram** out);
size_t pk_histogram_bins(const pk_histogram* h);
double pk_histogram_bin_center_ps(const pk_histogram* h, size_t index);
uint64_t pk_histogram_count(const pk_histogram* h, size_t index);
pk_status pk_histogram_write_csv(const pk_histogram* h, const char* path);
void pk_histogram_free(pk_histogram* h);

/* ---- analysis over timetag files (stamped JSON written to out_json) ---- */
pk_status pk_analyze_hbt(const char* file_a, const char* file_b, double period_ps,
                         int threads, const pk_config* cfg, const char* out_json);
pk_status pk_analyze_hom(const char* co_a, const char* co_b, const char* cross_a,
                         const char* cross_b, double period_ps, double g2_zero,
                         double b_factor, int threads, const pk_config* cfg,
                         const char* out_json);
/* model in {exp, biexp, exp_irf}; irf_sigma_ps <= 0 means none */
pk_status pk_analyze_lifetime(const char* file, double period_ps, double bin_ps,
                              const char* model, double irf_sigma_ps,
                              const pk_config* cfg, const char* out_json);

/* ---- closed-form physics ---- */
pk_status pk_bose_einstein(double e_mev, double temperature_k, double* out);
pk_status pk_phonon_dephasing_uev(double alpha_uev, double e_phonon_mev,
                                  double temperature_k, double* out);
pk_status pk_fourier_linewidth_uev(double t1_ps, double* out);
pk_status pk_purcell_lifetime_ps(double t1_free_ps, double purcell_factor,
                                 double* out);
pk_status pk_visibility_inhomogeneous(double t1_ps, double gamma_inhom_ghz,
                                      double* out);
pk_status pk_visibility_temperature(double t1_free_ps, double purcell_factor,
                                    double gamma_inhom_ghz, double alpha_uev,
                                    double e_phonon_mev, double temperature_k,
                                    double* out);
pk_status pk_correct_visibility(double v_raw, double g2_zero, double b_factor,
                                double* out);
pk_status pk_calibrate_gamma_inhom(double t1_ps, double v_target, double* out);
/* t2_pure_ps <= 0 means no pure dephasing */
pk_status pk_pair_visibility_oracle(double t1_ps, double gamma_inhom_ghz,
                                    double t2_pure_ps, double* out);
pk_status pk_calibrate_reservoir(double target_ratio, int multiplier,
                                 double base_rate_mhz, double* out);

#ifdef __cplusplus
}
#endif

#endif /* PHOTONKIT_H */
