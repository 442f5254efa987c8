#include "photonkit.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "photonkit/analysis.hpp"
#include "photonkit/bench.hpp"
#include "photonkit/config.hpp"
#include "photonkit/correlator.hpp"
#include "photonkit/errors.hpp"
#include "photonkit/physics.hpp"
#include "photonkit/presets.hpp"
#include "photonkit/source.hpp"
#include "photonkit/timetags.hpp"

struct pk_config {
  photonkit::RunConfig cfg;
};

struct pk_histogram {
  photonkit::CorrelationHistogram hist;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
pk_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return PK_OK;
  } catch (const photonkit::ConfigError& e) {
    g_last_error = e.what();
    return PK_ERR_CONFIG;
  } catch (const std::domain_error& e) {
    g_last_error = e.what();
    return PK_ERR_CONFIG;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return PK_ERR_CONFIG;
  } catch (const photonkit::IoError& e) {
    g_last_error = e.what();
    return PK_ERR_IO;
  } catch (const photonkit::NumericError& e) {
    g_last_error = e.what();
    return PK_ERR_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PK_ERR_NUMERIC;
  }
}

pk_status require(bool ok, const char* what) {
  if (ok) return PK_OK;
  g_last_error = what;
  return PK_ERR_CONFIG;
}

}  // namespace

extern "C" {

const char* pk_version(void) {
  static const std::string v = photonkit::tool_version();
  return v.c_str();
}

const char* pk_last_error(void) { return g_last_error.c_str(); }

pk_status pk_config_create(pk_config** out) {
  if (const auto s = require(out != nullptr, "pk_config_create: out is NULL")) return s;
  return guarded([&] { *out = new pk_config{photonkit::RunConfig{}}; });
}

pk_status pk_config_load(const char* path, pk_config** out) {
  if (const auto s = require(path && out, "pk_config_load: NULL argument")) return s;
  return guarded([&] { *out = new pk_config{photonkit::load_config(path)}; });
}

pk_status pk_config_parse(const char* json_text, pk_config** out) {
  if (const auto s = require(json_text && out, "pk_config_parse: NULL argument"))
    return s;
  return guarded(
      [&] { *out = new pk_config{photonkit::config_from_json_text(json_text)}; });
}

pk_status pk_config_override(pk_config* cfg, const char* dotted_key, const char* value) {
  if (const auto s =
          require(cfg && dotted_key && value, "pk_config_override: NULL argument"))
    return s;
  return guarded([&] { photonkit::apply_override(cfg->cfg, dotted_key, value); });
}

pk_status pk_config_hash_hex(const pk_config* cfg, char out_hex[65]) {
  if (const auto s = require(cfg && out_hex, "pk_config_hash_hex: NULL argument"))
    return s;
  return guarded([&] {
    const std::string hex = photonkit::config_hash_hex(cfg->cfg);
    std::memcpy(out_hex, hex.c_str(), 65);
  });
}

pk_status pk_config_to_json(const pk_config* cfg, char** out_text) {
  if (const auto s = require(cfg && out_text, "pk_config_to_json: NULL argument"))
    return s;
  return guarded([&] {
    const std::string text = photonkit::pretty_json(cfg->cfg);
    *out_text = new char[text.size() + 1];
    std::memcpy(*out_text, text.c_str(), text.size() + 1);
  });
}

void pk_config_free(pk_config* cfg) { delete cfg; }

void pk_string_free(char* text) { delete[] text; }

pk_status pk_run_simulate(const pk_config* cfg, const char* out_dir) {
  if (const auto s = require(cfg && out_dir, "pk_run_simulate: NULL argument")) return s;
  return guarded([&] { photonkit::run_simulate(cfg->cfg, out_dir); });
}

pk_status pk_run_sweep(const pk_config* cfg, const int* multipliers,
                       size_t n_multipliers, const char* out_dir) {
  if (const auto s = require(cfg && out_dir && (multipliers || n_multipliers == 0),
                             "pk_run_sweep: NULL argument"))
    return s;
  return guarded([&] {
    std::vector<int> m(multipliers, multipliers + n_multipliers);
    if (m.empty()) m = {1, 2, 4, 8, 16};
    photonkit::run_sweep(cfg->cfg, m, out_dir);
  });
}

pk_status pk_run_reproduce(const char* preset, const char* out_dir,
                           const uint64_t* seed, int threads, int* all_pass) {
  if (const auto s = require(preset && out_dir, "pk_run_reproduce: NULL argument"))
    return s;
  return guarded([&] {
    std::optional<std::uint64_t> s;
    if (seed) s = *seed;
    const auto res = photonkit::run_preset(preset, out_dir, s, threads);
    if (all_pass) *all_pass = res.all_pass ? 1 : 0;
  });
}

pk_status pk_correlate_files(const char* file_a, const char* file_b,
                             double bin_width_ps, double range_ps, int threads,
                             pk_histogram** out) {
  if (const auto s =
          require(file_a && file_b && out, "pk_correlate_files: NULL argument"))
    return s;
  return guarded([&] {
    constexpr std::size_t chunk = 1u << 21;
    photonkit::TimeTagFileReader ra(file_a), rb(file_b);
    auto hist = photonkit::cross_correlate_stream(
        [&ra](std::vector<std::uint64_t>& o) { return ra.read_chunk(o, chunk); },
        [&rb](std::vector<std::uint64_t>& o) { return rb.read_chunk(o, chunk); },
        bin_width_ps, range_ps, threads);
    hist.channel_pair = {ra.info().channel, rb.info().channel};
    *out = new pk_histogram{std::move(hist)};
  });
}

size_t pk_histogram_bins(const pk_histogram* h) { return h ? h->hist.counts.size() : 0; }

double pk_histogram_bin_center_ps(const pk_histogram* h, size_t index) {
  return h ? h->hist.bin_center_ps(index) : 0.0;
}

uint64_t pk_histogram_count(const pk_histogram* h, size_t index) {
  return h && index < h->hist.counts.size() ? h->hist.counts[index] : 0;
}

pk_status pk_histogram_write_csv(const pk_histogram* h, const char* path) {
  if (const auto s = require(h && path, "pk_histogram_write_csv: NULL argument"))
    return s;
  return guarded([&] { photonkit::write_histogram_csv(path, h->hist); });
}

void pk_histogram_free(pk_histogram* h) { delete h; }

pk_status pk_analyze_hbt(const char* file_a, const char* file_b, double period_ps,
                         int threads, const pk_config* cfg, const char* out_json) {
  if (const auto s =
          require(file_a && file_b && cfg && out_json, "pk_analyze_hbt: NULL argument"))
    return s;
  return guarded([&] {
    photonkit::analyze_hbt(file_a, file_b, period_ps, threads, cfg->cfg, out_json);
  });
}

pk_status pk_analyze_hom(const char* co_a, const char* co_b, const char* cross_a,
                         const char* cross_b, double period_ps, double g2_zero,
                         double b_factor, int threads, const pk_config* cfg,
                         const char* out_json) {
  if (const auto s = require(co_a && co_b && cross_a && cross_b && cfg && out_json,
                             "pk_analyze_hom: NULL argument"))
    return s;
  return guarded([&] {
    photonkit::analyze_hom(co_a, co_b, cross_a, cross_b, period_ps, g2_zero, b_factor,
                           threads, cfg->cfg, out_json);
  });
}

pk_status pk_analyze_lifetime(const char* file, double period_ps, double bin_ps,
                              const char* model, double irf_sigma_ps,
                              const pk_config* cfg, const char* out_json) {
  if (const auto s = require(file && model && cfg && out_json,
                             "pk_analyze_lifetime: NULL argument"))
    return s;
  return guarded([&] {
    std::optional<double> irf;
    if (irf_sigma_ps > 0.0) irf = irf_sigma_ps;
    photonkit::analyze_lifetime(file, period_ps, bin_ps, model, irf, cfg->cfg,
                                out_json);
  });
}

pk_status pk_bose_einstein(double e_mev, double temperature_k, double* out) {
  if (const auto s = require(out != nullptr, "pk_bose_einstein: out is NULL")) return s;
  return guarded([&] { *out = photonkit::physics::bose_einstein(e_mev, temperature_k); });
}

pk_status pk_phonon_dephasing_uev(double alpha_uev, double e_phonon_mev,
                                  double temperature_k, double* out) {
  if (const auto s = require(out != nullptr, "pk_phonon_dephasing_uev: out is NULL"))
    return s;
  return guarded([&] {
    *out = photonkit::physics::phonon_dephasing_uev(alpha_uev, e_phonon_mev,
                                                    temperature_k);
  });
}

pk_status pk_fourier_linewidth_uev(double t1_ps, double* out) {
  if (const auto s = require(out != nullptr, "pk_fourier_linewidth_uev: out is NULL"))
    return s;
  return guarded([&] { *out = photonkit::physics::fourier_linewidth_uev(t1_ps); });
}

pk_status pk_purcell_lifetime_ps(double t1_free_ps, double purcell_factor, double* out) {
  if (const auto s = require(out != nullptr, "pk_purcell_lifetime_ps: out is NULL"))
    return s;
  return guarded(
      [&] { *out = photonkit::physics::purcell_lifetime_ps(t1_free_ps, purcell_factor); });
}

pk_status pk_visibility_inhomogeneous(double t1_ps, double gamma_inhom_ghz,
                                      double* out) {
  if (const auto s =
          require(out != nullptr, "pk_visibility_inhomogeneous: out is NULL"))
    return s;
  return guarded([&] {
    *out = photonkit::physics::visibility_inhomogeneous(t1_ps, gamma_inhom_ghz);
  });
}

pk_status pk_visibility_temperature(double t1_free_ps, double purcell_factor,
                                    double gamma_inhom_ghz, double alpha_uev,
                                    double e_phonon_mev, double temperature_k,
                                    double* out) {
  if (const auto s = require(out != nullptr, "pk_visibility_temperature: out is NULL"))
    return s;
  return guarded([&] {
    photonkit::EmitterConfig e;
    e.t1_free_ps = t1_free_ps;
    e.purcell_factor = purcell_factor;
    e.gamma_inhom_ghz = gamma_inhom_ghz;
    e.alpha_uev = alpha_uev;
    e.e_phonon_mev = e_phonon_mev;
    e.temperature_k = temperature_k;
    *out = photonkit::physics::visibility_temperature(e);
  });
}

pk_status pk_correct_visibility(double v_raw, double g2_zero, double b_factor,
                                double* out) {
  if (const auto s = require(out != nullptr, "pk_correct_visibility: out is NULL"))
    return s;
  return guarded([&] {
    *out = photonkit::physics::correct_visibility(v_raw, g2_zero, b_factor).v_corrected;
  });
}

pk_status pk_calibrate_gamma_inhom(double t1_ps, double v_target, double* out) {
  if (const auto s = require(out != nullptr, "pk_calibrate_gamma_inhom: out is NULL"))
    return s;
  return guarded(
      [&] { *out = photonkit::physics::calibrate_gamma_inhom(t1_ps, v_target); });
}

pk_status pk_pair_visibility_oracle(double t1_ps, double gamma_inhom_ghz,
                                    double t2_pure_ps, double* out) {
  if (const auto s = require(out != nullptr, "pk_pair_visibility_oracle: out is NULL"))
    return s;
  return guarded([&] {
    std::optional<double> t2;
    if (t2_pure_ps > 0.0) t2 = t2_pure_ps;
    *out = photonkit::pair_visibility_oracle(t1_ps, gamma_inhom_ghz, t2);
  });
}

pk_status pk_calibrate_reservoir(double target_ratio, int multiplier,
                                 double base_rate_mhz, double* out) {
  if (const auto s = require(out != nullptr, "pk_calibrate_reservoir: out is NULL"))
    return s;
  return guarded([&] {
    *out = photonkit::calibrate_reservoir(target_ratio, multiplier, base_rate_mhz);
  });
}

}  // extern "C"
