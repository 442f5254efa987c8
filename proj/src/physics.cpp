#include "photonkit/physics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "photonkit/constants.hpp"
#include "photonkit/errors.hpp"

namespace photonkit::physics {

namespace {

using namespace photonkit::constants;

[[noreturn]] void fail_field(const char* type, const char* field, const std::string& why) {
  std::ostringstream os;
  os << type << "." << field << ": " << why;
  throw ConfigError(os.str());
}

}  // namespace

double bose_einstein(double e_mev, double temperature_k) {
  if (e_mev <= 0.0) throw std::domain_error("bose_einstein: phonon energy must be > 0");
  if (temperature_k < 0.0) throw std::domain_error("bose_einstein: temperature must be >= 0");
  if (temperature_k == 0.0) return 0.0;
  const double x = e_mev / (kb_mev_per_k * temperature_k);
  // expm1 keeps precision for kT >> E
  return 1.0 / std::expm1(x);
}

double phonon_dephasing_uev(double alpha_uev, double e_phonon_mev, double temperature_k) {
  const double n = bose_einstein(e_phonon_mev, temperature_k);
  return alpha_uev * n * (n + 1.0);
}

double phonon_dephasing_uev(const EmitterConfig& config) {
  return phonon_dephasing_uev(config.alpha_uev, config.e_phonon_mev, config.temperature_k);
}

double fourier_linewidth_uev(double t1_ps) {
  if (t1_ps <= 0.0) throw std::domain_error("fourier_linewidth: t1 must be > 0");
  return hbar_uev_ps / t1_ps;
}

double purcell_lifetime_ps(double t1_free_ps, double fp) {
  if (t1_free_ps <= 0.0) throw std::domain_error("purcell_lifetime: t1_free must be > 0");
  if (fp <= 0.0) throw std::domain_error("purcell_lifetime: fp must be > 0");
  return t1_free_ps / fp;
}

double cavity_mode_wavelength_nm(const CavityModel& cavity) {
  return cavity.lambda_c0_nm + cavity.tuning_slope * cavity.delta_r_nm;
}

double purcell_vs_detuning(const CavityModel& cavity, double detuning_nm) {
  const double lambda_c = cavity_mode_wavelength_nm(cavity);
  const double u = 2.0 * cavity.q_factor * detuning_nm / lambda_c;
  const double fp = 1.0 + (cavity.fp_max - 1.0) / (1.0 + u * u);
  return cavity.spatial_derating * fp;
}

double erfcx(double x) {
  if (x < 0.0) return 2.0 * std::exp(x * x) - erfcx(-x);
  if (x < 12.0) return std::exp(x * x) * std::erfc(x);
  // asymptotic series, relative error < 1e-10 for x >= 12
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 10; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
  }
  return sum / (x * std::sqrt(pi));
}

double visibility_inhomogeneous(double t1_ps, double gamma_inhom_ghz) {
  if (t1_ps <= 0.0) throw std::domain_error("visibility_inhomogeneous: t1 must be > 0");
  if (gamma_inhom_ghz < 0.0)
    throw std::domain_error("visibility_inhomogeneous: gamma must be >= 0");
  if (gamma_inhom_ghz == 0.0) return 1.0;
  const double a_ps = inhom_coeff_ghz_ps / gamma_inhom_ghz;
  const double x = a_ps / t1_ps;
  return std::sqrt(pi) * x * erfcx(x);
}

double thermal_visibility_factor(const EmitterConfig& config) {
  const double gamma = fourier_linewidth_uev(config.t1_ps());
  const double gamma_star = phonon_dephasing_uev(config);
  return gamma / (gamma + gamma_star);
}

double visibility_temperature(const EmitterConfig& config) {
  const double v0 = visibility_inhomogeneous(config.t1_ps(), config.gamma_inhom_ghz);
  return v0 * thermal_visibility_factor(config);
}

VisibilityReport correct_visibility(double v_raw, double g2_zero, double b_factor) {
  if (g2_zero < 0.0) throw std::domain_error("correct_visibility: g2_zero must be >= 0");
  if (b_factor < 1.0 || b_factor > 2.0)
    throw std::domain_error("correct_visibility: b_factor must be in [1,2]");
  VisibilityReport r;
  r.v_raw = v_raw;
  r.g2_zero = g2_zero;
  r.b_factor = b_factor;
  r.v_corrected = std::min(1.0, v_raw + b_factor * g2_zero);
  return r;
}

double calibrate_gamma_inhom(double t1_ps, double v_target) {
  if (v_target <= 0.0 || v_target >= 1.0)
    throw std::invalid_argument("calibrate_gamma_inhom: target must be in (0,1)");
  // V is monotone decreasing in Gamma; bracket and bisect.
  double lo = 1e-6, hi = 1e6;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);  // log-space bisection
    if (visibility_inhomogeneous(t1_ps, mid) > v_target)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

double t2_pure_from_dephasing_uev(double gamma_star_uev) {
  if (gamma_star_uev < 0.0) throw std::domain_error("t2_pure_from_dephasing: gamma* >= 0");
  if (gamma_star_uev == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * hbar_uev_ps / gamma_star_uev;
}

double fourier_limit_t2_ps(double t1_ps, FourierLimitConvention convention) {
  switch (convention) {
    case FourierLimitConvention::t2_eq_2t1: return 2.0 * t1_ps;
    case FourierLimitConvention::two_t2_eq_t1: return 0.5 * t1_ps;
  }
  return 2.0 * t1_ps;
}

double energy_uev_to_ghz(double e_uev) { return e_uev / h_uev_per_ghz; }
double ghz_to_energy_uev(double f_ghz) { return f_ghz * h_uev_per_ghz; }

void validate(const EmitterConfig& c) {
  if (!(c.t1_free_ps > 0.0)) fail_field("emitter", "t1_free_ps", "must be > 0");
  if (!(c.purcell_factor > 0.0)) fail_field("emitter", "purcell_factor", "must be > 0");
  if (c.gamma_inhom_ghz < 0.0) fail_field("emitter", "gamma_inhom_ghz", "must be >= 0");
  if (c.alpha_uev < 0.0) fail_field("emitter", "alpha_uev", "must be >= 0");
  if (!(c.e_phonon_mev > 0.0)) fail_field("emitter", "e_phonon_mev", "must be > 0");
  if (c.temperature_k < 0.0) fail_field("emitter", "temperature_k", "must be >= 0");
  if (c.slow_fraction < 0.0 || c.slow_fraction > 1.0)
    fail_field("emitter", "slow_fraction", "must be in [0,1]");
  if (c.slow_fraction > 0.0 && !(c.tau_slow_ps > c.t1_free_ps / c.purcell_factor))
    fail_field("emitter", "tau_slow_ps", "must exceed the Purcell-shortened t1");
  if (c.reservoir_tau_ps < 0.0) fail_field("emitter", "reservoir_tau_ps", "must be >= 0");
  if (c.reexcite_prob < 0.0 || c.reexcite_prob > 1.0)
    fail_field("emitter", "reexcite_prob", "must be in [0,1]");
  if (c.leak_rate < 0.0) fail_field("emitter", "leak_rate", "must be >= 0");
}

void validate(const CavityModel& c) {
  if (!(c.q_factor > 0.0)) fail_field("cavity", "q_factor", "must be > 0");
  if (!(c.fp_max >= 1.0)) fail_field("cavity", "fp_max", "must be >= 1");
  if (!(c.tuning_slope > 0.0)) fail_field("cavity", "tuning_slope", "must be > 0");
  if (c.mode_splitting_nm < 0.0) fail_field("cavity", "mode_splitting_nm", "must be >= 0");
  if (!(c.spatial_derating > 0.0 && c.spatial_derating <= 1.0))
    fail_field("cavity", "spatial_derating", "must be in (0,1]");
}

void validate(const PulseTrain& t) {
  if (!(t.base_rate_mhz > 0.0)) fail_field("train", "base_rate_mhz", "must be > 0");
  const int m = t.multiplier;
  if (m != 1 && m != 2 && m != 4 && m != 8 && m != 16)
    fail_field("train", "multiplier", "must be one of {1,2,4,8,16}");
  if (t.pulse_fwhm_ps < 0.0) fail_field("train", "pulse_fwhm_ps", "must be >= 0");
  if (t.n_pulses < 1) fail_field("train", "n_pulses", "must be >= 1");
}

void validate(const DetectorModel& d) {
  if (d.irf_sigma_ps < 0.0) fail_field("detector", "irf_sigma_ps", "must be >= 0");
  if (!(d.efficiency > 0.0 && d.efficiency <= 1.0))
    fail_field("detector", "efficiency", "must be in (0,1]");
  if (d.dark_rate_hz < 0.0) fail_field("detector", "dark_rate_hz", "must be >= 0");
  if (d.dead_time_ps < 0.0) fail_field("detector", "dead_time_ps", "must be >= 0");
}

void validate(const BenchConfig& b, double period_ps) {
  if (!(b.splitter_ratio > 0.0 && b.splitter_ratio < 1.0))
    fail_field("bench", "splitter_ratio", "must be in (0,1)");
  if (b.topology == BenchTopology::hom) {
    if (b.delay_ps < 0.0) fail_field("bench", "delay_ps", "must be >= 0 (0 = auto)");
    if (b.t2_pure_ps && !(*b.t2_pure_ps > 0.0))
      fail_field("bench", "t2_pure_ps", "must be > 0 when set");
  }
  (void)period_ps;
}

}  // namespace photonkit::physics
