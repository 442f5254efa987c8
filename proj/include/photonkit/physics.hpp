#pragma once

#include "photonkit/types.hpp"

namespace photonkit::physics {

/// Bose-Einstein occupancy n(E,T) = 1/(exp(E/kB T) - 1).
/// Returns 0 at T = 0 so temperature sweeps can start at zero.
/// Throws std::domain_error for e_mev <= 0.
double bose_einstein(double e_mev, double temperature_k);

/// Phonon pure-dephasing linewidth gamma* = alpha * n(E) * (n(E)+1), in ueV.
double phonon_dephasing_uev(const EmitterConfig& config);
double phonon_dephasing_uev(double alpha_uev, double e_phonon_mev, double temperature_k);

/// Fourier-limited linewidth gamma = hbar/T1 in ueV. Throws for t1 <= 0.
double fourier_linewidth_uev(double t1_ps);

/// Purcell-shortened lifetime t1_free / fp. fp in (0,1) is allowed
/// (suppression regime); fp <= 0 throws.
double purcell_lifetime_ps(double t1_free_ps, double fp);

/// Cavity mode wavelength under the linear delta_r tuning law.
double cavity_mode_wavelength_nm(const CavityModel& cavity);

/// Lorentzian Purcell response vs spectral detuning (nm), floor at the
/// membrane baseline F_P = 1, scaled by the spatial derating factor.
double purcell_vs_detuning(const CavityModel& cavity, double detuning_nm);

/// Scaled complementary error function exp(x^2) erfc(x), overflow-safe.
double erfcx(double x);

/// Two-photon visibility under Gaussian inhomogeneous broadening:
/// V = sqrt(pi) x exp(x^2) erfc(x), x = A/T1, A = inhom_coeff/Gamma.
/// Gamma = 0 returns exactly 1; t1 <= 0 throws.
double visibility_inhomogeneous(double t1_ps, double gamma_inhom_ghz);

/// Thermal (Markovian) reduction factor gamma/(gamma + gamma*(T)), in (0,1].
double thermal_visibility_factor(const EmitterConfig& config);

/// Full temperature-dependent visibility
/// V(T) = visibility_inhomogeneous(T1, Gamma) * gamma/(gamma + gamma*(T)),
/// with T1 the Purcell-shortened lifetime of `config`.
double visibility_temperature(const EmitterConfig& config);

/// Correction for finite multi-photon probability:
/// v_corrected = min(1, v_raw + b * g2_zero), 1 <= b <= 2 enforced.
VisibilityReport correct_visibility(double v_raw, double g2_zero, double b_factor);

/// Root-finds the linewidth Gamma (GHz) with visibility_inhomogeneous(t1, Gamma)
/// = v_target. Throws std::invalid_argument for v_target outside (0,1).
double calibrate_gamma_inhom(double t1_ps, double v_target);

/// Pure-dephasing coherence time T2' (ps) equivalent to a ZPL broadening
/// gamma* (ueV): T2' = 2 hbar / gamma*. Infinite broadening -> 0; zero -> inf.
double t2_pure_from_dephasing_uev(double gamma_star_uev);

enum class FourierLimitConvention { t2_eq_2t1, two_t2_eq_t1 };

/// Reference T2(T1) line for lifetime-vs-coherence plots; the convention is a
/// display choice, nothing downstream depends on it.
double fourier_limit_t2_ps(double t1_ps, FourierLimitConvention convention);

// Unit helpers (exact inverses of each other).
double energy_uev_to_ghz(double e_uev);
double ghz_to_energy_uev(double f_ghz);

/// Field-level validation; throws ConfigError naming the offending field.
void validate(const EmitterConfig& c);
void validate(const CavityModel& c);
void validate(const PulseTrain& t);
void validate(const DetectorModel& d);
void validate(const BenchConfig& b, double period_ps);

}  // namespace photonkit::physics
