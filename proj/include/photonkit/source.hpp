#pragma once

#include <cstdint>
#include <vector>

#include "photonkit/types.hpp"

namespace photonkit {

/// Occupation probability of the emitting state at a pulse arriving dt after
/// the preceding excitation cycle: 1 - exp(-(dt/tau)^2), 1 when tau = 0.
/// The quadratic exponent gives the sharp saturation knee seen above ~300 MHz.
double reservoir_occupancy(double reservoir_tau_ps, double dt_ps);

/// Steady-state per-pulse yield at the multiplied rate over the yield at the
/// base rate (the semi-analytic saturation model: yield = p_occ(period)).
double reservoir_yield_ratio(double reservoir_tau_ps, int multiplier,
                             double base_period_ps);

/// Root-finds reservoir_tau so that the steady-state yield ratio at the given
/// multiplier equals target_ratio. target 1 -> 0 (no saturation). Targets at
/// or below the 1/multiplier^2 asymptotic floor raise NumericError.
double calibrate_reservoir(double target_ratio, int multiplier,
                           double base_rate_mhz = 80.0);

/// Monte Carlo pulse-train emission. Per pulse: reservoir-gated occupation,
/// fast/slow mixture decay delay, optional re-excitation (second photon within
/// the pulse), Poisson leak photons on the laser pulse shape, and one
/// spectral-diffusion frequency offset shared by the pulse's emitter photons.
/// Records are sorted by emission time; generation is deterministic in
/// (config, seed) and independent of threading.
std::vector<PhotonRecord> simulate_emission(const EmitterConfig& emitter,
                                            const PulseTrain& train,
                                            std::uint64_t seed);

/// First pulse origin (lead-in keeps jittered/delayed times positive).
double pulse_lead_in_ps(const PulseTrain& train);

/// Detector response: efficiency thinning, Gaussian IRF jitter, dark-count
/// Poisson process over [0, duration], 1 ps quantization, dead-time pruning.
TimeTagStream detect(const std::vector<PhotonRecord>& photons,
                     const DetectorModel& detector, std::uint64_t seed,
                     std::uint16_t channel, double duration_ps,
                     DetectionAccounting* accounting = nullptr);

/// Same detector response applied to raw click times (bench outputs).
TimeTagStream detect_times(const std::vector<double>& times_ps,
                           const DetectorModel& detector, std::uint64_t seed,
                           std::uint16_t channel, double duration_ps,
                           DetectionAccounting* accounting = nullptr);

/// Homogeneous Poisson photon train (coherent-state reference stream).
std::vector<PhotonRecord> poisson_photon_records(double rate_per_ps,
                                                 double duration_ps,
                                                 std::uint64_t seed);

}  // namespace photonkit
