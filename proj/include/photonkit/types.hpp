#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace photonkit {

/// Physical parameters of the emitter (trion transition + its environment).
struct EmitterConfig {
  double t1_free_ps = 680.0;      ///< free-space / membrane lifetime
  double purcell_factor = 1.0;    ///< F_P, >= 0 (values < 1 mean suppression)
  double gamma_inhom_ghz = 0.0;   ///< Gaussian spectral-diffusion FWHM
  double alpha_uev = 3.0;         ///< phonon coupling strength
  double e_phonon_mev = 1.0;      ///< effective acoustic-phonon energy
  double temperature_k = 4.0;
  double slow_fraction = 0.0;     ///< weight of the slow decay branch, in [0,1]
  double tau_slow_ps = 400.0;     ///< slow branch time constant
  double reservoir_tau_ps = 0.0;  ///< hole-refill time constant, 0 = always refilled
  double reexcite_prob = 0.0;     ///< probability of a second emission per pulse
  double leak_rate = 0.0;         ///< mean leak photons per pulse (laser breakthrough)

  /// Purcell-shortened lifetime actually used for sampling.
  double t1_ps() const { return t1_free_ps / purcell_factor; }
};

/// Parametric cavity: mode wavelength tuning law + Lorentzian Purcell response.
struct CavityModel {
  double lambda_c0_nm = 920.0;   ///< mode center at delta_r = 0
  double delta_r_nm = 0.0;       ///< central-disc radius variation
  double tuning_slope = 1.3;     ///< nm mode shift per nm delta_r
  double q_factor = 250.0;
  double fp_max = 30.0;          ///< on-resonance Purcell factor
  double mode_splitting_nm = 0.0;
  double spatial_derating = 1.0; ///< scalar F_P multiplier in (0,1] for emitter-mode mismatch
};

/// Raw + corrected two-photon-interference visibility.
struct VisibilityReport {
  double v_raw = 0.0;
  double v_raw_err = 0.0;
  double g2_zero = 0.0;
  double b_factor = 1.0;
  double v_corrected = 0.0;  // min(1, v_raw + b_factor * g2_zero)
};

struct PulseTrain {
  double base_rate_mhz = 80.0;
  int multiplier = 1;           ///< power of two in {1,2,4,8,16}
  double pulse_fwhm_ps = 2.0;   ///< 2 ps quasi-resonant, 8 ps resonant
  double pulse_area = 1.0;      ///< fraction of pi
  std::uint64_t n_pulses = 1000;

  double rate_mhz() const { return base_rate_mhz * multiplier; }
  double period_ps() const { return 1.0e6 / rate_mhz(); }
};

enum class PhotonOrigin : std::uint8_t { emitter, leak, dark };
enum class Polarization : std::uint8_t { co, cross };

/// Truth-level photon. `wavepacket_origin_ps` is the excitation instant the
/// exponential wavepacket starts at; `emission_time_ps` is the sampled photon
/// instant (wavepacket origin + decay delay).
struct PhotonRecord {
  double emission_time_ps = 0.0;
  double wavepacket_origin_ps = 0.0;
  std::uint64_t pulse_index = 0;
  double frequency_offset_ghz = 0.0;
  Polarization polarization = Polarization::co;
  PhotonOrigin origin = PhotonOrigin::emitter;
};

/// Detector-level click stream. Tags are strictly increasing, 1 ps grid.
struct TimeTagStream {
  std::uint16_t channel = 0;
  std::vector<std::uint64_t> tags_ps;
  std::uint64_t seed = 0;
  std::array<std::uint8_t, 32> config_hash{};
  std::uint64_t duration_ps = 0;
};

struct DetectorModel {
  double irf_sigma_ps = 0.0;  ///< Gaussian timing jitter
  double efficiency = 1.0;    ///< in (0,1]
  double dark_rate_hz = 0.0;
  double dead_time_ps = 0.0;  ///< same-channel tags closer than this are dropped
};

/// Photon bookkeeping for one detect() call: input = detected + thinned +
/// dead_time_dropped + grid_collisions; darks are added on top.
struct DetectionAccounting {
  std::uint64_t input = 0;
  std::uint64_t detected = 0;
  std::uint64_t thinned = 0;
  std::uint64_t dead_time_dropped = 0;
  std::uint64_t grid_collisions = 0;
  std::uint64_t dark_added = 0;
};

enum class BenchTopology : std::uint8_t { hbt, hom };

/// Optical-bench configuration (HBT splitter or delay-matched HOM MZI).
struct BenchConfig {
  BenchTopology topology = BenchTopology::hbt;
  double delay_ps = 0.0;  ///< MZI arm imbalance; 0 = auto (one pulse period)
  Polarization polarization_mode = Polarization::co;
  double splitter_ratio = 0.5;
  std::optional<double> t2_pure_ps;  ///< interference-damping coherence time
};

struct CorrelationHistogram {
  double bin_width_ps = 1.0;
  double range_ps = 0.0;          ///< histogram spans [-range, +range)
  std::vector<std::uint64_t> counts;
  std::pair<std::uint16_t, std::uint16_t> channel_pair{0, 0};
  std::uint64_t total_pairs = 0;  ///< == sum(counts)

  std::size_t bin_count() const { return counts.size(); }
  double bin_center_ps(std::size_t i) const {
    return -range_ps + (static_cast<double>(i) + 0.5) * bin_width_ps;
  }
};

/// Peak areas integrated over period-wide windows centered on k*window.
struct PeakIntegration {
  double window_ps = 0.0;
  double center_area = 0.0;
  std::vector<double> side_areas;
};

struct FitParameter {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;  ///< 1-sigma from the LM covariance
};

struct FitResult {
  std::string model;  // exp | biexp | exp_irf | fano | dip_exp
  std::vector<FitParameter> params;
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string message;
  std::string weighting;  // "poisson>=10" or "unweighted"

  const FitParameter* find(const std::string& name) const {
    for (const auto& p : params)
      if (p.name == name) return &p;
    return nullptr;
  }
  double value_of(const std::string& name) const {
    const auto* p = find(name);
    return p ? p->value : 0.0;
  }
};

}  // namespace photonkit
