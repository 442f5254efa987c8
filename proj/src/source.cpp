#include "photonkit/source.hpp"

#include <algorithm>
#include <cmath>

#include "photonkit/constants.hpp"
#include "photonkit/errors.hpp"
#include "photonkit/physics.hpp"
#include "photonkit/rng.hpp"
#include "photonkit/timetags.hpp"

namespace photonkit {

namespace {

// draw slots within a pulse
constexpr std::uint32_t kSlotOccupancy = 0;
constexpr std::uint32_t kSlotLaserOffset = 1;
constexpr std::uint32_t kSlotDecay = 2;
constexpr std::uint32_t kSlotFrequency = 3;
constexpr std::uint32_t kSlotReexcite = 4;
constexpr std::uint32_t kSlotLeakCount = 5;
constexpr std::uint32_t kSlotLeakBase = 8;

}  // namespace

double reservoir_occupancy(double reservoir_tau_ps, double dt_ps) {
  if (reservoir_tau_ps <= 0.0) return 1.0;
  const double u = dt_ps / reservoir_tau_ps;
  return -std::expm1(-u * u);
}

double reservoir_yield_ratio(double reservoir_tau_ps, int multiplier,
                             double base_period_ps) {
  return reservoir_occupancy(reservoir_tau_ps, base_period_ps / multiplier) /
         reservoir_occupancy(reservoir_tau_ps, base_period_ps);
}

double calibrate_reservoir(double target_ratio, int multiplier, double base_rate_mhz) {
  if (!(target_ratio > 0.0 && target_ratio <= 1.0))
    throw std::domain_error("calibrate_reservoir: target_ratio must be in (0,1]");
  if (multiplier < 2) throw std::domain_error("calibrate_reservoir: multiplier must be >= 2");
  if (target_ratio == 1.0) return 0.0;

  const double period = 1.0e6 / base_rate_mhz;
  const double floor_ratio = 1.0 / (static_cast<double>(multiplier) * multiplier);
  if (target_ratio <= floor_ratio * (1.0 + 1e-9))
    throw NumericError(
        "calibrate_reservoir: target below the 1/multiplier^2 asymptotic floor");

  // ratio is monotone decreasing in tau; log-space bisection
  double lo = 1e-3, hi = 1e9;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (reservoir_yield_ratio(mid, multiplier, period) > target_ratio)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

double pulse_lead_in_ps(const PulseTrain& train) { return train.period_ps(); }

std::vector<PhotonRecord> simulate_emission(const EmitterConfig& emitter,
                                            const PulseTrain& train,
                                            std::uint64_t seed) {
  physics::validate(emitter);
  physics::validate(train);

  const double period = train.period_ps();
  const double t0 = pulse_lead_in_ps(train);
  const double t1 = emitter.t1_ps();
  const double sigma_pulse = train.pulse_fwhm_ps / constants::fwhm_over_sigma;
  const double sigma_freq = emitter.gamma_inhom_ghz / constants::fwhm_over_sigma;
  const double p_occ = reservoir_occupancy(emitter.reservoir_tau_ps, period);

  std::vector<PhotonRecord> out;
  out.reserve(static_cast<std::size_t>(
      train.n_pulses * (p_occ * (1.0 + emitter.reexcite_prob) + emitter.leak_rate) + 64));

  for (std::uint64_t k = 0; k < train.n_pulses; ++k) {
    const double pulse_time = t0 + static_cast<double>(k) * period;

    bool occupied = true;
    if (p_occ < 1.0) {
      CounterRng r(seed, rng_stream::occupancy, k, kSlotOccupancy);
      occupied = r.bernoulli(p_occ);
    }

    double freq = 0.0;
    if (occupied) {
      CounterRng r_off(seed, rng_stream::emission, k, kSlotLaserOffset);
      const double offset = sigma_pulse > 0.0 ? r_off.gaussian(0.0, sigma_pulse) : 0.0;
      const double origin = pulse_time + offset;

      CounterRng r_decay(seed, rng_stream::emission, k, kSlotDecay);
      const bool slow = r_decay.bernoulli(emitter.slow_fraction);
      const double delay = r_decay.exponential(slow ? emitter.tau_slow_ps : t1);

      CounterRng r_freq(seed, rng_stream::emission, k, kSlotFrequency);
      // one spectral-diffusion sample per pulse, shared by re-excited photons
      freq = sigma_freq > 0.0 ? r_freq.gaussian(0.0, sigma_freq) : 0.0;

      out.push_back({origin + delay, origin, k, freq, Polarization::co,
                     PhotonOrigin::emitter});

      if (emitter.reexcite_prob > 0.0) {
        CounterRng r_re(seed, rng_stream::emission, k, kSlotReexcite);
        if (r_re.bernoulli(emitter.reexcite_prob)) {
          const double off2 =
              sigma_pulse > 0.0 ? std::abs(r_re.gaussian(0.0, sigma_pulse)) : 0.0;
          // second excitation can only happen after the first photon left
          const double origin2 = origin + delay + off2;
          const double delay2 = r_re.exponential(t1);
          out.push_back({origin2 + delay2, origin2, k, freq, Polarization::co,
                         PhotonOrigin::emitter});
        }
      }
    }

    if (emitter.leak_rate > 0.0) {
      CounterRng r_leak(seed, rng_stream::leak, k, kSlotLeakCount);
      const std::uint64_t n_leak = r_leak.poisson(emitter.leak_rate);
      for (std::uint64_t j = 0; j < n_leak; ++j) {
        CounterRng r_j(seed, rng_stream::leak, k,
                       kSlotLeakBase + static_cast<std::uint32_t>(j));
        const double t = pulse_time +
                         (sigma_pulse > 0.0 ? r_j.gaussian(0.0, sigma_pulse) : 0.0);
        out.push_back({t, t, k, 0.0, Polarization::co, PhotonOrigin::leak});
      }
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const PhotonRecord& a, const PhotonRecord& b) {
                     return a.emission_time_ps < b.emission_time_ps;
                   });
  return out;
}

TimeTagStream detect(const std::vector<PhotonRecord>& photons,
                     const DetectorModel& detector, std::uint64_t seed,
                     std::uint16_t channel, double duration_ps,
                     DetectionAccounting* accounting) {
  std::vector<double> times;
  times.reserve(photons.size());
  for (const auto& p : photons) times.push_back(p.emission_time_ps);
  return detect_times(times, detector, seed, channel, duration_ps, accounting);
}

TimeTagStream detect_times(const std::vector<double>& raw_times,
                           const DetectorModel& detector, std::uint64_t seed,
                           std::uint16_t channel, double duration_ps,
                           DetectionAccounting* accounting) {
  physics::validate(detector);
  DetectionAccounting acc;
  acc.input = raw_times.size();

  std::vector<double> times;
  times.reserve(raw_times.size());
  const std::uint32_t det_stream = rng_stream::detect_ch1 + channel;
  for (std::size_t i = 0; i < raw_times.size(); ++i) {
    CounterRng r(seed, det_stream, i, 0);
    if (detector.efficiency < 1.0 && !r.bernoulli(detector.efficiency)) {
      ++acc.thinned;
      continue;
    }
    double t = raw_times[i];
    if (detector.irf_sigma_ps > 0.0) t += r.gaussian(0.0, detector.irf_sigma_ps);
    times.push_back(t);
  }

  TimeTagStream s;
  s.channel = channel;
  s.seed = seed;
  s.duration_ps = static_cast<std::uint64_t>(duration_ps);
  s.tags_ps = quantize_sorted(times, &acc.grid_collisions);

  if (detector.dark_rate_hz > 0.0) {
    const double rate_per_ps = detector.dark_rate_hz * 1e-12;
    std::vector<double> darks;
    double t = 0.0;
    std::uint64_t k = 0;
    const std::uint32_t dark_stream = rng_stream::dark_ch1 + channel;
    while (true) {
      CounterRng r(seed, dark_stream, k++, 0);
      t += r.exponential(1.0 / rate_per_ps);
      if (t >= duration_ps) break;
      darks.push_back(t);
    }
    const auto dark_tags = quantize_sorted(darks, nullptr);
    std::vector<std::uint64_t> merged;
    merged.reserve(s.tags_ps.size() + dark_tags.size());
    std::merge(s.tags_ps.begin(), s.tags_ps.end(), dark_tags.begin(), dark_tags.end(),
               std::back_inserter(merged));
    const auto last = std::unique(merged.begin(), merged.end());
    merged.erase(last, merged.end());
    acc.dark_added = merged.size() - s.tags_ps.size();
    s.tags_ps = std::move(merged);
  }

  if (detector.dead_time_ps > 0.0 && !s.tags_ps.empty()) {
    std::vector<std::uint64_t> kept;
    kept.reserve(s.tags_ps.size());
    kept.push_back(s.tags_ps.front());
    for (std::size_t i = 1; i < s.tags_ps.size(); ++i) {
      if (static_cast<double>(s.tags_ps[i] - kept.back()) < detector.dead_time_ps) {
        ++acc.dead_time_dropped;
      } else {
        kept.push_back(s.tags_ps[i]);
      }
    }
    s.tags_ps = std::move(kept);
  }

  // conservation: input = detected + thinned + dead_time_dropped + collisions
  // (dead-time drops can hit darks once those are merged in)
  acc.detected = acc.input - acc.thinned - acc.dead_time_dropped - acc.grid_collisions;
  if (accounting) *accounting = acc;
  return s;
}

std::vector<PhotonRecord> poisson_photon_records(double rate_per_ps, double duration_ps,
                                                 std::uint64_t seed) {
  std::vector<PhotonRecord> out;
  double t = 0.0;
  std::uint64_t k = 0;
  while (true) {
    CounterRng r(seed, rng_stream::leak, k, 1);
    t += r.exponential(1.0 / rate_per_ps);
    if (t >= duration_ps) break;
    out.push_back({t, t, k, 0.0, Polarization::co, PhotonOrigin::leak});
    ++k;
  }
  return out;
}

}  // namespace photonkit
