#include "photonkit/source.hpp"

#include <cmath>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "photonkit/errors.hpp"
#include "photonkit/fitting.hpp"
#include "photonkit/timetags.hpp"

using namespace photonkit;

namespace {

EmitterConfig ideal_emitter(double t1 = 54.0) {
  EmitterConfig e;
  e.t1_free_ps = 680.0;
  e.purcell_factor = 680.0 / t1;
  e.gamma_inhom_ghz = 0.0;
  e.slow_fraction = 0.0;
  e.reservoir_tau_ps = 0.0;
  e.reexcite_prob = 0.0;
  e.leak_rate = 0.0;
  return e;
}

PulseTrain train(std::uint64_t n, int multiplier = 1, double fwhm = 0.0) {
  PulseTrain t;
  t.base_rate_mhz = 80.0;
  t.multiplier = multiplier;
  t.pulse_fwhm_ps = fwhm;
  t.n_pulses = n;
  return t;
}

}  // namespace

TEST_CASE("ideal source emits exactly one photon per pulse, delays fit T1") {
  const auto emitter = ideal_emitter(54.0);
  const auto tr = train(200000);
  const auto photons = simulate_emission(emitter, tr, 42);
  REQUIRE(photons.size() == tr.n_pulses);

  // exactly one per pulse
  std::vector<bool> seen(tr.n_pulses, false);
  for (const auto& p : photons) {
    CHECK_FALSE(seen[p.pulse_index]);
    seen[p.pulse_index] = true;
    CHECK(p.emission_time_ps >= p.wavepacket_origin_ps);
  }

  // histogram of decay delays fits T1 within 2%
  const double bin = 2.0;
  std::vector<double> t, y;
  std::map<int, double> h;
  for (const auto& p : photons)
    h[static_cast<int>((p.emission_time_ps - p.wavepacket_origin_ps) / bin)] += 1.0;
  for (int i = 0; i <= h.rbegin()->first; ++i) {
    t.push_back((i + 0.5) * bin);
    y.push_back(h.count(i) ? h[i] : 0.0);
  }
  const auto fit = fit_decay(t, y, DecayModel::exp);
  REQUIRE(fit.converged);
  CHECK(std::abs(fit.value_of("t1_ps") - 54.0) / 54.0 < 0.02);
}

TEST_CASE("biexponential branch recovers both constants") {
  auto emitter = ideal_emitter(54.0);
  emitter.slow_fraction = 0.2;
  emitter.tau_slow_ps = 400.0;
  const auto photons = simulate_emission(emitter, train(400000), 7);

  const double bin = 4.0;
  std::vector<double> t, y;
  std::map<int, double> h;
  for (const auto& p : photons)
    h[static_cast<int>((p.emission_time_ps - p.wavepacket_origin_ps) / bin)] += 1.0;
  for (int i = 0; i <= h.rbegin()->first; ++i) {
    t.push_back((i + 0.5) * bin);
    y.push_back(h.count(i) ? h[i] : 0.0);
  }
  const auto fit = fit_decay(t, y, DecayModel::biexp);
  REQUIRE(fit.converged);
  CHECK(std::abs(fit.value_of("t1_ps") - 54.0) / 54.0 < 0.10);
  CHECK(std::abs(fit.value_of("tau_slow_ps") - 400.0) / 400.0 < 0.10);
  // a 0.2 branching fraction is an amplitude fraction of
  // (f/tau_s) / (f/tau_s + (1-f)/t1) in the histogram
  const double amp_frac = (0.2 / 400.0) / (0.2 / 400.0 + 0.8 / 54.0);
  CHECK(std::abs(fit.value_of("slow_fraction") - amp_frac) < 0.01);
}

TEST_CASE("spectral diffusion offsets are gaussian with FWHM = Gamma") {
  auto emitter = ideal_emitter(54.0);
  emitter.gamma_inhom_ghz = 4.0;
  const auto photons = simulate_emission(emitter, train(150000), 11);
  REQUIRE(photons.size() >= 100000);

  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  const double n = static_cast<double>(photons.size());
  for (const auto& p : photons) m1 += p.frequency_offset_ghz;
  m1 /= n;
  for (const auto& p : photons) {
    const double d = p.frequency_offset_ghz - m1;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double fwhm = 2.3548200450309493 * std::sqrt(m2);
  CHECK(std::abs(fwhm - 4.0) / 4.0 < 0.03);
  // normality: skewness and excess kurtosis consistent with zero
  CHECK(std::abs(m3 / std::pow(m2, 1.5)) < 0.03);
  CHECK(std::abs(m4 / (m2 * m2) - 3.0) < 0.06);
}

TEST_CASE("identical config and seed give identical records") {
  auto emitter = ideal_emitter(40.0);
  emitter.leak_rate = 0.05;
  emitter.reexcite_prob = 0.03;
  emitter.gamma_inhom_ghz = 3.0;
  const auto a = simulate_emission(emitter, train(20000, 4, 2.0), 99);
  const auto b = simulate_emission(emitter, train(20000, 4, 2.0), 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].emission_time_ps == b[i].emission_time_ps);
    CHECK(a[i].frequency_offset_ghz == b[i].frequency_offset_ghz);
    CHECK(a[i].pulse_index == b[i].pulse_index);
  }
  const auto c = simulate_emission(emitter, train(20000, 4, 2.0), 100);
  CHECK(c.size() != a.size());
}

TEST_CASE("reservoir saturation model") {
  // no reservoir: yield independent of multiplier
  for (const int m : {1, 4, 16})
    CHECK(reservoir_occupancy(0.0, 12500.0 / m) == 1.0);

  // calibration hits the target and keeps x4 nearly linear
  const double tau = calibrate_reservoir(0.25, 16);
  CHECK(reservoir_yield_ratio(tau, 16, 12500.0) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(reservoir_yield_ratio(tau, 4, 12500.0) >= 0.90);
  CHECK(reservoir_yield_ratio(tau, 2, 12500.0) >= 0.99);

  // ratios monotone non-increasing in the multiplier
  double prev = 1.1;
  for (const int m : {1, 2, 4, 8, 16}) {
    const double r = reservoir_yield_ratio(tau, m, 12500.0);
    CHECK(r <= prev);
    prev = r;
  }

  CHECK(calibrate_reservoir(1.0, 16) == 0.0);
  CHECK_THROWS_AS(calibrate_reservoir(1.0 / 256.0, 16), NumericError);

  // Monte Carlo yield matches the semi-analytic curve
  auto emitter = ideal_emitter(45.0);
  emitter.reservoir_tau_ps = tau;
  const auto p16 = simulate_emission(emitter, train(400000, 16), 5);
  const double y16 = static_cast<double>(p16.size()) / 400000.0;
  CHECK(y16 == doctest::Approx(0.25).epsilon(0.02));
  const auto p1 = simulate_emission(emitter, train(50000, 1), 5);
  const double y1 = static_cast<double>(p1.size()) / 50000.0;
  CHECK(y16 / y1 == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("detector model") {
  const auto emitter = ideal_emitter(54.0);
  const auto tr = train(50000);
  const auto photons = simulate_emission(emitter, tr, 3);
  const double duration = pulse_lead_in_ps(tr) + tr.n_pulses * tr.period_ps();

  SUBCASE("identity channel reproduces emission times") {
    DetectorModel det;  // eff 1, no jitter, no darks, no dead time
    DetectionAccounting acc;
    const auto s = detect(photons, det, 3, 1, duration, &acc);
    std::vector<double> times;
    for (const auto& p : photons) times.push_back(p.emission_time_ps);
    CHECK(s.tags_ps == quantize_sorted(times));
    CHECK(acc.detected == s.tags_ps.size());
    CHECK(acc.thinned == 0);
  }

  SUBCASE("efficiency thinning and accounting conservation") {
    DetectorModel det;
    det.efficiency = 0.6;
    DetectionAccounting acc;
    const auto s = detect(photons, det, 3, 1, duration, &acc);
    CHECK(acc.input == photons.size());
    CHECK(acc.input == acc.detected + acc.thinned + acc.dead_time_dropped +
                           acc.grid_collisions);
    CHECK(std::abs(static_cast<double>(acc.detected) - 0.6 * acc.input) <
          3.0 * std::sqrt(0.6 * 0.4 * acc.input));
    CHECK(s.tags_ps.size() == acc.detected);
  }

  SUBCASE("dark counts arrive at the configured rate") {
    DetectorModel det;
    det.dark_rate_hz = 5e5;
    DetectionAccounting acc;
    const std::vector<PhotonRecord> none;
    const double dur = 2e10;  // 20 ms
    detect(none, det, 9, 1, dur, &acc);
    const double expected = det.dark_rate_hz * dur * 1e-12;
    CHECK(std::abs(static_cast<double>(acc.dark_added) - expected) <
          3.0 * std::sqrt(expected));
  }

  SUBCASE("dead time prunes close tags") {
    DetectorModel det;
    det.dead_time_ps = 100.0;
    std::vector<PhotonRecord> close;
    for (int i = 0; i < 10; ++i)
      close.push_back({1000.0 + 30.0 * i, 1000.0, 0, 0.0, Polarization::co,
                       PhotonOrigin::emitter});
    DetectionAccounting acc;
    const auto s = detect(close, det, 1, 1, 1e6, &acc);
    // every kept tag is at least dead_time from the previous kept one
    for (std::size_t i = 1; i < s.tags_ps.size(); ++i)
      CHECK(s.tags_ps[i] - s.tags_ps[i - 1] >= 100);
    CHECK(acc.dead_time_dropped > 0);
  }
}

TEST_CASE("poisson photon reference stream") {
  const double rate = 3e-4;
  const auto photons = poisson_photon_records(rate, 1e8, 21);
  const double expected = rate * 1e8;
  CHECK(std::abs(photons.size() - expected) < 4.0 * std::sqrt(expected));
}
