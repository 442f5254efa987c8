#include "photonkit/bench.hpp"

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "photonkit/correlator.hpp"
#include "photonkit/errors.hpp"
#include "photonkit/physics.hpp"
#include "photonkit/source.hpp"

using namespace photonkit;

namespace {

struct Setup {
  EmitterConfig emitter;
  PulseTrain train;
  DetectorModel detector;
  double duration;
};

Setup make_setup(std::uint64_t n_pulses, double t1 = 54.0) {
  Setup s;
  s.emitter.t1_free_ps = 680.0;
  s.emitter.purcell_factor = 680.0 / t1;
  s.emitter.gamma_inhom_ghz = 0.0;
  s.train.base_rate_mhz = 80.0;
  s.train.multiplier = 1;
  s.train.pulse_fwhm_ps = 0.0;
  s.train.n_pulses = n_pulses;
  s.duration = pulse_lead_in_ps(s.train) + (n_pulses + 2) * s.train.period_ps();
  return s;
}

BenchConfig hom_bench(double delay, Polarization pol,
                      std::optional<double> t2 = std::nullopt) {
  BenchConfig b;
  b.topology = BenchTopology::hom;
  b.delay_ps = delay;
  b.polarization_mode = pol;
  b.t2_pure_ps = t2;
  return b;
}

}  // namespace

TEST_CASE("hbt splits photons binomially") {
  const auto s = make_setup(100000);
  const auto photons = simulate_emission(s.emitter, s.train, 1);
  const auto out = route_hbt(photons, 0.5, s.detector, 1, s.duration);
  const double n = static_cast<double>(photons.size());
  CHECK(std::abs(static_cast<double>(out.ch1.tags_ps.size()) - 0.5 * n) <
        3.0 * std::sqrt(0.25 * n));
  CHECK(out.ch1.tags_ps.size() + out.ch2.tags_ps.size() == photons.size());
}

TEST_CASE("single-photon stream has an empty hbt center peak") {
  const auto s = make_setup(200000);
  const auto photons = simulate_emission(s.emitter, s.train, 2);
  const auto out = route_hbt(photons, 0.5, s.detector, 2, s.duration);
  const auto h = cross_correlate(out.ch1, out.ch2, 100.0, 3.5 * 12500.0);
  const auto g2 = g2_zero(h, 12500.0);
  CHECK(g2.value < 0.01);
}

TEST_CASE("leaky source center peak matches the pair-origin expectation") {
  auto s = make_setup(300000);
  s.emitter.leak_rate = 0.08;
  s.emitter.reexcite_prob = 0.02;
  const auto photons = simulate_emission(s.emitter, s.train, 3);
  const auto out = route_hbt(photons, 0.5, s.detector, 3, s.duration);
  const auto h = cross_correlate(out.ch1, out.ch2, 100.0, 3.5 * 12500.0);
  const auto g2 = g2_zero(h, 12500.0);
  const double expected = pk_oracle::g2_expectation(1.0, 0.02, 0.08);
  CHECK(std::abs(g2.value - expected) < 4.0 * g2.sigma + 0.003);
}

TEST_CASE("perfect interference sends no pairs to opposite ports") {
  const auto s = make_setup(50000);
  const auto photons = simulate_emission(s.emitter, s.train, 4);
  const auto bench = hom_bench(12500.0, Polarization::co);
  const auto out = route_hom(photons, bench, 54.0, 12500.0, s.detector, 4, s.duration);
  CHECK(out.interfering_pairs > 10000);
  CHECK(out.coincidence_outcomes == 0);
  CHECK(out.mean_pair_visibility == doctest::Approx(1.0));
  CHECK_FALSE(out.delay_period_mismatch);

  const auto h = cross_correlate(out.ch1, out.ch2, 100.0, 3.5 * 12500.0);
  const auto peaks = integrate_peaks(h, 12500.0);
  CHECK(peaks.center_area == 0.0);
}

TEST_CASE("photon number is conserved through the bench") {
  auto s = make_setup(30000);
  s.emitter.leak_rate = 0.1;
  s.emitter.gamma_inhom_ghz = 5.0;
  const auto photons = simulate_emission(s.emitter, s.train, 5);
  const auto bench = hom_bench(12500.0, Polarization::co, 300.0);
  const auto out = route_hom(photons, bench, 54.0, 12500.0, s.detector, 5, s.duration);
  CHECK(out.routed_photons == photons.size());
  CHECK(out.ch1.tags_ps.size() + out.ch2.tags_ps.size() <= photons.size());
}

TEST_CASE("cross-polarized center peak is classical and co/cross side peaks agree") {
  auto s = make_setup(120000);
  s.emitter.gamma_inhom_ghz = 9.7;  // strong spectral diffusion
  const auto photons = simulate_emission(s.emitter, s.train, 6);
  const auto co = route_hom(photons, hom_bench(12500.0, Polarization::co), 54.0,
                            12500.0, s.detector, 6, s.duration);
  const auto cross = route_hom(photons, hom_bench(12500.0, Polarization::cross), 54.0,
                               12500.0, s.detector, 6, s.duration);

  const auto h_co = cross_correlate(co.ch1, co.ch2, 250.0, 3.5 * 12500.0);
  const auto h_cross = cross_correlate(cross.ch1, cross.ch2, 250.0, 3.5 * 12500.0);
  const auto p_co = integrate_peaks(h_co, 12500.0);
  const auto p_cross = integrate_peaks(h_cross, 12500.0);

  // side peaks are chi-independent within counting errors
  for (std::size_t k = 0; k < p_co.side_areas.size(); ++k) {
    const double diff = p_co.side_areas[k] - p_cross.side_areas[k];
    const double sigma = std::sqrt(p_co.side_areas[k] + p_cross.side_areas[k]);
    CHECK(std::abs(diff) < 4.0 * sigma);
  }

  // chi = 0: center = half of a side peak (interfering combo is 1 of 4, and
  // the two non-interfering same-delay combos land on the +-1 peaks)
  const double v_raw = hom_visibility(h_co, h_cross, 12500.0).v_raw;
  const double v_expected = pair_visibility_oracle(54.0, 9.7);
  CHECK(std::abs(v_raw - v_expected) < 0.02);
}

TEST_CASE("monte carlo visibility matches the quadrature oracle") {
  auto s = make_setup(150000);
  s.emitter.gamma_inhom_ghz = 5.0;
  const auto photons = simulate_emission(s.emitter, s.train, 7);
  const auto co = route_hom(photons, hom_bench(12500.0, Polarization::co), 54.0,
                            12500.0, s.detector, 7, s.duration);
  const auto cross = route_hom(photons, hom_bench(12500.0, Polarization::cross), 54.0,
                               12500.0, s.detector, 7, s.duration);
  const auto h_co = cross_correlate(co.ch1, co.ch2, 250.0, 3.5 * 12500.0);
  const auto h_cross = cross_correlate(cross.ch1, cross.ch2, 250.0, 3.5 * 12500.0);
  const auto rep = hom_visibility(h_co, h_cross, 12500.0);
  const double oracle = pair_visibility_oracle(54.0, 5.0);
  CHECK(std::abs(rep.v_raw - oracle) < 0.02);
}

TEST_CASE("oracle limits and closed-form agreement") {
  CHECK(pair_visibility_oracle(54.0, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(pair_visibility_oracle(5e4, 5.0) < 0.02);  // long-lifetime limit

  // spot agreement with the analytic form (full grid in the acceptance suite)
  for (const auto& [t1, gam] : std::vector<std::pair<double, double>>{
           {30.0, 5.95}, {54.0, 3.0}, {200.0, 1.0}, {700.0, 8.0}, {20.0, 0.5}}) {
    const double a = physics::visibility_inhomogeneous(t1, gam);
    const double o = pair_visibility_oracle(t1, gam);
    CHECK(std::abs(a - o) < 0.02);
  }
}

TEST_CASE("pure dephasing damps the pair visibility like the markov factor") {
  // T2' chosen from a dephasing linewidth reproduces gamma/(gamma+gamma*)
  const double t1 = 27.2;
  const double gamma_star = physics::phonon_dephasing_uev(3.0, 1.0, 30.0);
  const double t2p = physics::t2_pure_from_dephasing_uev(gamma_star);
  const double markov = physics::fourier_linewidth_uev(t1) /
                        (physics::fourier_linewidth_uev(t1) + gamma_star);
  CHECK(pair_visibility(t1, 0.0, 0.0, t2p) == doctest::Approx(markov).epsilon(1e-12));
  CHECK(pair_visibility_oracle(t1, 0.0, t2p) == doctest::Approx(markov).epsilon(1e-5));
}

TEST_CASE("delay-period mismatch sets the warning flag") {
  const auto s = make_setup(2000);
  const auto photons = simulate_emission(s.emitter, s.train, 8);
  const auto out = route_hom(photons, hom_bench(7000.0, Polarization::co), 54.0,
                             12500.0, s.detector, 8, s.duration);
  CHECK(out.delay_period_mismatch);
  CHECK(out.interfering_pairs == 0);
}

TEST_CASE("dephased co and cross center areas are statistically identical") {
  // complete pure dephasing turns the interference term off; the co-polarized
  // run must then be indistinguishable from the cross-polarized one
  std::vector<double> co_areas, cross_areas;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto s = make_setup(30000);
    s.emitter.gamma_inhom_ghz = 3.0;
    const auto photons = simulate_emission(s.emitter, s.train, 100 + seed);
    const auto co = route_hom(photons, hom_bench(12500.0, Polarization::co, 0.05),
                              54.0, 12500.0, s.detector, 100 + seed, s.duration);
    const auto cross = route_hom(photons, hom_bench(12500.0, Polarization::cross),
                                 54.0, 12500.0, s.detector, 100 + seed, s.duration);
    co_areas.push_back(
        integrate_peaks(cross_correlate(co.ch1, co.ch2, 250.0, 3.5 * 12500.0), 12500.0)
            .center_area);
    cross_areas.push_back(
        integrate_peaks(cross_correlate(cross.ch1, cross.ch2, 250.0, 3.5 * 12500.0),
                        12500.0)
            .center_area);
  }
  // two-sample KS at alpha ~ 0.01 for n = m = 8: critical D ~ 0.79
  CHECK(pk_oracle::ks_statistic(co_areas, cross_areas) < 0.79);
}
