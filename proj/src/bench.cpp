#include "photonkit/bench.hpp"

#include <algorithm>
#include <cmath>

#include "photonkit/constants.hpp"
#include "photonkit/errors.hpp"
#include "photonkit/rng.hpp"
#include "photonkit/source.hpp"

namespace photonkit {

namespace {

constexpr double kTwoPiPerGhzPs = 2.0 * constants::pi * 1e-3;  // rad/ps per GHz

double exp_envelope(double t, double start, double t1) {
  return t >= start ? std::exp(-(t - start) / t1) / t1 : 0.0;
}

// 6-point Gauss-Legendre on [-1, 1]
constexpr double kGlNode[6] = {-0.9324695142031521, -0.6612093864662645,
                               -0.2386191860831969, 0.2386191860831969,
                               0.6612093864662645,  0.9324695142031521};
constexpr double kGlWeight[6] = {0.1713244923791704, 0.3607615730481386,
                                 0.4679139345726910, 0.4679139345726910,
                                 0.3607615730481386, 0.1713244923791704};

template <typename F>
double gl_composite(F&& f, double a, double b, double panel_width) {
  const int n_panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel_width)));
  const double h = (b - a) / n_panels;
  double sum = 0.0;
  for (int p = 0; p < n_panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double s = 0.0;
    for (int i = 0; i < 6; ++i) s += kGlWeight[i] * f(mid + 0.5 * h * kGlNode[i]);
    sum += 0.5 * h * s;
  }
  return sum;
}

}  // namespace

double pair_visibility(double t1_ps, double start_offset_ps, double delta_f_ghz,
                       std::optional<double> t2_pure_ps) {
  const double kappa = 1.0 / t1_ps + (t2_pure_ps ? 2.0 / *t2_pure_ps : 0.0);
  const double omega = kTwoPiPerGhzPs * delta_f_ghz;
  const double lorentz = (kappa / t1_ps) / (kappa * kappa + omega * omega);
  return std::exp(-std::abs(start_offset_ps) / t1_ps) * lorentz;
}

HbtOutput route_hbt(const std::vector<PhotonRecord>& photons, double splitter_ratio,
                    const DetectorModel& detector, std::uint64_t seed,
                    double duration_ps) {
  std::vector<double> arm1, arm2;
  arm1.reserve(photons.size() / 2 + 1);
  arm2.reserve(photons.size() / 2 + 1);
  for (std::size_t i = 0; i < photons.size(); ++i) {
    CounterRng r(seed, rng_stream::hbt_route, i, 0);
    (r.bernoulli(splitter_ratio) ? arm1 : arm2).push_back(photons[i].emission_time_ps);
  }
  HbtOutput out;
  out.ch1 = detect_times(arm1, detector, seed, 1, duration_ps, &out.acc1);
  out.ch2 = detect_times(arm2, detector, seed, 2, duration_ps, &out.acc2);
  return out;
}

HomOutput route_hom(const std::vector<PhotonRecord>& photons, const BenchConfig& bench,
                    double t1_ps, double period_ps, const DetectorModel& detector,
                    std::uint64_t seed, double duration_ps) {
  if (bench.topology != BenchTopology::hom)
    throw std::invalid_argument("route_hom: bench topology is not hom");
  const double delay = bench.delay_ps;
  if (!(delay > 0.0)) throw std::invalid_argument("route_hom: delay must be > 0");

  HomOutput out;
  // pairs only ever meet when the delay is an integer number of pulse periods
  const double phase = std::fmod(delay, period_ps);
  const double window = 3.0 * t1_ps;
  out.delay_period_mismatch =
      std::min(phase, period_ps - phase) > window;

  const double chi =
      bench.polarization_mode == Polarization::co ? 1.0 : 0.0;

  struct Routed {
    double wp_arrival;   // wavepacket origin at the output splitter
    double click_time;   // classical click time (superseded for paired photons)
    bool pairable;       // emitter photons interfere, leak photons do not
    std::size_t index;
  };
  std::vector<Routed> short_arm, long_arm;
  short_arm.reserve(photons.size() / 2 + 1);
  long_arm.reserve(photons.size() / 2 + 1);
  for (std::size_t i = 0; i < photons.size(); ++i) {
    CounterRng r(seed, rng_stream::hom_arm, i, 0);
    const bool go_short = r.bernoulli(bench.splitter_ratio);
    const PhotonRecord& p = photons[i];
    if (go_short) {
      short_arm.push_back({p.wavepacket_origin_ps, p.emission_time_ps,
                           p.origin == PhotonOrigin::emitter, i});
    } else {
      long_arm.push_back({p.wavepacket_origin_ps + delay, p.emission_time_ps + delay,
                          p.origin == PhotonOrigin::emitter, i});
    }
  }
  auto by_arrival = [](const Routed& a, const Routed& b) {
    return a.wp_arrival < b.wp_arrival;
  };
  std::sort(short_arm.begin(), short_arm.end(), by_arrival);
  std::sort(long_arm.begin(), long_arm.end(), by_arrival);

  std::vector<double> ch1, ch2;
  ch1.reserve(photons.size() / 2 + 1);
  ch2.reserve(photons.size() / 2 + 1);
  auto classical_route = [&](const Routed& p, CounterRng& r) {
    (r.bernoulli(bench.splitter_ratio) ? ch1 : ch2).push_back(p.click_time);
    ++out.routed_photons;
  };

  // delay-matched pairing in arrival order, each photon used at most once
  const std::vector<PhotonRecord>& ph = photons;
  const double t1 = t1_ps;
  double vis_sum = 0.0;
  std::size_t ia = 0, ib = 0;
  std::uint64_t pair_idx = 0;
  while (ia < long_arm.size() && ib < short_arm.size()) {
    const Routed& a = long_arm[ia];
    const Routed& b = short_arm[ib];
    const double d = b.wp_arrival - a.wp_arrival;
    if (d < -window) {
      CounterRng r(seed, rng_stream::hom_pair, 1000000000ull + b.index, 0);
      classical_route(b, r);
      ++ib;
      continue;
    }
    if (d > window) {
      CounterRng r(seed, rng_stream::hom_pair, 1000000000ull + a.index, 0);
      classical_route(a, r);
      ++ia;
      continue;
    }
    if (!(a.pairable && b.pairable)) {
      // leak photons pass the splitter without two-photon interference
      CounterRng ra(seed, rng_stream::hom_pair, 1000000000ull + a.index, 0);
      classical_route(a, ra);
      CounterRng rb(seed, rng_stream::hom_pair, 1000000000ull + b.index, 0);
      classical_route(b, rb);
      ++ia;
      ++ib;
      continue;
    }

    // interfering pair
    const double df = ph[b.index].frequency_offset_ghz - ph[a.index].frequency_offset_ghz;
    const double v_pair = pair_visibility(t1, d, df, bench.t2_pure_ps);
    vis_sum += chi * v_pair;
    ++out.interfering_pairs;

    CounterRng r(seed, rng_stream::hom_pair, pair_idx++, 1);
    const bool coincide = r.uniform() < 0.5 * (1.0 - chi * v_pair);

    // joint detection times from the pair density by rejection against the
    // separable envelope mixture q
    const double sa = a.wp_arrival, sb = b.wp_arrival;
    const double omega = kTwoPiPerGhzPs * df;
    const double damp_rate = bench.t2_pure_ps ? 2.0 / *bench.t2_pure_ps : 0.0;
    double t1_click = 0.0, t2_click = 0.0;
    for (int tries = 0;; ++tries) {
      double u = sa + r.exponential(t1);
      double v = sb + r.exponential(t1);
      if (r.bernoulli(0.5)) std::swap(u, v);
      const double x = exp_envelope(u, sa, t1) * exp_envelope(v, sb, t1);
      const double y = exp_envelope(v, sa, t1) * exp_envelope(u, sb, t1);
      const double q = 0.5 * (x + y);
      if (q <= 0.0) continue;
      const double cross = std::sqrt(x * y) * std::cos(omega * (u - v)) *
                           std::exp(-damp_rate * std::abs(u - v));
      // the density is nonnegative by construction; a negative acceptance
      // ratio here would mean the sampler bound is broken
      const double target = coincide ? 0.5 * (x + y) - chi * cross
                                     : 0.25 * (x + y) + 0.5 * chi * cross;
      const double bound = coincide ? 2.0 * q : q;
      const double ratio = target / bound;
      if (ratio < -1e-9) throw NumericError("route_hom: pair density went negative");
      if (r.uniform() < std::max(0.0, ratio) || tries > 100000) {
        t1_click = u;
        t2_click = v;
        break;
      }
    }
    if (coincide) {
      ++out.coincidence_outcomes;
      ch1.push_back(t1_click);
      ch2.push_back(t2_click);
    } else {
      auto& port = r.bernoulli(bench.splitter_ratio) ? ch1 : ch2;
      port.push_back(t1_click);
      port.push_back(t2_click);
    }
    out.routed_photons += 2;
    ++ia;
    ++ib;
  }
  for (; ia < long_arm.size(); ++ia) {
    CounterRng r(seed, rng_stream::hom_pair, 1000000000ull + long_arm[ia].index, 0);
    classical_route(long_arm[ia], r);
  }
  for (; ib < short_arm.size(); ++ib) {
    CounterRng r(seed, rng_stream::hom_pair, 1000000000ull + short_arm[ib].index, 0);
    classical_route(short_arm[ib], r);
  }

  out.mean_pair_visibility =
      out.interfering_pairs ? vis_sum / static_cast<double>(out.interfering_pairs) : 0.0;

  std::sort(ch1.begin(), ch1.end());
  std::sort(ch2.begin(), ch2.end());
  out.ch1 = detect_times(ch1, detector, seed, 1, duration_ps, &out.acc1);
  out.ch2 = detect_times(ch2, detector, seed, 2, duration_ps, &out.acc2);
  return out;
}

double pair_visibility_oracle(double t1_ps, double gamma_inhom_ghz,
                              std::optional<double> t2_pure_ps, double tol) {
  if (!(t1_ps > 0.0)) throw std::domain_error("pair_visibility_oracle: t1 must be > 0");
  const double kappa = 1.0 / t1_ps + (t2_pure_ps ? 2.0 / *t2_pure_ps : 0.0);
  const double t_eff = 1.0 / kappa;

  // inner integral over w = |t1 - t2|: exp(-kappa w) cos(omega w). For
  // oscillatory omega the integrand is folded onto one period (cos is exactly
  // periodic and the exponential factors), leaving a one-period quadrature
  // times an exact geometric tail sum.
  auto b_int = [&](double omega, double refine) {
    if (omega <= 0.0)
      return gl_composite([&](double w) { return std::exp(-kappa * w); }, 0.0,
                          30.0 * t_eff, t_eff / (2.0 * refine));
    const double period = 2.0 * constants::pi / omega;
    if (period > t_eff) {
      const double span = std::min(30.0 * t_eff, 2000.0 * period);
      return gl_composite(
          [&](double w) { return std::exp(-kappa * w) * std::cos(omega * w); }, 0.0,
          span, std::min(t_eff / 2.0, period / 8.0) / refine);
    }
    const double one_period = gl_composite(
        [&](double w) { return std::exp(-kappa * w) * std::cos(omega * w); }, 0.0,
        period, period / (8.0 * refine));
    return one_period / -std::expm1(-kappa * period);
  };

  // W(df): (u1, w) quadrature of the interference cross term
  auto w_of = [&](double df_ghz, double refine) {
    const double omega = kTwoPiPerGhzPs * df_ghz;
    const double a_int = gl_composite([&](double u) { return std::exp(-2.0 * u / t1_ps); },
                                      0.0, 12.0 * t1_ps, t1_ps / (2.0 * refine));
    return 2.0 / (t1_ps * t1_ps) * a_int * b_int(omega, refine);
  };

  if (gamma_inhom_ghz <= 0.0) {
    const double v1 = w_of(0.0, 1.0), v2 = w_of(0.0, 2.0);
    if (std::abs(v2 - v1) > tol)
      throw NumericError("pair_visibility_oracle: quadrature achieved only " +
                         std::to_string(std::abs(v2 - v1)));
    return v2;
  }

  // pair detuning: difference of two i.i.d. Gaussian offsets with FWHM Gamma
  const double sigma_pair =
      std::sqrt(2.0) * gamma_inhom_ghz / constants::fwhm_over_sigma;
  const double norm = 1.0 / (std::sqrt(2.0 * constants::pi) * sigma_pair);
  const double w_scale_ghz = 1000.0 / (2.0 * constants::pi * t1_ps);

  // graded mesh in df: fine where W is peaked, growing outward, never coarser
  // than the Gaussian needs
  auto integrate = [&](double refine) {
    const double p0 = std::min(sigma_pair / 4.0, w_scale_ghz / 2.0) / refine;
    const double hi = 6.0 * sigma_pair;
    double df = 0.0, sum = 0.0;
    while (df < hi) {
      const double width =
          std::min({sigma_pair / (4.0 * refine), std::max(p0, df / (6.0 * refine)),
                    hi - df});
      sum += gl_composite(
          [&](double x) {
            const double rho =
                norm * std::exp(-0.5 * x * x / (sigma_pair * sigma_pair));
            return rho * w_of(x, refine);
          },
          df, df + width, width);
      df += width;
    }
    return 2.0 * sum;
  };

  const double v1 = integrate(1.0);
  const double v2 = integrate(1.6);
  if (std::abs(v2 - v1) > tol)
    throw NumericError("pair_visibility_oracle: quadrature achieved only " +
                       std::to_string(std::abs(v2 - v1)));
  return v2;
}

}  // namespace photonkit
