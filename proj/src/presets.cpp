#include "photonkit/presets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "photonkit/analysis.hpp"
#include "photonkit/bench.hpp"
#include "photonkit/constants.hpp"
#include "photonkit/correlator.hpp"
#include "photonkit/errors.hpp"
#include "photonkit/physics.hpp"
#include "photonkit/rng.hpp"
#include "photonkit/source.hpp"
#include "photonkit/timetags.hpp"

namespace photonkit {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
}

double run_duration_ps(const RunConfig& c) {
  const double period = c.train.period_ps();
  double d = pulse_lead_in_ps(c.train) +
             static_cast<double>(c.train.n_pulses + 2) * period;
  if (c.bench.topology == BenchTopology::hom) d += c.effective_delay_ps();
  return d;
}

const char* origin_name(PhotonOrigin o) {
  switch (o) {
    case PhotonOrigin::emitter: return "emitter";
    case PhotonOrigin::leak: return "leak";
    case PhotonOrigin::dark: return "dark";
  }
  return "?";
}

json accounting_json(const DetectionAccounting& a) {
  return json{{"input", a.input},
              {"detected", a.detected},
              {"thinned", a.thinned},
              {"dead_time_dropped", a.dead_time_dropped},
              {"grid_collisions", a.grid_collisions},
              {"dark_added", a.dark_added}};
}

struct CheckList {
  std::vector<std::string> lines;
  bool all_ok = true;
  void add(bool ok, const std::string& what) {
    lines.push_back((ok ? "ok: " : "FAIL: ") + what);
    all_ok = all_ok && ok;
  }
};

// Monte Carlo HOM visibility for one (emitter, bench) configuration
VisibilityReport mc_hom_visibility(const EmitterConfig& emitter, PulseTrain train,
                                   std::optional<double> t2_pure,
                                   const DetectorModel& detector, std::uint64_t seed,
                                   int threads, double g2_value = 0.0,
                                   double b_factor = 1.0,
                                   std::uint64_t* pairs_out = nullptr) {
  const double period = train.period_ps();
  const double duration =
      pulse_lead_in_ps(train) + static_cast<double>(train.n_pulses + 2) * period + period;
  const auto photons = simulate_emission(emitter, train, seed);

  BenchConfig bench;
  bench.topology = BenchTopology::hom;
  bench.delay_ps = period;
  bench.t2_pure_ps = t2_pure;
  bench.polarization_mode = Polarization::co;
  const auto co =
      route_hom(photons, bench, emitter.t1_ps(), period, detector, seed, duration);
  bench.polarization_mode = Polarization::cross;
  const auto cross =
      route_hom(photons, bench, emitter.t1_ps(), period, detector, seed, duration);
  if (pairs_out) *pairs_out = co.interfering_pairs;

  const double bin = period / 125.0;
  const auto h_co = cross_correlate(co.ch1, co.ch2, bin, 3.5 * period, threads);
  const auto h_cross = cross_correlate(cross.ch1, cross.ch2, bin, 3.5 * period, threads);
  return hom_visibility(h_co, h_cross, period, g2_value, b_factor);
}

// multi-photon budget: picks (reexcite, leak) with reexcite = split * s,
// leak = (1-split) * s such that the pulsed g2(0) expectation hits target
std::pair<double, double> solve_multiphoton_budget(double target_g2, double split) {
  auto g2_of = [&](double s) {
    const double p_re = split * s, leak = (1.0 - split) * s;
    const double e_m = 1.0 + p_re;
    const double e_m2 = 1.0 + 3.0 * p_re;
    const double e_n = e_m + leak;
    const double e_n2 = e_m2 + 2.0 * e_m * leak + leak + leak * leak;
    return (e_n2 - e_n) / (e_n * e_n);
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g2_of(mid) < target_g2 ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  return {split * s, (1.0 - split) * s};
}

}  // namespace

std::vector<fs::path> run_simulate(const RunConfig& config, const fs::path& out_dir) {
  validate(config);
  fs::create_directories(out_dir);
  std::vector<fs::path> files;

  const auto photons = simulate_emission(config.emitter, config.train, config.seed);
  const double period = config.train.period_ps();
  const double duration = run_duration_ps(config);
  const auto hash = config_hash(config);

  TimeTagStream ch1, ch2;
  DetectionAccounting acc1, acc2;
  bool delay_mismatch = false;
  if (config.bench.topology == BenchTopology::hbt) {
    auto out = route_hbt(photons, config.bench.splitter_ratio, config.detector,
                         config.seed, duration);
    ch1 = std::move(out.ch1);
    ch2 = std::move(out.ch2);
    acc1 = out.acc1;
    acc2 = out.acc2;
  } else {
    BenchConfig bench = config.bench;
    bench.delay_ps = config.effective_delay_ps();
    auto out = route_hom(photons, bench, config.emitter.t1_ps(), period,
                         config.detector, config.seed, duration);
    ch1 = std::move(out.ch1);
    ch2 = std::move(out.ch2);
    acc1 = out.acc1;
    acc2 = out.acc2;
    delay_mismatch = out.delay_period_mismatch;
  }
  ch1.config_hash = hash;
  ch2.config_hash = hash;
  ch1.seed = config.seed;
  ch2.seed = config.seed;

  const fs::path f1 = out_dir / "ch1.ptt";
  const fs::path f2 = out_dir / "ch2.ptt";
  write_timetags(f1, ch1);
  write_timetags(f2, ch2);
  files.push_back(f1);
  files.push_back(f2);

  if (config.truth_sidecar) {
    std::string csv = "emission_time_ps,pulse_index,freq_offset_GHz,origin\n";
    for (const auto& p : photons) {
      csv += fmt(p.emission_time_ps);
      csv += ',';
      csv += std::to_string(p.pulse_index);
      csv += ',';
      csv += fmt(p.frequency_offset_ghz);
      csv += ',';
      csv += origin_name(p.origin);
      csv += '\n';
    }
    const fs::path ft = out_dir / "truth.csv";
    write_text(ft, csv);
    files.push_back(ft);
  }

  json payload;
  payload["photons_emitted"] = photons.size();
  payload["pulse_period_ps"] = period;
  payload["effective_delay_ps"] = config.effective_delay_ps();
  payload["delay_period_mismatch"] = delay_mismatch;
  payload["ch1"] = accounting_json(acc1);
  payload["ch2"] = accounting_json(acc2);
  payload["files"] = json::array({f1.filename().string(), f2.filename().string()});
  const fs::path fj = out_dir / "run_summary.json";
  write_text(fj, stamp_result_document(payload.dump(), config));
  files.push_back(fj);
  return files;
}

fs::path run_correlate(const fs::path& file_a, const fs::path& file_b,
                       double bin_width_ps, double range_ps, int threads,
                       const fs::path& out_csv) {
  constexpr std::size_t chunk = 1u << 21;
  TimeTagFileReader ra(file_a), rb(file_b);
  auto src = [](TimeTagFileReader& r) {
    return [&r](std::vector<std::uint64_t>& out) { return r.read_chunk(out, chunk); };
  };
  const auto hist =
      cross_correlate_stream(src(ra), src(rb), bin_width_ps, range_ps, threads);
  write_histogram_csv(out_csv, hist);
  return out_csv;
}

fs::path analyze_hbt(const fs::path& a, const fs::path& b, double period_ps,
                     int threads, const RunConfig& config, const fs::path& out_json) {
  const auto sa = read_timetags(a);
  const auto sb = read_timetags(b);
  const auto h =
      cross_correlate(sa, sb, period_ps / 125.0, 3.5 * period_ps, threads);
  const auto g2 = g2_zero(h, period_ps);
  write_text(out_json, stamp_result_document(g2_result_to_json(g2, period_ps), config));
  return out_json;
}

fs::path analyze_hom(const fs::path& co_a, const fs::path& co_b, const fs::path& cross_a,
                     const fs::path& cross_b, double period_ps, double g2_zero_value,
                     double b_factor, int threads, const RunConfig& config,
                     const fs::path& out_json) {
  const auto h_co = cross_correlate(read_timetags(co_a), read_timetags(co_b),
                                    period_ps / 125.0, 3.5 * period_ps, threads);
  const auto h_cross = cross_correlate(read_timetags(cross_a), read_timetags(cross_b),
                                       period_ps / 125.0, 3.5 * period_ps, threads);
  const auto rep = hom_visibility(h_co, h_cross, period_ps, g2_zero_value, b_factor);
  write_text(out_json, stamp_result_document(visibility_report_to_json(rep), config));
  return out_json;
}

fs::path analyze_lifetime(const fs::path& a, double period_ps, double bin_ps,
                          const std::string& model, std::optional<double> irf_sigma_ps,
                          const RunConfig& config, const fs::path& out_json) {
  const auto s = read_timetags(a);
  const auto h = fold_decay(s.tags_ps, period_ps, bin_ps, 0.1);
  DecayModel m;
  if (model == "exp")
    m = DecayModel::exp;
  else if (model == "biexp")
    m = DecayModel::biexp;
  else if (model == "exp_irf")
    m = DecayModel::exp_irf;
  else
    throw ConfigError("analyze_lifetime: unknown model '" + model + "'");

  // fit from the histogram maximum onward (tail fit) unless reconvolving
  std::span<const double> t(h.t_ps), y(h.counts);
  std::size_t start = 0;
  if (m != DecayModel::exp_irf) {
    start = static_cast<std::size_t>(
        std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin());
  }
  const auto fit = fit_decay(t.subspan(start), y.subspan(start), m, irf_sigma_ps);
  write_text(out_json, stamp_result_document(fit_result_to_json(fit), config));
  return out_json;
}

fs::path run_sweep(const RunConfig& config, const std::vector<int>& multipliers,
                   const fs::path& out_dir) {
  validate(config);
  fs::create_directories(out_dir);
  const auto result =
      rate_sweep(config.emitter, config.detector, config.train, multipliers,
                 multipliers, 2.0, config.seed, config.threads);

  std::string csv =
      "multiplier,rate_mhz,yield_per_pulse,rate_rel_linear,g2_zero,g2_sigma,v_raw,"
      "v_raw_err,v_corrected\n";
  for (const auto& r : result.rows) {
    csv += std::to_string(r.multiplier) + ',' + fmt(r.rate_mhz) + ',' +
           fmt(r.yield_per_pulse) + ',' + fmt(r.rate_rel_linear);
    if (r.quantum_optics) {
      csv += ',' + fmt(r.g2.value) + ',' + fmt(r.g2.sigma) + ',' + fmt(r.vis.v_raw) +
             ',' + fmt(r.vis.v_raw_err) + ',' + fmt(r.vis.v_corrected);
    } else {
      csv += ",,,,,";
    }
    csv += '\n';
  }
  const fs::path f = out_dir / "rate_sweep.csv";
  write_text(f, csv);
  return f;
}

// ---------------------------------------------------------------------------
// figure-reproduction presets

namespace {

PresetResult preset_fig4a(const fs::path& out_dir, std::uint64_t seed, int threads) {
  PresetResult res;
  res.name = "fig4a";
  CheckList checks;

  // linewidths calibrated on the two anchor visibilities
  const double gamma_p = physics::calibrate_gamma_inhom(30.0, 0.76);
  const double gamma_s = physics::calibrate_gamma_inhom(41.7, 0.88);
  checks.add(gamma_p >= 2.5 && gamma_p <= 6.0,
             "p-shell linewidth in the 2.5-6 GHz band: " + fmt(gamma_p));
  checks.add(gamma_s >= 2.0 && gamma_s <= 6.0,
             "s-shell linewidth near the band floor: " + fmt(gamma_s));
  const double v45 = physics::visibility_inhomogeneous(45.0, gamma_p);
  checks.add(std::abs(v45 - 0.64) <= 0.02,
             "anchor pair: V(45 ps) = " + fmt(v45) + " within 0.02 of 0.64");

  std::string csv = "t1_ps,v_pshell,v_sshell\n";
  for (double t1 = 20.0; t1 <= 700.0; t1 += 5.0) {
    csv += fmt(t1) + ',' + fmt(physics::visibility_inhomogeneous(t1, gamma_p)) + ',' +
           fmt(physics::visibility_inhomogeneous(t1, gamma_s)) + '\n';
  }
  const fs::path fc = out_dir / "fig4a_curves.csv";
  write_text(fc, csv);
  res.files.push_back(fc);

  // quadrature oracle agreement along both curves
  for (const double t1 : {25.0, 60.0, 150.0, 400.0, 700.0}) {
    for (const double g : {gamma_p, gamma_s}) {
      const double a = physics::visibility_inhomogeneous(t1, g);
      const double o = pair_visibility_oracle(t1, g);
      checks.add(std::abs(a - o) <= 0.02, "analytic vs quadrature at t1 = " + fmt(t1) +
                                              ", gamma = " + fmt(g) + ": diff " +
                                              fmt(a - o));
    }
  }

  // Monte Carlo points alongside the analytic curves
  EmitterConfig emitter;
  emitter.t1_free_ps = 680.0;
  DetectorModel detector;
  PulseTrain train;
  train.pulse_fwhm_ps = 2.0;
  train.n_pulses = 120000;
  std::string mc_csv = "t1_ps,gamma_ghz,v_mc,v_mc_err,v_analytic\n";
  int mc_index = 0;
  for (const auto& [t1, gam] : std::vector<std::pair<double, double>>{
           {26.9, gamma_p}, {54.0, gamma_p}, {41.7, gamma_s}}) {
    emitter.purcell_factor = 680.0 / t1;
    emitter.gamma_inhom_ghz = gam;
    const auto rep = mc_hom_visibility(emitter, train, std::nullopt, detector,
                                       seed + 10 + mc_index++, threads);
    const double v_a = physics::visibility_inhomogeneous(t1, gam);
    mc_csv += fmt(t1) + ',' + fmt(gam) + ',' + fmt(rep.v_raw) + ',' +
              fmt(rep.v_raw_err) + ',' + fmt(v_a) + '\n';
    checks.add(std::abs(rep.v_raw - v_a) <= 0.03,
               "monte carlo vs analytic at t1 = " + fmt(t1) + ": " + fmt(rep.v_raw) +
                   " vs " + fmt(v_a));
  }
  const fs::path fm = out_dir / "fig4a_mc_points.csv";
  write_text(fm, mc_csv);
  res.files.push_back(fm);

  RunConfig stamp_cfg;
  stamp_cfg.seed = seed;
  json payload;
  payload["gamma_pshell_ghz"] = gamma_p;
  payload["gamma_sshell_ghz"] = gamma_s;
  payload["checks"] = checks.lines;
  payload["all_pass"] = checks.all_ok;
  const fs::path fj = out_dir / "fig4a_summary.json";
  write_text(fj, stamp_result_document(payload.dump(), stamp_cfg));
  res.files.push_back(fj);
  res.checks = checks.lines;
  res.all_pass = checks.all_ok;
  return res;
}

PresetResult preset_fig4d(const fs::path& out_dir, std::uint64_t seed, int threads) {
  PresetResult res;
  res.name = "fig4d";
  CheckList checks;

  const double gamma = 2.5;  // band-floor quasi-resonant linewidth
  const double b_factor = 2.0, g2_value = 0.05;
  const std::vector<double> fps = {1.7, 12.6, 25.0};

  EmitterConfig base;
  base.t1_free_ps = 680.0;
  base.gamma_inhom_ghz = gamma;
  base.alpha_uev = 3.0;
  base.e_phonon_mev = 1.0;

  std::string csv = "temperature_k";
  for (const double fp : fps)
    csv += ",v_raw_fp" + fmt(fp) + ",v_corr_fp" + fmt(fp);
  csv += '\n';

  bool ordered_raw = true, ordered_corr = true;
  double corr_fp25_at_30k = 0.0;
  for (double t = 5.0; t <= 45.0 + 1e-9; t += 0.5) {
    csv += fmt(t);
    double prev_raw = -1.0, prev_corr = -1.0;
    for (const double fp : fps) {
      EmitterConfig e = base;
      e.purcell_factor = fp;
      e.temperature_k = t;
      const double raw = physics::visibility_temperature(e);
      const double corr =
          physics::correct_visibility(raw, g2_value, b_factor).v_corrected;
      csv += ',' + fmt(raw) + ',' + fmt(corr);
      if (raw <= prev_raw) ordered_raw = false;
      if (corr < prev_corr || (corr == prev_corr && corr < 1.0)) ordered_corr = false;
      prev_raw = raw;
      prev_corr = corr;
      if (fp == 25.0 && std::abs(t - 30.0) < 1e-9) corr_fp25_at_30k = corr;
    }
    csv += '\n';
  }
  const fs::path fc = out_dir / "fig4d_curves.csv";
  write_text(fc, csv);
  res.files.push_back(fc);

  checks.add(corr_fp25_at_30k > 0.60,
             "corrected visibility at 30 K for F_P = 25: " + fmt(corr_fp25_at_30k));
  checks.add(ordered_raw, "raw curves strictly ordered in F_P at every temperature");
  checks.add(ordered_corr, "corrected curves ordered in F_P at every temperature");

  // Monte Carlo spot checks: thermal dephasing enters as the pair-damping
  // coherence time T2' = 2 hbar / gamma*(T)
  DetectorModel detector;
  PulseTrain train;
  train.pulse_fwhm_ps = 2.0;
  train.n_pulses = 150000;
  std::string mc_csv = "temperature_k,fp,v_mc_raw,v_mc_err,v_analytic_raw\n";
  int idx = 0;
  for (const double t : {10.0, 30.0}) {
    EmitterConfig e = base;
    e.purcell_factor = 25.0;
    e.temperature_k = t;
    const double gamma_star = physics::phonon_dephasing_uev(e);
    const double t2p = physics::t2_pure_from_dephasing_uev(gamma_star);
    const auto rep = mc_hom_visibility(e, train, t2p, detector, seed + 20 + idx++,
                                       threads);
    const double v_a = physics::visibility_temperature(e);
    mc_csv += fmt(t) + ",25," + fmt(rep.v_raw) + ',' + fmt(rep.v_raw_err) + ',' +
              fmt(v_a) + '\n';
    checks.add(std::abs(rep.v_raw - v_a) <= 0.035,
               "monte carlo vs analytic at " + fmt(t) + " K: " + fmt(rep.v_raw) +
                   " vs " + fmt(v_a));
  }
  const fs::path fm = out_dir / "fig4d_mc_points.csv";
  write_text(fm, mc_csv);
  res.files.push_back(fm);

  RunConfig stamp_cfg;
  stamp_cfg.seed = seed;
  json payload;
  payload["gamma_inhom_ghz"] = gamma;
  payload["b_factor"] = b_factor;
  payload["g2_zero_assumed"] = g2_value;
  payload["corr_fp25_at_30k"] = corr_fp25_at_30k;
  payload["checks"] = checks.lines;
  payload["all_pass"] = checks.all_ok;
  const fs::path fj = out_dir / "fig4d_summary.json";
  write_text(fj, stamp_result_document(payload.dump(), stamp_cfg));
  res.files.push_back(fj);
  res.checks = checks.lines;
  res.all_pass = checks.all_ok;
  return res;
}

PresetResult preset_fig5f(const fs::path& out_dir, std::uint64_t seed, int threads) {
  PresetResult res;
  res.name = "fig5f";
  CheckList checks;

  const std::vector<int> multipliers = {1, 2, 4, 8, 16};
  const std::vector<int> qo = {1, 16};

  struct Variant {
    const char* name;
    double tau_h;
    double gamma;
    double g2_target;
    double reexc, leak;
    double t1;
  };
  const double tau_s = calibrate_reservoir(0.25, 16);
  auto [re_s, leak_s] = solve_multiphoton_budget(0.086, 0.7);
  auto [re_p, leak_p] = solve_multiphoton_budget(0.039, 0.5);
  const std::vector<Variant> variants = {
      {"sshell", tau_s, physics::calibrate_gamma_inhom(41.7, 0.88), 0.086, re_s, leak_s,
       45.0},
      {"pshell", 350.0, physics::calibrate_gamma_inhom(30.0, 0.76), 0.039, re_p, leak_p,
       45.0},
  };

  std::string csv =
      "config,multiplier,rate_mhz,yield_per_pulse,rate_rel_linear,g2_zero,g2_sigma,"
      "v_raw,v_raw_err,v_corrected\n";
  json payload;
  payload["reservoir_tau_sshell_ps"] = tau_s;
  payload["reservoir_tau_pshell_ps"] = 350.0;

  int vseed = 0;
  for (const auto& v : variants) {
    EmitterConfig e;
    e.t1_free_ps = 680.0;
    e.purcell_factor = 680.0 / v.t1;
    e.gamma_inhom_ghz = v.gamma;
    e.reservoir_tau_ps = v.tau_h;
    e.reexcite_prob = v.reexc;
    e.leak_rate = v.leak;
    DetectorModel det;
    PulseTrain train;
    train.pulse_fwhm_ps = v.g2_target > 0.05 ? 8.0 : 2.0;
    train.n_pulses = 60000;

    const double b_factor = v.g2_target > 0.05 ? 1.0 : 2.0;
    const auto sweep = rate_sweep(e, det, train, multipliers, qo, b_factor,
                                  seed + 100 * (++vseed), threads);

    const RateSweepRow* row1 = nullptr;
    const RateSweepRow* row16 = nullptr;
    double prev_ratio = 1.0 + 1e-9;
    bool monotone = true;
    for (const auto& r : sweep.rows) {
      csv += std::string(v.name) + ',' + std::to_string(r.multiplier) + ',' +
             fmt(r.rate_mhz) + ',' + fmt(r.yield_per_pulse) + ',' +
             fmt(r.rate_rel_linear);
      if (r.quantum_optics) {
        csv += ',' + fmt(r.g2.value) + ',' + fmt(r.g2.sigma) + ',' + fmt(r.vis.v_raw) +
               ',' + fmt(r.vis.v_raw_err) + ',' + fmt(r.vis.v_corrected);
      } else {
        csv += ",,,,,";
      }
      csv += '\n';
      if (r.rate_rel_linear > prev_ratio + 0.02) monotone = false;
      prev_ratio = r.rate_rel_linear;
      if (r.multiplier == 1) row1 = &r;
      if (r.multiplier == 16) row16 = &r;
      if (v.g2_target > 0.05 && r.multiplier == 4)
        checks.add(r.rate_rel_linear >= 0.90,
                   std::string(v.name) + " x4 stays within 10% of linear: " +
                       fmt(r.rate_rel_linear));
    }
    checks.add(monotone, std::string(v.name) + " normalized rates monotone");
    if (v.g2_target > 0.05) {
      checks.add(std::abs(row16->rate_rel_linear - 0.25) <= 0.05,
                 std::string(v.name) + " x16 saturates to 0.25: " +
                     fmt(row16->rate_rel_linear));
    } else {
      checks.add(row16->rate_rel_linear >= 0.8,
                 std::string(v.name) + " x16 stays near linear: " +
                     fmt(row16->rate_rel_linear));
      // quantum optics at GHz matches the 80 MHz values within errors
      const double dg2 = std::abs(row16->g2.value - row1->g2.value);
      const double sg2 =
          std::sqrt(row16->g2.sigma * row16->g2.sigma + row1->g2.sigma * row1->g2.sigma);
      checks.add(dg2 <= 3.0 * sg2, std::string(v.name) + " g2(0) x16 vs x1: " +
                                       fmt(row16->g2.value) + " vs " +
                                       fmt(row1->g2.value));
      const double dv = std::abs(row16->vis.v_raw - row1->vis.v_raw);
      const double sv = std::sqrt(row16->vis.v_raw_err * row16->vis.v_raw_err +
                                  row1->vis.v_raw_err * row1->vis.v_raw_err);
      checks.add(dv <= 3.0 * sv, std::string(v.name) + " V x16 vs x1: " +
                                     fmt(row16->vis.v_raw) + " vs " +
                                     fmt(row1->vis.v_raw));
    }
  }

  const fs::path fc = out_dir / "fig5f_rates.csv";
  write_text(fc, csv);
  res.files.push_back(fc);

  RunConfig stamp_cfg;
  stamp_cfg.seed = seed;
  payload["checks"] = checks.lines;
  payload["all_pass"] = checks.all_ok;
  const fs::path fj = out_dir / "fig5f_summary.json";
  write_text(fj, stamp_result_document(payload.dump(), stamp_cfg));
  res.files.push_back(fj);
  res.checks = checks.lines;
  res.all_pass = checks.all_ok;
  return res;
}

PresetResult preset_fig2e(const fs::path& out_dir, std::uint64_t seed, int threads) {
  (void)threads;
  PresetResult res;
  res.name = "fig2e";
  CheckList checks;

  CavityModel cav;
  cav.lambda_c0_nm = 920.0;
  cav.tuning_slope = 1.3;
  cav.q_factor = 250.0;
  cav.fp_max = 30.0;

  // synthetic white-light reflectance spectra per delta_r, Fano-fitted
  const std::vector<double> delta_rs = {-20, -10, -5, 0, 5, 10, 20, 30};
  std::string csv = "delta_r_nm,lambda_law_nm,lambda_fit_nm,lambda_fit_err,q_fit\n";
  double sxx = 0, sxy = 0, sx = 0, sy = 0;
  int idx = 0;
  bool lambda_ok = true, q_ok = true;
  for (const double dr : delta_rs) {
    cav.delta_r_nm = dr;
    const double lam_c = physics::cavity_mode_wavelength_nm(cav);
    const double w = lam_c / cav.q_factor;

    std::vector<double> lam(400), refl(400);
    for (int i = 0; i < 400; ++i) {
      lam[i] = 870.0 + 100.0 * i / 399.0;
      const double x = 2.0 * (lam[i] - lam_c) / w;
      refl[i] = -0.35 * (1.0 + x) * (1.0 + x) / (1.0 + x * x) + 0.95;
      CounterRng r(seed + idx, rng_stream::synth + 40, i, 0);
      refl[i] += 0.005 * r.gaussian();
    }
    ++idx;
    const auto fit = fit_fano(lam, refl);
    const double lam_fit = fit.value_of("lambda_c_nm");
    const double q_fit = fit.value_of("q_factor");
    csv += fmt(dr) + ',' + fmt(lam_c) + ',' + fmt(lam_fit) + ',' +
           fmt(fit.find("lambda_c_nm")->sigma) + ',' + fmt(q_fit) + '\n';
    lambda_ok = lambda_ok && fit.converged && std::abs(lam_fit - lam_c) < 0.05;
    q_ok = q_ok && std::abs(q_fit - cav.q_factor) / cav.q_factor < 0.05;
    sx += dr;
    sy += lam_fit;
    sxx += dr * dr;
    sxy += dr * lam_fit;
  }
  const double n = static_cast<double>(delta_rs.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  checks.add(lambda_ok, "fano fits recover the mode wavelength within 0.05 nm");
  checks.add(q_ok, "fano fits recover Q within 5%");
  checks.add(std::abs(slope - 1.3) < 0.05,
             "tuning series recovers 1.3 nm/nm: " + fmt(slope));

  const fs::path ft = out_dir / "fig2e_tuning.csv";
  write_text(ft, csv);
  res.files.push_back(ft);

  // Purcell-vs-detuning curves
  cav.delta_r_nm = 0.0;
  std::string pcsv = "detuning_nm,fp\n";
  for (double d = -8.0; d <= 8.0 + 1e-9; d += 0.1)
    pcsv += fmt(d) + ',' + fmt(physics::purcell_vs_detuning(cav, d)) + '\n';
  const fs::path fp = out_dir / "fig2e_purcell_detuning.csv";
  write_text(fp, pcsv);
  res.files.push_back(fp);
  checks.add(physics::purcell_vs_detuning(cav, 0.0) == cav.fp_max,
             "on-resonance Purcell equals fp_max");

  RunConfig stamp_cfg;
  stamp_cfg.seed = seed;
  json payload;
  payload["tuning_slope_fit"] = slope;
  payload["checks"] = checks.lines;
  payload["all_pass"] = checks.all_ok;
  const fs::path fj = out_dir / "fig2e_summary.json";
  write_text(fj, stamp_result_document(payload.dump(), stamp_cfg));
  res.files.push_back(fj);
  res.checks = checks.lines;
  res.all_pass = checks.all_ok;
  return res;
}

}  // namespace

PresetResult run_preset(const std::string& name, const fs::path& out_dir,
                        std::optional<std::uint64_t> seed_override, int threads) {
  fs::create_directories(out_dir);
  const std::uint64_t seed = seed_override.value_or(20260811ull);
  if (name == "fig4a") return preset_fig4a(out_dir, seed, threads);
  if (name == "fig4d") return preset_fig4d(out_dir, seed, threads);
  if (name == "fig5f") return preset_fig5f(out_dir, seed, threads);
  if (name == "fig2e") return preset_fig2e(out_dir, seed, threads);
  throw ConfigError("unknown preset '" + name +
                    "' (expected fig4a, fig4d, fig5f or fig2e)");
}

}  // namespace photonkit
