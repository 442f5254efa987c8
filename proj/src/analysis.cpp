#include "photonkit/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "photonkit/bench.hpp"
#include "photonkit/constants.hpp"
#include "photonkit/errors.hpp"
#include "photonkit/physics.hpp"
#include "photonkit/source.hpp"

namespace photonkit {

using json = nlohmann::ordered_json;

std::string tool_version() { return "1.0.0"; }

namespace {

json constants_block() {
  return json{{"hbar_uev_ps", constants::hbar_uev_ps},
              {"h_uev_per_ghz", constants::h_uev_per_ghz},
              {"kb_mev_per_k", constants::kb_mev_per_k},
              {"inhom_coeff_ghz_ps", constants::inhom_coeff_ghz_ps}};
}

}  // namespace

RateSweepResult rate_sweep(const EmitterConfig& emitter, const DetectorModel& detector,
                           const PulseTrain& base_train,
                           const std::vector<int>& multipliers,
                           const std::vector<int>& qo_multipliers, double b_factor,
                           std::uint64_t seed, int threads) {
  RateSweepResult result;
  result.reservoir_tau_ps = emitter.reservoir_tau_ps;

  double rate_1pulse = 0.0;
  for (const int m : multipliers) {
    PulseTrain train = base_train;
    train.multiplier = m;
    train.n_pulses = base_train.n_pulses * static_cast<std::uint64_t>(m);
    const double period = train.period_ps();
    const double duration =
        pulse_lead_in_ps(train) + static_cast<double>(train.n_pulses + 2) * period;

    const auto photons = simulate_emission(emitter, train, seed);
    RateSweepRow row;
    row.multiplier = m;
    row.rate_mhz = train.rate_mhz();
    row.yield_per_pulse =
        static_cast<double>(photons.size()) / static_cast<double>(train.n_pulses);
    // count rate relative to the linear extrapolation of the 1-pulse rate
    const double rate = row.yield_per_pulse * train.rate_mhz();
    if (m == 1) rate_1pulse = rate;
    if (rate_1pulse <= 0.0) throw NumericError("rate_sweep: 1-pulse rate is zero");
    row.rate_rel_linear = rate / (static_cast<double>(m) * rate_1pulse);

    const bool want_qo =
        std::find(qo_multipliers.begin(), qo_multipliers.end(), m) != qo_multipliers.end();
    if (want_qo) {
      row.quantum_optics = true;
      const auto hbt = route_hbt(photons, 0.5, detector, seed + 1, duration);
      const auto h = cross_correlate(hbt.ch1, hbt.ch2, period / 125.0, 3.5 * period,
                                     threads);
      row.g2 = g2_zero(h, period);

      BenchConfig bench;
      bench.topology = BenchTopology::hom;
      bench.delay_ps = period;
      bench.splitter_ratio = 0.5;
      bench.polarization_mode = Polarization::co;
      const auto co = route_hom(photons, bench, emitter.t1_ps(), period, detector,
                                seed + 2, duration);
      bench.polarization_mode = Polarization::cross;
      const auto cross = route_hom(photons, bench, emitter.t1_ps(), period, detector,
                                   seed + 3, duration);
      const auto h_co =
          cross_correlate(co.ch1, co.ch2, period / 125.0, 3.5 * period, threads);
      const auto h_cross =
          cross_correlate(cross.ch1, cross.ch2, period / 125.0, 3.5 * period, threads);
      row.vis = hom_visibility(h_co, h_cross, period, row.g2.value, b_factor);
    }
    result.rows.push_back(row);
  }
  return result;
}

std::string fit_result_to_json(const FitResult& fit) {
  json j;
  j["model"] = fit.model;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["message"] = fit.message;
  j["residual_norm"] = fit.residual_norm;
  j["weighting"] = fit.weighting;
  json params = json::object();
  for (const auto& p : fit.params)
    params[p.name] = json{{"value", p.value}, {"sigma", p.sigma}};
  j["params"] = params;
  return j.dump(2);
}

std::string visibility_report_to_json(const VisibilityReport& rep) {
  json j;
  j["v_raw"] = rep.v_raw;
  j["v_raw_err"] = rep.v_raw_err;
  j["g2_zero"] = rep.g2_zero;
  j["b_factor"] = rep.b_factor;
  j["v_corrected"] = rep.v_corrected;
  return j.dump(2);
}

std::string g2_result_to_json(const ValueWithError& g2, double period_ps) {
  json j;
  j["g2_zero"] = g2.value;
  j["sigma"] = g2.sigma;
  j["period_ps"] = period_ps;
  j["error_convention"] = "poisson";
  return j.dump(2);
}

std::string stamp_result_document(const std::string& payload_json,
                                  const RunConfig& config) {
  json j;
  j["tool"] = "photonkit";
  j["version"] = tool_version();
  j["config_hash"] = config_hash_hex(config);
  j["seed"] = config.seed;
  j["constants"] = constants_block();
  j["result"] = json::parse(payload_json);
  return j.dump(2) + "\n";
}

}  // namespace photonkit
