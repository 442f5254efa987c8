#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "photonkit/config.hpp"
#include "photonkit/correlator.hpp"
#include "photonkit/fitting.hpp"
#include "photonkit/types.hpp"

namespace photonkit {

std::string tool_version();

/// One rate-multiplication step of the saturation sweep.
struct RateSweepRow {
  int multiplier = 1;
  double rate_mhz = 80.0;
  double yield_per_pulse = 0.0;
  double rate_rel_linear = 0.0;  // count rate / (multiplier x 1-pulse rate)
  bool quantum_optics = false;   // g2/V evaluated for this row
  ValueWithError g2;
  VisibilityReport vis;
};

struct RateSweepResult {
  std::vector<RateSweepRow> rows;
  double reservoir_tau_ps = 0.0;
};

/// Full pipeline per multiplier: emission + detection for the count rate;
/// HBT and co/cross HOM for g2(0) and visibility on the multipliers listed in
/// `qo_multipliers`. Pulse counts scale with the multiplier (fixed wall-clock
/// observation), normalization is against the 1-pulse rate.
RateSweepResult rate_sweep(const EmitterConfig& emitter, const DetectorModel& detector,
                           const PulseTrain& base_train,
                           const std::vector<int>& multipliers,
                           const std::vector<int>& qo_multipliers, double b_factor,
                           std::uint64_t seed, int threads);

/// Serialization of fit / analysis results ("constants" block, config hash,
/// seed, tool version in every document).
std::string fit_result_to_json(const FitResult& fit);
std::string visibility_report_to_json(const VisibilityReport& rep);
std::string g2_result_to_json(const ValueWithError& g2, double period_ps);

/// Wraps a result payload (JSON text) into the stamped result document.
std::string stamp_result_document(const std::string& payload_json,
                                  const RunConfig& config);

}  // namespace photonkit
