#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "photonkit/types.hpp"

namespace photonkit {

/// Hanbury-Brown-Twiss: every photon routes independently to one of two
/// detectors with the splitter ratio, then detect() runs per arm.
struct HbtOutput {
  TimeTagStream ch1, ch2;
  DetectionAccounting acc1, acc2;
};
HbtOutput route_hbt(const std::vector<PhotonRecord>& photons, double splitter_ratio,
                    const DetectorModel& detector, std::uint64_t seed,
                    double duration_ps);

/// Hong-Ou-Mandel (unbalanced MZI). Photons pick the short or long arm; a
/// long-arm photon meeting a short-arm photon from one delay later interferes
/// at the output splitter. Pair outcomes (coincidence vs bunching, and the
/// joint detection times) are sampled from the two-photon density; unpaired
/// photons route classically.
struct HomOutput {
  TimeTagStream ch1, ch2;
  DetectionAccounting acc1, acc2;
  std::uint64_t interfering_pairs = 0;
  std::uint64_t coincidence_outcomes = 0;
  std::uint64_t routed_photons = 0;  // photon-number conservation check
  bool delay_period_mismatch = false;
  double mean_pair_visibility = 0.0;  // average interference term over pairs
};
HomOutput route_hom(const std::vector<PhotonRecord>& photons, const BenchConfig& bench,
                    double t1_ps, double period_ps, const DetectorModel& detector,
                    std::uint64_t seed, double duration_ps);

/// Interference visibility of one delay-matched pair: envelope offset d,
/// frequency detuning df, pure-dephasing damping exp(-2|t1-t2|/t2_pure).
double pair_visibility(double t1_ps, double start_offset_ps, double delta_f_ghz,
                       std::optional<double> t2_pure_ps);

/// Independent numeric oracle for the inhomogeneous visibility: nested
/// quadrature of the two-photon coincidence density over (t1, t2) and the
/// Gaussian pair-detuning distribution (FWHM sqrt(2)*Gamma from i.i.d.
/// photon offsets with FWHM Gamma). No Monte Carlo, no closed-form erfc.
/// Throws NumericError if the quadrature fails to reach `tol`.
double pair_visibility_oracle(double t1_ps, double gamma_inhom_ghz,
                              std::optional<double> t2_pure_ps = std::nullopt,
                              double tol = 1e-6);

}  // namespace photonkit
