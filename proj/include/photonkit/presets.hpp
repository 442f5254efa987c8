#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "photonkit/config.hpp"
#include "photonkit/types.hpp"

namespace photonkit {

/// simulate: runs the configured source through the configured bench and
/// writes ch1/ch2 timetag files, the optional truth sidecar CSV, and a
/// stamped run summary JSON. Returns the list of files written.
std::vector<std::filesystem::path> run_simulate(const RunConfig& config,
                                                const std::filesystem::path& out_dir);

/// correlate: streams two timetag files into a histogram CSV.
std::filesystem::path run_correlate(const std::filesystem::path& file_a,
                                    const std::filesystem::path& file_b,
                                    double bin_width_ps, double range_ps, int threads,
                                    const std::filesystem::path& out_csv);

/// analyze: HBT (g2), HOM (visibility), lifetime (decay fit) specs over
/// timetag files; each writes a stamped JSON document and returns its path.
std::filesystem::path analyze_hbt(const std::filesystem::path& a,
                                  const std::filesystem::path& b, double period_ps,
                                  int threads, const RunConfig& config,
                                  const std::filesystem::path& out_json);
std::filesystem::path analyze_hom(const std::filesystem::path& co_a,
                                  const std::filesystem::path& co_b,
                                  const std::filesystem::path& cross_a,
                                  const std::filesystem::path& cross_b,
                                  double period_ps, double g2_zero_value,
                                  double b_factor, int threads, const RunConfig& config,
                                  const std::filesystem::path& out_json);
std::filesystem::path analyze_lifetime(const std::filesystem::path& a, double period_ps,
                                       double bin_ps, const std::string& model,
                                       std::optional<double> irf_sigma_ps,
                                       const RunConfig& config,
                                       const std::filesystem::path& out_json);

/// sweep: rate-multiplication table for the configured emitter.
std::filesystem::path run_sweep(const RunConfig& config,
                                const std::vector<int>& multipliers,
                                const std::filesystem::path& out_dir);

/// Figure-reproduction presets: fig4a, fig4d, fig5f, fig2e. Each pins its own
/// seeds and sample counts, emits plot-ready CSV plus a stamped JSON summary
/// with every tolerance evaluated, and returns the files written.
/// `all_pass` reflects the preset's internal tolerance checks.
struct PresetResult {
  std::string name;
  std::vector<std::filesystem::path> files;
  bool all_pass = false;
  std::vector<std::string> checks;  // "ok: ..." / "FAIL: ..." lines
};
PresetResult run_preset(const std::string& name, const std::filesystem::path& out_dir,
                        std::optional<std::uint64_t> seed_override, int threads);

}  // namespace photonkit
