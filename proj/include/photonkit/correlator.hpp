#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "photonkit/types.hpp"

namespace photonkit {

struct ValueWithError {
  double value = 0.0;
  double sigma = 0.0;
};

/// Exact start-stop cross-correlation: counts all ordered pairs with
/// tau = t_b - t_a in [-range, +range), binned at bin_width. Sorted two-pointer
/// sweep, O(N + M*k) with k the mean number of partners per tag. With
/// threads > 1 the b-stream is partitioned by index and the per-worker
/// histograms are summed, bit-identical to the sequential result.
CorrelationHistogram cross_correlate(std::span<const std::uint64_t> a,
                                     std::span<const std::uint64_t> b,
                                     double bin_width_ps, double range_ps,
                                     int threads = 1);

CorrelationHistogram cross_correlate(const TimeTagStream& a, const TimeTagStream& b,
                                     double bin_width_ps, double range_ps,
                                     int threads = 1);

/// Sequential source of sorted tag chunks (file reader, generator, ...).
/// Returns the number of tags placed into `out`; 0 signals end of stream.
using TagChunkSource = std::function<std::size_t(std::vector<std::uint64_t>& out)>;

/// Streaming correlation for streams too large to hold in memory. Keeps a
/// rolling window of `a` (width = 2*range) plus one chunk of `b`; the chunk
/// interior is processed by `threads` workers with additive merge.
CorrelationHistogram cross_correlate_stream(TagChunkSource a, TagChunkSource b,
                                            double bin_width_ps, double range_ps,
                                            int threads = 1);

/// Integrates histogram counts over period-wide windows centered on k*window.
/// Side windows must lie fully inside the histogram range.
PeakIntegration integrate_peaks(const CorrelationHistogram& hist, double window_ps);

/// g2(0) = center peak area / mean side peak area, Poisson errors.
/// Requires range >= 3*period; throws NumericError when all side areas are 0.
ValueWithError g2_zero(const CorrelationHistogram& hist, double period_ps);

/// Raw HOM visibility 1 - A_co/A_cross over the center window, plus the
/// multi-photon correction with the given g2(0) and B factor.
VisibilityReport hom_visibility(const CorrelationHistogram& co,
                                const CorrelationHistogram& cross, double window_ps,
                                double g2_zero_value = 0.0, double b_factor = 1.0);

void write_histogram_csv(const std::filesystem::path& path,
                         const CorrelationHistogram& hist);

}  // namespace photonkit
