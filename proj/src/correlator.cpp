#include "photonkit/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <thread>

#include "photonkit/errors.hpp"
#include "photonkit/physics.hpp"

namespace photonkit {

namespace {

std::size_t bins_for(double bin_width_ps, double range_ps) {
  if (!(bin_width_ps > 0.0)) throw std::invalid_argument("bin_width must be > 0");
  if (!(range_ps > 0.0)) throw std::invalid_argument("range must be > 0");
  return static_cast<std::size_t>(std::ceil(2.0 * range_ps / bin_width_ps));
}

// Counts pairs (tau = t_b - t_a) for every b in [b_begin, b_end) against the
// whole of `a`; `counts` must have bins_for() entries.
void count_pairs(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                 double bin_width_ps, double range_ps,
                 std::vector<std::uint64_t>& counts) {
  const std::size_t nbins = counts.size();
  std::size_t lo = 0;
  for (const std::uint64_t tb : b) {
    // drop a-tags with tau >= +range (window lower edge)
    while (lo < a.size() &&
           static_cast<double>(static_cast<std::int64_t>(tb) -
                               static_cast<std::int64_t>(a[lo])) >= range_ps)
      ++lo;
    for (std::size_t j = lo; j < a.size(); ++j) {
      const double tau = static_cast<double>(static_cast<std::int64_t>(tb) -
                                             static_cast<std::int64_t>(a[j]));
      if (tau < -range_ps) break;  // a sorted ascending -> tau only decreases
      const auto idx = static_cast<std::size_t>((tau + range_ps) / bin_width_ps);
      if (idx < nbins) ++counts[idx];
    }
  }
}

void require_sorted(std::span<const std::uint64_t> tags, const char* which) {
  if (!std::is_sorted(tags.begin(), tags.end()))
    throw std::invalid_argument(std::string("cross_correlate: ") + which +
                                " stream is not sorted");
}

}  // namespace

CorrelationHistogram cross_correlate(std::span<const std::uint64_t> a,
                                     std::span<const std::uint64_t> b,
                                     double bin_width_ps, double range_ps, int threads) {
  require_sorted(a, "a");
  require_sorted(b, "b");

  CorrelationHistogram hist;
  hist.bin_width_ps = bin_width_ps;
  hist.range_ps = range_ps;
  hist.counts.assign(bins_for(bin_width_ps, range_ps), 0);

  const int nw = std::max(1, std::min<int>(threads, static_cast<int>(b.size() / 4096) + 1));
  if (nw == 1 || b.size() < 8192) {
    count_pairs(a, b, bin_width_ps, range_ps, hist.counts);
  } else {
    // partition b by index; each worker owns a private histogram
    std::vector<std::vector<std::uint64_t>> parts(
        nw, std::vector<std::uint64_t>(hist.counts.size(), 0));
    std::vector<std::thread> pool;
    const std::size_t step = (b.size() + nw - 1) / nw;
    for (int w = 0; w < nw; ++w) {
      const std::size_t begin = w * step;
      const std::size_t end = std::min(b.size(), begin + step);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] {
        count_pairs(a, b.subspan(begin, end - begin), bin_width_ps, range_ps, parts[w]);
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& part : parts)
      for (std::size_t i = 0; i < part.size(); ++i) hist.counts[i] += part[i];
  }

  hist.total_pairs = 0;
  for (const auto c : hist.counts) hist.total_pairs += c;
  return hist;
}

CorrelationHistogram cross_correlate(const TimeTagStream& a, const TimeTagStream& b,
                                     double bin_width_ps, double range_ps, int threads) {
  auto hist = cross_correlate(std::span(a.tags_ps), std::span(b.tags_ps), bin_width_ps,
                              range_ps, threads);
  hist.channel_pair = {a.channel, b.channel};
  return hist;
}

CorrelationHistogram cross_correlate_stream(TagChunkSource a, TagChunkSource b,
                                            double bin_width_ps, double range_ps,
                                            int threads) {
  CorrelationHistogram hist;
  hist.bin_width_ps = bin_width_ps;
  hist.range_ps = range_ps;
  hist.counts.assign(bins_for(bin_width_ps, range_ps), 0);

  const int nw = std::max(1, threads);
  std::vector<std::uint64_t> a_window;  // rolling coverage of the b-chunk +- range
  std::vector<std::uint64_t> a_chunk, b_chunk;
  std::uint64_t last_a = 0, last_b = 0;
  bool a_done = false;

  std::vector<std::vector<std::uint64_t>> parts(
      nw, std::vector<std::uint64_t>(hist.counts.size(), 0));

  while (true) {
    const std::size_t got = b(b_chunk);
    if (got == 0) break;
    if (!b_chunk.empty() && b_chunk.front() < last_b)
      throw std::invalid_argument("cross_correlate_stream: b chunks not sorted");
    if (!std::is_sorted(b_chunk.begin(), b_chunk.end()))
      throw std::invalid_argument("cross_correlate_stream: b chunk not sorted");
    last_b = b_chunk.back();

    // extend the a-window until it covers b_chunk.back() + range
    const double need_hi = static_cast<double>(b_chunk.back()) + range_ps;
    while (!a_done && (a_window.empty() ||
                       static_cast<double>(a_window.back()) <= need_hi)) {
      const std::size_t ga = a(a_chunk);
      if (ga == 0) {
        a_done = true;
        break;
      }
      if (!a_chunk.empty() && a_chunk.front() < last_a)
        throw std::invalid_argument("cross_correlate_stream: a chunks not sorted");
      if (!std::is_sorted(a_chunk.begin(), a_chunk.end()))
        throw std::invalid_argument("cross_correlate_stream: a chunk not sorted");
      last_a = a_chunk.back();
      a_window.insert(a_window.end(), a_chunk.begin(), a_chunk.end());
    }

    // trim the window head below b_chunk.front() - range
    const double need_lo = static_cast<double>(b_chunk.front()) - range_ps;
    std::size_t trim = 0;
    while (trim < a_window.size() && static_cast<double>(a_window[trim]) < need_lo) ++trim;
    if (trim > 0) a_window.erase(a_window.begin(), a_window.begin() + trim);

    if (a_window.empty()) continue;

    if (nw == 1 || b_chunk.size() < 8192) {
      count_pairs(a_window, b_chunk, bin_width_ps, range_ps, parts[0]);
    } else {
      std::vector<std::thread> pool;
      const std::size_t step = (b_chunk.size() + nw - 1) / nw;
      for (int w = 0; w < nw; ++w) {
        const std::size_t begin = w * step;
        const std::size_t end = std::min(b_chunk.size(), begin + step);
        if (begin >= end) break;
        pool.emplace_back([&, w, begin, end] {
          count_pairs(a_window,
                      std::span(b_chunk).subspan(begin, end - begin), bin_width_ps,
                      range_ps, parts[w]);
        });
      }
      for (auto& t : pool) t.join();
    }
  }

  for (const auto& part : parts)
    for (std::size_t i = 0; i < part.size(); ++i) hist.counts[i] += part[i];
  hist.total_pairs = 0;
  for (const auto c : hist.counts) hist.total_pairs += c;
  return hist;
}

PeakIntegration integrate_peaks(const CorrelationHistogram& hist, double window_ps) {
  if (!(window_ps > 0.0)) throw std::invalid_argument("integrate_peaks: window must be > 0");
  PeakIntegration out;
  out.window_ps = window_ps;

  // every complete window [k*W - W/2, k*W + W/2) inside the histogram range
  const int k_max = static_cast<int>(std::floor((hist.range_ps - window_ps / 2.0) /
                                                window_ps));
  if (k_max < 0) throw std::invalid_argument("integrate_peaks: window exceeds range");

  std::vector<double> areas(2 * k_max + 1, 0.0);
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    if (hist.counts[i] == 0) continue;
    const double c = hist.bin_center_ps(i);
    // half-open tiling [kW - W/2, kW + W/2): every bin lands in exactly one window
    const auto k = static_cast<long>(std::floor(c / window_ps + 0.5));
    if (std::abs(k) > k_max) continue;
    areas[static_cast<std::size_t>(k + k_max)] += static_cast<double>(hist.counts[i]);
  }
  out.center_area = areas[static_cast<std::size_t>(k_max)];
  for (int k = -k_max; k <= k_max; ++k)
    if (k != 0) out.side_areas.push_back(areas[static_cast<std::size_t>(k + k_max)]);
  return out;
}

ValueWithError g2_zero(const CorrelationHistogram& hist, double period_ps) {
  if (hist.range_ps < 3.0 * period_ps)
    throw std::invalid_argument("g2_zero: histogram range must cover >= 3 periods");
  const PeakIntegration peaks = integrate_peaks(hist, period_ps);

  double side_sum = 0.0;
  for (const double s : peaks.side_areas) side_sum += s;
  if (side_sum <= 0.0) throw NumericError("g2_zero: all side peak areas are zero");

  const double side_mean = side_sum / static_cast<double>(peaks.side_areas.size());
  ValueWithError r;
  r.value = peaks.center_area / side_mean;
  // Poisson counting errors on both numerator and denominator
  const double rel_center =
      peaks.center_area > 0.0 ? 1.0 / std::sqrt(peaks.center_area) : 0.0;
  const double rel_side = 1.0 / std::sqrt(side_sum);
  r.sigma = r.value * std::sqrt(rel_center * rel_center + rel_side * rel_side);
  if (peaks.center_area == 0.0) r.sigma = 1.0 / side_mean;  // one-count upper scale
  return r;
}

VisibilityReport hom_visibility(const CorrelationHistogram& co,
                                const CorrelationHistogram& cross, double window_ps,
                                double g2_zero_value, double b_factor) {
  if (co.bin_width_ps != cross.bin_width_ps || co.range_ps != cross.range_ps)
    throw std::invalid_argument("hom_visibility: histogram binnings differ");
  const double a_co = integrate_peaks(co, window_ps).center_area;
  const double a_cross = integrate_peaks(cross, window_ps).center_area;
  if (a_cross <= 0.0) throw NumericError("hom_visibility: cross-polarized center area is 0");

  const double ratio = a_co / a_cross;
  VisibilityReport rep = physics::correct_visibility(1.0 - ratio, g2_zero_value, b_factor);
  rep.v_raw_err =
      ratio * std::sqrt((a_co > 0 ? 1.0 / a_co : 1.0) + 1.0 / a_cross);
  return rep;
}

void write_histogram_csv(const std::filesystem::path& path,
                         const CorrelationHistogram& hist) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "bin_center_ps,counts\n";
  char buf[64];
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", hist.bin_center_ps(i));
    out << buf << ',' << hist.counts[i] << '\n';
  }
}

}  // namespace photonkit
