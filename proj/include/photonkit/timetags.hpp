#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "photonkit/types.hpp"

namespace photonkit {

// Binary timetag file, little-endian:
//   magic "PTT1" | version u32 | channel u16 | resolution_ps u32 |
//   count u64 | seed u64 | config_hash u8[32] | count x u64 timestamps [ps]
inline constexpr std::uint32_t timetag_format_version = 1;

void write_timetags(const std::filesystem::path& path, const TimeTagStream& stream);

/// Reads and validates a timetag file (magic, version, sortedness).
TimeTagStream read_timetags(const std::filesystem::path& path);

/// Header-only peek (count, channel, seed) without loading the payload.
struct TimeTagFileInfo {
  std::uint16_t channel = 0;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  std::array<std::uint8_t, 32> config_hash{};
};
TimeTagFileInfo read_timetag_info(const std::filesystem::path& path);

/// Incremental reader for streaming correlation of large files.
class TimeTagFileReader {
 public:
  explicit TimeTagFileReader(const std::filesystem::path& path);
  ~TimeTagFileReader();
  TimeTagFileReader(const TimeTagFileReader&) = delete;
  TimeTagFileReader& operator=(const TimeTagFileReader&) = delete;

  const TimeTagFileInfo& info() const { return info_; }
  std::uint64_t remaining() const { return remaining_; }

  /// Reads up to max_tags into out; returns the number read (0 at EOF).
  std::size_t read_chunk(std::vector<std::uint64_t>& out, std::size_t max_tags);

 private:
  struct Impl;
  Impl* impl_;
  TimeTagFileInfo info_;
  std::uint64_t remaining_ = 0;
};

/// Quantizes photon/click times (double ps) onto the 1 ps grid, sorts and
/// deduplicates. Collisions are counted into `accounting.grid_collisions`.
std::vector<std::uint64_t> quantize_sorted(std::span<const double> times_ps,
                                           std::uint64_t* collisions = nullptr);

}  // namespace photonkit
