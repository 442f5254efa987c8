#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "photonkit/types.hpp"

namespace photonkit {

/// Complete description of one simulation/analysis run. Serializes to a
/// single JSON document; the canonical dump (sorted keys, no whitespace) is
/// what gets hashed into every output file.
struct RunConfig {
  EmitterConfig emitter;
  CavityModel cavity;
  PulseTrain train;
  BenchConfig bench;
  DetectorModel detector;
  std::uint64_t seed = 1;
  int threads = 1;
  bool truth_sidecar = false;
  std::string output_dir = ".";

  /// Bench delay with the auto rule applied (0 -> one pulse period).
  double effective_delay_ps() const {
    return bench.delay_ps > 0.0 ? bench.delay_ps : train.period_ps();
  }
};

RunConfig config_from_json_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical serialization: sorted keys, fixed field set, no whitespace.
std::string canonical_json(const RunConfig& config);

/// Pretty serialization for humans (2-space indent).
std::string pretty_json(const RunConfig& config);

/// SHA-256 of the canonical serialization.
std::array<std::uint8_t, 32> config_hash(const RunConfig& config);
std::string config_hash_hex(const RunConfig& config);

/// Applies a dotted-path override, e.g. "emitter.leak_rate=0.01" or
/// "seed=42". Values parse as JSON scalars. Throws ConfigError on unknown
/// keys or malformed values.
void apply_override(RunConfig& config, const std::string& dotted_key,
                    const std::string& value);

/// Field-level validation of the full document (throws ConfigError).
void validate(const RunConfig& config);

std::array<std::uint8_t, 32> sha256_bytes(const void* data, std::size_t size);
std::string to_hex(const std::array<std::uint8_t, 32>& digest);

}  // namespace photonkit
