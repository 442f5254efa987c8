#pragma once

#include <cstdint>

namespace photonkit {

/// Counter-based RNG (Philox4x32-10). Every draw is addressed by
/// (seed, stream, index, slot), so generation order and thread count never
/// change the sampled values. `index` is typically a pulse or photon index,
/// `slot` a per-event draw slot; variable-length draws (Poisson, rejection
/// loops) advance an internal block counter within the slot.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t index,
             std::uint32_t slot)
      : seed_(seed), stream_(stream), index_(index), slot_(slot) {}

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform();

  /// Standard normal via Box-Muller (one value per pair of uniforms).
  double gaussian();
  double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

  /// Exponential with the given mean.
  double exponential(double mean_ps);

  bool bernoulli(double p) { return uniform() < p; }

  /// Poisson via inversion-by-multiplication; fine for the small means used here.
  std::uint64_t poisson(double mean);

  std::uint64_t next_u64();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint32_t stream_;
  std::uint64_t index_;
  std::uint32_t slot_;
  std::uint32_t block_ = 0;  // advances within the slot for multi-draw samples
  std::uint32_t buf_[4]{};
  int avail_ = 0;  // unread 32-bit lanes in buf_
};

/// Raw Philox4x32-10 block function (exposed for tests).
void philox4x32(const std::uint32_t ctr[4], const std::uint32_t key[2], std::uint32_t out[4]);

// Stream ids used across the toolkit; keep them unique per purpose.
namespace rng_stream {
inline constexpr std::uint32_t occupancy = 1;
inline constexpr std::uint32_t emission = 2;
inline constexpr std::uint32_t leak = 3;
inline constexpr std::uint32_t hbt_route = 4;
inline constexpr std::uint32_t hom_arm = 5;
inline constexpr std::uint32_t hom_pair = 6;
inline constexpr std::uint32_t detect_ch1 = 16;  // +channel
inline constexpr std::uint32_t dark_ch1 = 24;    // +channel
inline constexpr std::uint32_t synth = 32;
}  // namespace rng_stream

}  // namespace photonkit
