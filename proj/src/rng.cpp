#include "photonkit/rng.hpp"

#include <cmath>

#include "photonkit/constants.hpp"

namespace photonkit {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

void philox4x32(const std::uint32_t ctr[4], const std::uint32_t key[2], std::uint32_t out[4]) {
  std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
  std::uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c0, hi0, lo0);
    mulhilo(kPhiloxM1, c2, hi1, lo1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    const std::uint32_t n3 = lo0;
    c0 = n0; c1 = n1; c2 = n2; c3 = n3;
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
}

void CounterRng::refill() {
  const std::uint32_t ctr[4] = {
      slot_,
      static_cast<std::uint32_t>(index_),
      static_cast<std::uint32_t>(index_ >> 32) ^ (stream_ << 8),
      block_,
  };
  const std::uint32_t key[2] = {static_cast<std::uint32_t>(seed_),
                                static_cast<std::uint32_t>(seed_ >> 32) ^ stream_};
  philox4x32(ctr, key, buf_);
  ++block_;
  avail_ = 4;
}

std::uint64_t CounterRng::next_u64() {
  if (avail_ < 2) refill();
  const std::uint64_t hi = buf_[avail_ - 1];
  const std::uint64_t lo = buf_[avail_ - 2];
  avail_ -= 2;
  return (hi << 32) | lo;
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::gaussian() {
  // Box-Muller; the spare value is discarded to keep draw accounting simple.
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * constants::pi * u2);
}

double CounterRng::exponential(double mean_ps) {
  double u = uniform();
  while (u == 0.0) u = uniform();
  return -mean_ps * std::log(u);
}

std::uint64_t CounterRng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean > 5000.0) {
    // Gaussian approximation; relative skew < 1.5%/sqrt(mean) at this size
    const double v = std::round(mean + std::sqrt(mean) * gaussian());
    return v < 0.0 ? 0 : static_cast<std::uint64_t>(v);
  }
  // Knuth in log space (exp(-mean) underflows already near mean ~ 700)
  std::uint64_t n = 0;
  double acc = exponential(1.0);
  while (acc < mean) {
    ++n;
    acc += exponential(1.0);
  }
  return n;
}

}  // namespace photonkit
