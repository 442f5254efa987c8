#include "photonkit/correlator.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "photonkit/errors.hpp"
#include "photonkit/rng.hpp"

using namespace photonkit;

namespace {

std::vector<std::uint64_t> comb(std::uint64_t period, std::size_t n,
                                std::uint64_t offset = 0) {
  std::vector<std::uint64_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = offset + i * period;
  return v;
}

}  // namespace

TEST_CASE("self-correlation of a periodic comb gives delta peaks") {
  const auto tags = comb(100, 50);
  const auto h = cross_correlate(tags, tags, 1.0, 350.0);
  // peaks at tau = -300..300 step 100 with heights 50-|k|; with 1 ps bins the
  // integer tau in bin i is floor(bin_center)
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const long tau = static_cast<long>(std::floor(h.bin_center_ps(i)));
    const long k = tau / 100;
    if (tau % 100 == 0 && std::abs(k) <= 3)
      CHECK(h.counts[i] == static_cast<std::uint64_t>(50 - std::abs(k)));
    else
      CHECK(h.counts[i] == 0);
  }
}

TEST_CASE("poisson vs poisson is flat at the analytic level") {
  const double rate1 = 2e-4, rate2 = 3e-4, duration = 5e7;  // per ps
  const auto a = pk_oracle::poisson_stream(rate1, duration, 11, rng_stream::synth);
  const auto b = pk_oracle::poisson_stream(rate2, duration, 12, rng_stream::synth + 1);
  const double bin = 500.0, range = 10000.0;
  const auto h = cross_correlate(a, b, bin, range);
  const double expected = rate1 * rate2 * bin * duration;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    CHECK(std::abs(static_cast<double>(h.counts[i]) - expected) <
          5.0 * std::sqrt(expected));
  }
  // mean over all bins is a much tighter check
  const double mean =
      static_cast<double>(h.total_pairs) / static_cast<double>(h.counts.size());
  CHECK(mean == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("matches the brute-force oracle bit-for-bit") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng pick(seed, rng_stream::synth + 2, 0, 0);
    const double rate = 1e-3 * (0.2 + pick.uniform());
    const double duration = 2e5;
    const auto a = pk_oracle::poisson_stream(rate, duration, seed * 2 + 1, 40);
    const auto b = pk_oracle::poisson_stream(rate, duration, seed * 2 + 2, 41);
    const double bin = pick.bernoulli(0.5) ? 1.0 : 7.5;
    const double range = pick.bernoulli(0.5) ? 1000.0 : 12500.0;

    const auto fast = cross_correlate(a, b, bin, range, 2);
    const auto ref = pk_oracle::brute_force_correlate(a, b, bin, range);
    REQUIRE(fast.counts.size() == ref.counts.size());
    CHECK(fast.counts == ref.counts);
    CHECK(fast.total_pairs == ref.total_pairs);
  }
}

TEST_CASE("edge bins: tau = -range included, tau = +range excluded") {
  const std::vector<std::uint64_t> a = {1000};
  const std::vector<std::uint64_t> b = {900, 1100};
  const auto h = cross_correlate(a, b, 1.0, 100.0);  // taus: -100, +100
  CHECK(h.total_pairs == 1);
  CHECK(h.counts.front() == 1);  // tau = -100 lands in bin 0
}

TEST_CASE("thread count does not change the histogram") {
  const auto a = pk_oracle::poisson_stream(5e-4, 1e7, 5, 42);
  const auto b = pk_oracle::poisson_stream(5e-4, 1e7, 6, 43);
  const auto h1 = cross_correlate(a, b, 10.0, 40000.0, 1);
  const auto h4 = cross_correlate(a, b, 10.0, 40000.0, 4);
  CHECK(h1.counts == h4.counts);
}

TEST_CASE("streaming correlation equals in-memory") {
  const auto a = pk_oracle::poisson_stream(5e-4, 2e7, 7, 44);
  const auto b = pk_oracle::poisson_stream(4e-4, 2e7, 8, 45);
  const auto ref = cross_correlate(a, b, 5.0, 20000.0);

  auto make_source = [](const std::vector<std::uint64_t>& v, std::size_t chunk) {
    auto pos = std::make_shared<std::size_t>(0);
    return [&v, pos, chunk](std::vector<std::uint64_t>& out) -> std::size_t {
      const std::size_t n = std::min(chunk, v.size() - *pos);
      out.assign(v.begin() + *pos, v.begin() + *pos + n);
      *pos += n;
      return n;
    };
  };
  for (int threads : {1, 4}) {
    const auto hs = cross_correlate_stream(make_source(a, 1000), make_source(b, 1500),
                                           5.0, 20000.0, threads);
    CHECK(hs.counts == ref.counts);
  }
}

TEST_CASE("unsorted input is an explicit error") {
  const std::vector<std::uint64_t> bad = {10, 5, 20};
  const std::vector<std::uint64_t> ok = {1, 2, 3};
  CHECK_THROWS_AS(cross_correlate(bad, ok, 1.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(cross_correlate(ok, bad, 1.0, 10.0), std::invalid_argument);
}

TEST_CASE("peak integration tiles the axis") {
  const auto a = comb(12500, 200);
  const auto h = cross_correlate(a, a, 100.0, 3.5 * 12500.0);
  const auto peaks = integrate_peaks(h, 12500.0);
  CHECK(peaks.side_areas.size() == 6);
  double total = peaks.center_area;
  for (const double s : peaks.side_areas) total += s;
  CHECK(total == doctest::Approx(static_cast<double>(h.total_pairs)));
  CHECK(peaks.center_area == 200.0);  // the tau=0 self-pairs
}

TEST_CASE("g2_zero of a poisson process is 1 within errors across seeds") {
  int within_3sigma = 0;
  const int n_seeds = 20;
  for (int s = 0; s < n_seeds; ++s) {
    const auto a =
        pk_oracle::poisson_stream(4e-4, 4e7, 100 + s, rng_stream::synth + 3);
    const auto b =
        pk_oracle::poisson_stream(4e-4, 4e7, 200 + s, rng_stream::synth + 4);
    const auto h = cross_correlate(a, b, 500.0, 4.0 * 12500.0);
    const auto g2 = g2_zero(h, 12500.0);
    if (std::abs(g2.value - 1.0) <= 3.0 * g2.sigma) ++within_3sigma;
  }
  CHECK(within_3sigma >= n_seeds - 1);
}

TEST_CASE("g2_zero error paths") {
  const auto a = comb(100, 32);
  auto h = cross_correlate(a, a, 1.0, 350.0);
  CHECK_THROWS_AS(g2_zero(h, 200.0), std::invalid_argument);  // range < 3 periods
  h.counts.assign(h.counts.size(), 0);
  CHECK_THROWS_AS(g2_zero(h, 100.0), NumericError);  // zero side areas
}

TEST_CASE("hom_visibility identities") {
  const auto a = comb(12500, 500, 3);
  const auto co = cross_correlate(a, a, 100.0, 3.5 * 12500.0);
  const auto cross = co;

  // identical histograms -> V = 0 exactly
  const auto rep0 = hom_visibility(co, cross, 12500.0);
  CHECK(rep0.v_raw == 0.0);

  // empty co center -> V = 1
  auto co_empty = co;
  const auto peaks = integrate_peaks(co, 12500.0);
  (void)peaks;
  for (std::size_t i = 0; i < co_empty.counts.size(); ++i)
    if (std::abs(co_empty.bin_center_ps(i)) < 6250.0) co_empty.counts[i] = 0;
  const auto rep1 = hom_visibility(co_empty, cross, 12500.0);
  CHECK(rep1.v_raw == 1.0);

  // zero cross area -> undefined
  auto cross_empty = cross;
  cross_empty.counts.assign(cross_empty.counts.size(), 0);
  CHECK_THROWS_AS(hom_visibility(co, cross_empty, 12500.0), NumericError);

  // mismatched binning
  const auto other = cross_correlate(a, a, 50.0, 3.5 * 12500.0);
  CHECK_THROWS_AS(hom_visibility(co, other, 12500.0), std::invalid_argument);
}
