#pragma once

#include <cmath>
#include <cstdint>

namespace cfqkd {

/// Counter-based random stream: the draws for pulse `index` depend only on
/// (seed, index), so pulses can be simulated in any order or in parallel
/// with bitwise-identical results. SplitMix64 output function over a
/// Weyl sequence whose origin is a mix of seed and index.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t index) noexcept
      : state_(mix(seed ^ mix(index + 0x632BE59BD9B4E019ULL))) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Poisson draw by sequential inversion; meant for small means.
  std::uint32_t poisson(double mean) noexcept {
    const double u = uniform();
    double term = std::exp(-mean);
    double cdf = term;
    std::uint32_t n = 0;
    while (u >= cdf && term > 0.0) {
      ++n;
      term *= mean / n;
      cdf += term;
    }
    return n;
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace cfqkd
