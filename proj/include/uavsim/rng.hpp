/**
 * @file rng.hpp
 * @brief Counter-based random streams.
 *
 * Every random quantity in a drop is drawn from a stream keyed by
 * (master seed, stream tag, ids...). Streams are independent of evaluation
 * order, so a drop produces identical numbers whether it runs alone, in a
 * worker thread, or with only a subset of links materialized.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace uavsim {

/// Tags separating the random streams used inside one drop.
enum class Stream : std::uint64_t {
  kUsers = 1,
  kLosState,
  kShadow,
  kSmallScale,
  kO2i,
  kSchedule,
  kPilots,
  kPilotNoise,
  kTest,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t state = 0) : state_(state) {}

  /// Stream derived from a master seed, a tag and any number of ids.
  static CounterRng stream(std::uint64_t seed, Stream tag,
                           std::initializer_list<std::uint64_t> ids = {}) {
    std::uint64_t h = splitmix64(seed ^ 0xD1B54A32D192ED03ULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    for (std::uint64_t id : ids) h = splitmix64(h ^ (id + 0x632BE59BD9B4E019ULL));
    return CounterRng(h);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Standard normal draw (ziggurat; stateless, so draws depend only on the stream).
  double normal() { return boost::random::normal_distribution<double>()(*this); }

  /// Circularly symmetric complex Gaussian with unit variance.
  std::complex<double> complex_normal() {
    constexpr double kHalf = 0.70710678118654752440;
    const double re = normal();
    const double im = normal();
    return {kHalf * re, kHalf * im};
  }

 private:
  std::uint64_t state_;
};

}  // namespace uavsim
