#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "ivanov/core.hpp"

namespace ivanov {

/// SplitMix64 finaliser: a bijective mixing function on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: the i-th output of a stream is
/// splitmix64(key + i) for a key derived from (seed, stream). Streams with
/// distinct identifiers are independent for practical purposes, and any
/// draw is reproducible from (seed, stream, counter) alone.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(splitmix64(seed) ^ (stream * 0xD1342543DE82EF95ULL + 1))) {}

  std::uint64_t next_word() { return splitmix64(key_ + counter_++); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_word() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via the Box-Muller transform; draws come in pairs and
  /// the second is cached within the stream.
  double gaussian() {
    if (cached_) {
      const double z = *cached_;
      cached_.reset();
      return z;
    }
    const double u1 = 1.0 - uniform01();  // in (0, 1], keeps the log finite
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> cached_;
};

/// Purpose tags for deriving independent substreams of one experiment.
enum class StreamPurpose : std::uint64_t {
  TrainPoints = 1,
  TrainNoise = 2,
  ValidationPoints = 3,
  ValidationNoise = 4,
  MonteCarlo = 5,
};

/// Stream for a given (replication, purpose) pair under a master seed.
inline StreamRng substream(std::uint64_t seed, std::uint64_t replication, StreamPurpose purpose) {
  return StreamRng(seed, replication * 8ULL + static_cast<std::uint64_t>(purpose));
}

}  // namespace ivanov
