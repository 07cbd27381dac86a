#pragma once

#include <cstdint>

namespace snvc {

/// Counter-based deterministic random generator.
///
/// The n-th raw output is mix64(seed + n * GAMMA) where mix64 is the
/// SplitMix64 finalizer and GAMMA its golden-ratio increment. Because each
/// draw is a pure function of (seed, counter), identical seeds reproduce
/// identical streams on every platform, and a stream can be re-created at
/// any point from its seed and counter alone.
///
/// Worker streams are derived with split(): child seeds are decorrelated by
/// hashing the stream id into the parent seed, so frame- or box-level
/// parallelism never shares generator state.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double next_uniform();

  /// Standard normal draw via Box-Muller; consumes exactly two uniforms.
  double next_gaussian();

  /// Independent child stream for worker `stream`.
  SeededRng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace snvc
