#include "snvc/rng.hpp"

#include <cmath>
#include <numbers>

namespace snvc {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t SeededRng::next_u64() {
  ++counter_;
  return mix64(seed_ + counter_ * kGamma);
}

double SeededRng::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::next_gaussian() {
  // Box-Muller, cosine branch only; u1 is kept away from 0 so log is finite.
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

SeededRng SeededRng::split(std::uint64_t stream) const {
  return SeededRng(mix64(seed_ ^ mix64(stream + kGamma)));
}

}  // namespace snvc
