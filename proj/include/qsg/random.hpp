// Deterministic counter-based random source with splittable streams.
//
// Every draw is a pure function of (seed, stream, counter), so a stream
// reproduces the same sequence regardless of how many workers run beside it.
// Independent per-trial / per-purpose streams are derived by mixing a tag
// into the stream id instead of jumping ahead in a shared sequence.

#pragma once

#include <cstdint>

namespace qsg {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed),
        stream_(stream),
        key_(detail::mix64(detail::mix64(seed) +
                           detail::kGoldenGamma * detail::mix64(stream + 1))) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Derive an independent stream of the same seed. Depends only on
  // (seed, stream, tag), never on how many draws this source has made.
  RandomSource split(std::uint64_t tag) const {
    return RandomSource(seed_, detail::mix64(stream_ + detail::kGoldenGamma * (tag + 1)));
  }

  std::uint64_t next_u64() {
    counter_ += detail::kGoldenGamma;
    return detail::mix64(counter_ + key_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); consumes exactly one draw.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // Standard normal via Box-Muller; consumes exactly two draws.
  double next_normal();

  // Gamma(shape, 1) via Marsaglia-Tsang; consumes a variable number of draws,
  // so keep it out of paths that require stream-aligned event counts.
  double next_gamma(double shape);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qsg
