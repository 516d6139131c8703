#pragma once

#include <cstdint>
#include <limits>

namespace cedtest {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a master seed and a tuple of
// counters, e.g. (replicate, sample, row). The result depends only on the
// key, never on the order in which streams are created.
template <typename... Counters>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Counters... counters) {
  std::uint64_t state = mix64(seed);
  ((state = mix64(state ^ mix64(static_cast<std::uint64_t>(counters) + 0x632be59bd9b4e019ULL))),
   ...);
  return state;
}

// Small splittable generator; satisfies UniformRandomBitGenerator so it
// works with the <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace cedtest
