#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace pecs {

// splitmix64 (Vigna). Used to expand one 64-bit seed into generator state
// and to derive purpose-specific sub-seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256** (Blackman & Vigna), seeded through splitmix64. The exact
// generator is part of the file-format/golden-vector contract: masks and
// noise realisations must be reproducible from the seed alone, across
// platforms and bindings.
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // One Box-Muller pair of independent standard normals. The first draw is
  // mapped into (0, 1] so log() never sees zero.
  std::pair<double, double> gaussian_pair() {
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

// Every run derives all of its randomness from a single root seed, split per
// purpose so that e.g. changing the shuffle seed cannot disturb the mask.
enum class SeedPurpose : std::uint64_t {
  Mask = 1,
  Init = 2,
  Shuffle = 3,
  Noise = 4,
  Phantom = 5,
};

// Two-stage splitmix derivation: root x purpose -> stream, stream x index ->
// sub-seed. Stable by construction; do not change without versioning golden
// vectors.
inline std::uint64_t sub_seed(std::uint64_t root, SeedPurpose purpose,
                              std::uint64_t index = 0) {
  SplitMix64 stage1(root ^ (0x9e3779b97f4a7c15ull *
                            static_cast<std::uint64_t>(purpose)));
  const std::uint64_t stream = stage1.next();
  SplitMix64 stage2(stream ^ (0xbf58476d1ce4e5b9ull * (index + 1)));
  return stage2.next();
}

}  // namespace pecs
