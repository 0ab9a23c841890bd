#pragma once

#include <cstdint>
#include <string_view>

namespace mdepose {

// SplitMix64 (Steele, Lea, Flood 2014). Used for seeding and hashing.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

// xoshiro256** 1.0 (Blackman, Vigna), state expanded from the seed with
// SplitMix64. All derived distributions below are defined bit-for-bit so that
// sampling decisions reproduce on every platform; the <random> distributions
// are implementation-defined and are not used.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform integer in [0, n). n must be > 0. Rejection sampling on the
    // low residue class (x % n after discarding x < (2^64 - n) % n).
    std::uint64_t uniform_index(std::uint64_t n);

    // Uniform double in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; consumes two uniforms per call.
    double normal();

  private:
    std::uint64_t s_[4];
};

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Final avalanche of a 64-bit value (SplitMix64 output function).
std::uint64_t mix64(std::uint64_t x);

} // namespace mdepose
