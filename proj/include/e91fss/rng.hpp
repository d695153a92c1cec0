#pragma once

#include <cstdint>
#include <random>

namespace e91fss {

/// SplitMix64 finalizer. Used to derive sub-stream and grid-point seeds from
/// a master seed so that consumers draw from statistically independent
/// streams regardless of iteration order.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed for sub-stream `index` of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index));
}

/// Seeded pseudo-random stream producing uniform variates.
///
/// mt19937_64 output is pinned by the standard; the [0,1) mapping keeps the
/// top 53 bits, so identical seeds reproduce identical draw sequences on any
/// IEEE-754 platform (std::uniform_real_distribution would not).
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Consumes one uniform01() draw.
    int uniform_index(int n) {
        int idx = static_cast<int>(uniform01() * static_cast<double>(n));
        return idx < n ? idx : n - 1;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace e91fss
