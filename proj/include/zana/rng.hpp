#pragma once

#include <cstdint>
#include <vector>

namespace zana {

// SplitMix64. The synthetic-chain generator routes every random choice
// through this so that identical (config, seed) pairs produce byte-identical
// chains on any platform; std::uniform_int_distribution is
// implementation-defined and must not be used for generated data.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [lo, hi], inclusive. Modulo bias is irrelevant at the scales
    // used here and keeps the stream platform-stable.
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
        return lo + next() % (hi - lo + 1);
    }

    // True with probability num/den.
    bool chance(std::uint64_t num, std::uint64_t den) { return next() % den < num; }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[next() % v.size()];
    }

  private:
    std::uint64_t state_;
};

} // namespace zana
