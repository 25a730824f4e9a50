#pragma once

#include <cstdint>

namespace cst {

// Deterministic RNG with a portable output stream. std::uniform_*_distribution
// is not specified bit-for-bit across standard libraries, so bounded draws are
// implemented here directly and the generated corpora stay byte-identical
// everywhere.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    // Derives an independent per-sample stream from a corpus seed and index.
    static Rng for_sample(uint64_t seed, uint64_t sample_index) {
        Rng mix(seed ^ (0x9E3779B97F4A7C15ULL * (sample_index + 1)));
        mix.next_u64();
        return mix;
    }

    // splitmix64
    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, n). Rejection-free would bias tiny amounts for
    // huge n; n here is pool sizes, so use rejection sampling for exactness.
    uint64_t next_below(uint64_t n) {
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi].
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  private:
    uint64_t state_;
};

}  // namespace cst
