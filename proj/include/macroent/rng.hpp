#pragma once

#include <cmath>
#include <cstdint>

namespace macroent {

// SplitMix64: tiny, splittable, bitwise-identical on every platform.
// std::mt19937 would be portable too, but the <random> distributions are
// not, and reproducibility of every sampled digit is a contract here.
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1) with 53 random mantissa bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller from two uniforms; deterministic, no cached spare.
    double normal() {
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // index into the cumulative distribution of `probs` (length n, sums to 1)
    int categorical(const double* probs, int n) {
        double u = uniform(), acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return n - 1;
    }

  private:
    uint64_t state_;
};

inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent substream for a (seed, a, b, c) coordinate, so parallel or
// reordered loops draw identical numbers.
inline SplitMix64 substream(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t s = mix64(seed ^ 0x243f6a8885a308d3ULL);
    s = mix64(s ^ (a * 0x9e3779b97f4a7c15ULL));
    s = mix64(s ^ (b * 0xc2b2ae3d27d4eb4fULL));
    s = mix64(s ^ (c * 0x165667b19e3779f9ULL));
    return SplitMix64(s);
}

}  // namespace macroent
