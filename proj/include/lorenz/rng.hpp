#ifndef LORENZ_RNG_HPP
#define LORENZ_RNG_HPP

#include <cstdint>

namespace lorenz {

// splitmix64: tiny, fast, and identical output on every platform.
// Used everywhere randomness is needed so runs reproduce bit-for-bit.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection-free multiply-shift; bias is negligible for n << 2^64.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

// Derives an independent stream seed from a base seed plus stream tags,
// e.g. (role, system index) or (epoch).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0) {
    SplitMix64 mix(base);
    std::uint64_t s = mix.next_u64();
    s ^= SplitMix64(tag_a ^ 0xA5A5A5A5A5A5A5A5ULL).next_u64();
    s += SplitMix64(tag_b ^ 0x5C5C5C5C5C5C5C5CULL).next_u64();
    return SplitMix64(s).next_u64();
}

}  // namespace lorenz

#endif
