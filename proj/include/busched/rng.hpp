#pragma once

#include <cstdint>
#include <random>

namespace busched {

// Seeded generator used by every randomized component.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Distributions are derived by hand from the raw 64-bit words
// rather than through <random> distribution classes, whose algorithms are
// implementation-defined; this keeps generated instances bit-identical
// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Fair coin from the top bit.
    bool coin() { return (engine_() >> 63) != 0; }

    // Integer in [0, n). Multiply-shift on the top 32 bits; bias is below 2^-32.
    std::uint64_t below(std::uint64_t n) { return ((engine_() >> 32) * n) >> 32; }

    // Integer in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::mt19937_64 engine_;
};

// Stateless 64-bit mixer (SplitMix64 finalizer), used for keyed noise.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace busched
