#pragma once

// Counter-based pseudo-random streams. Each stream is a pure function of
// (seed, stream id, counter): draws can be made in any order, streams for
// different blocks/trials never interact, and adding trials later does not
// reshuffle earlier draws.

#include <cmath>
#include <cstdint>

namespace lsi {

namespace detail {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

}  // namespace detail

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b = 0) {
    std::uint64_t k = detail::mix64(seed + detail::kGamma);
    k = detail::mix64(k ^ (a + detail::kGamma));
    k = detail::mix64(k ^ (b + detail::kGamma));
    return k;
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream_a,
               std::uint64_t stream_b = 0)
        : key_(derive_stream(seed, stream_a, stream_b)) {}

    std::uint64_t bits(std::uint64_t i) const {
        return detail::mix64(key_ + (i + 1) * detail::kGamma);
    }

    // uniform on [0, 1)
    double uniform(std::uint64_t i) const {
        return static_cast<double>(bits(i) >> 11) * 0x1.0p-53;
    }

    // uniform on (0, 1]; safe as a log argument
    double uniform_open(std::uint64_t i) const {
        return (static_cast<double>(bits(i) >> 11) + 1.0) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; consumes counters 2i and 2i+1
    double normal(std::uint64_t i) const {
        const double u1 = uniform_open(2 * i);
        const double u2 = uniform(2 * i + 1);
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t key_;
};

}  // namespace lsi
