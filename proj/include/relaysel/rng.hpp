#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace relaysel {

// SplitMix64 finalizer. Used both as the generator step and to derive
// independent stream keys from (seed, tag, index, ...) tuples.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t k = mix64(base);
    for (auto p : parts) k = mix64(k ^ mix64(p + 0x632BE59BD9B4E019ULL));
    return k;
}

// Counter-based stream. Satisfies UniformRandomBitGenerator so it can drive
// std distributions, but the helpers below are preferred: their output does
// not depend on the standard library's distribution implementation, which
// keeps CSV output byte-stable.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key) noexcept : state_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    // Exponential with the given mean; 1 - u lies in (0, 1] so log is finite.
    double exponential(double mean) noexcept { return -mean * std::log1p(-uniform()); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept {
        // Lemire's multiply-shift; bias is < n / 2^64 which is negligible here.
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace relaysel
