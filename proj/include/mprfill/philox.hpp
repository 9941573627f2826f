#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace mprfill {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Every draw is a pure function of (key, counter), so the stream used by a
// lattice site does not depend on which worker updates it.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeylA;
                key[1] += kWeylB;
            }
            const std::uint64_t p0 = std::uint64_t{kMulA} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMulB} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMulA = 0xD2511F53u;
    static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85u;
};

// Uniform double in [0, 1) from the top 53 bits of two 32-bit words.
constexpr double to_unit_double(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (std::uint64_t{hi} << 21) ^ (std::uint64_t{lo} >> 11);
    return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
}

// Keyed random stream addressed by (stream, index). Draws two uniforms per
// counter value; `stream` typically encodes a sweep or realization number and
// `index` a site.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    struct Pair {
        double first;
        double second;
    };

    constexpr Pair uniforms(std::uint64_t stream, std::uint64_t index) const noexcept {
        const auto out = Philox4x32::apply(
            {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
             static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
            key_);
        return {to_unit_double(out[0], out[1]), to_unit_double(out[2], out[3])};
    }

    // Standard normal via Box-Muller on one counter value.
    double normal(std::uint64_t stream, std::uint64_t index) const noexcept {
        const auto [u1, u2] = uniforms(stream, index);
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, n), n > 0. Multiply-shift on 53 bits; bias is
    // below 2^-20 for every n used here.
    std::uint64_t below(std::uint64_t n, std::uint64_t stream, std::uint64_t index) const noexcept {
        const double u = uniforms(stream, index).first;
        const auto v = static_cast<std::uint64_t>(u * static_cast<double>(n));
        return v < n ? v : n - 1;
    }

private:
    Philox4x32::Key key_;
};

// SplitMix64 finalizer; derives independent sub-seeds from a master seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace mprfill
