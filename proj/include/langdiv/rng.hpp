#pragma once

// Seeded random streams.
//
// Draws go through xoshiro256** with hand-written uniform helpers so that a
// given seed yields the same sequence with every standard library (the
// <random> distributions are implementation-defined). Independent
// substreams are keyed by mixing a tuple of integers with derive_seed().

#include <array>
#include <cstdint>
#include <initializer_list>
#include <utility>

namespace langdiv {

__extension__ typedef unsigned __int128 uint128_t;

/// One splitmix64 step: advances `state` and returns the mixed output.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Substream key for a tuple such as (seed, generation, child). Order of the
/// parts matters; each part is folded in through a splitmix64 round.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept
{
    std::uint64_t state = 0x6a09e667f3bcc909ULL;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t part : parts) {
        state ^= part + 0x9e3779b97f4a7c15ULL + (out << 6) + (out >> 2);
        out = splitmix64(state);
    }
    return out;
}

/// Tags that keep the substream families used by the simulator disjoint.
enum class StreamTag : std::uint64_t {
    init = 1,
    generation = 2,
    clustering = 3,
    realization = 4,
};

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept
    {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            word = splitmix64(sm);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept { return next(); }

    std::uint64_t next() noexcept
    {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound); bound must be positive. Unbiased
    /// (Lemire's multiply-and-reject).
    std::uint64_t below(std::uint64_t bound) noexcept
    {
        uint128_t product = static_cast<uint128_t>(next()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<uint128_t>(next()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

/// Fisher-Yates shuffle driven by Rng::below (std::shuffle's draws are not
/// portable across standard libraries).
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, Rng& rng) noexcept
{
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const auto j = rng.below(i);
        using std::swap;
        swap(first[i - 1], first[j]);
    }
}

} // namespace langdiv
