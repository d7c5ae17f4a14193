#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chirplink {

// Seeded random stream with hierarchical derivation.  Every stochastic piece
// of the simulator owns a stream derived from (master seed, labels), so
// adding a distance to a sweep or reordering trials never perturbs the draws
// of existing rows.

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace detail

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(detail::splitmix64(seed)), seed_(seed) {}

    // Child stream: mixes one more label into this stream's seed.  The parent
    // stream is not advanced, so sibling derivations are order-independent.
    [[nodiscard]] Rng derive(std::uint64_t label) const {
        return Rng(detail::splitmix64(seed_ ^ detail::splitmix64(label)));
    }
    [[nodiscard]] Rng derive(std::string_view label) const {
        return derive(detail::fnv1a(label));
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    double gauss(double mean, double stddev) {
        if (stddev == 0.0) return mean;
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }

    std::uint32_t uniform_int(std::uint32_t bound) {
        return std::uniform_int_distribution<std::uint32_t>(0, bound - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }
    std::uint64_t seed() const { return seed_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

} // namespace chirplink
