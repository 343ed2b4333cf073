#pragma once

#include <cstdint>
#include <random>

namespace fedlab::rng {

/// splitmix64 step (Steele, Lea, Flood 2014). Used as the seed mixer everywhere
/// so that derived streams (per client, per round) are reproducible and
/// independent of execution order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Mix up to three 64-bit values into one seed: each word is absorbed through
/// one splitmix64 step. mix(s, a) != mix(s, b) for a != b with overwhelming
/// probability; collisions across (round, client) pairs are not a concern at
/// simulation scale.
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t state = a;
    std::uint64_t h = splitmix64(state);
    state = h ^ b;
    h = splitmix64(state);
    state = h ^ c;
    return splitmix64(state);
}

inline std::mt19937_64 engine(std::uint64_t seed) {
    return std::mt19937_64{seed};
}

}  // namespace fedlab::rng
