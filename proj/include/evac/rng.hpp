#pragma once

#include <cstdint>
#include <random>

namespace evac {

// SplitMix64 finalizer. Used to derive independent replication seeds from a
// master seed and to spread low-entropy user seeds before feeding the engine.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of replication `index` under master seed `master`:
//     seed_index = splitmix64(master XOR splitmix64(index + 1))
// so any single replication can be reproduced in isolation.
inline constexpr std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 1));
}

// Deterministic generator wrapper. All draws go through the helpers below
// (never through std::*_distribution, whose output is implementation-defined),
// so a seed fully pins every stochastic choice in a run.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, n). Modulo reduction; the bias is < n / 2^64 and
    // irrelevant for the cell/agent counts drawn here.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    bool bernoulli(double p) { return next_unit() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace evac
