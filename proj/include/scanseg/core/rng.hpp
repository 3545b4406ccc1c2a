#pragma once

#include <cstdint>
#include <random>

namespace scanseg {

// Seeded random stream with platform-independent draws.
//
// std::mt19937_64 output is fixed by the standard, but the std::*_distribution
// adaptors are not, so uniform and normal variates are derived here directly
// from the raw 64-bit engine output.
//
// One stream per scanpath realization; never shared between threads.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    // Standard normal via the Marsaglia polar method.
    double normal();

    bool bernoulli(double p) { return uniform() < p; }

    // Derives an independent stream for a sub-task (e.g. cue noise per frame).
    RngStream fork(std::uint64_t salt) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// SplitMix64 finalizer; used to mix seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace scanseg
