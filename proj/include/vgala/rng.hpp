// rng.hpp
//
// Deterministic, splittable random number utilities. All randomness in the
// project flows through these helpers so that a (seed, stream) pair produces
// the same values regardless of evaluation order or standard library. The
// generator is SplitMix64; distributions are derived from raw 64-bit draws
// only, which keeps scenario builds and Monte Carlo runs byte-reproducible.

#pragma once

#include <cmath>
#include <cstdint>

namespace vgala {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    double exponential(double mean) {
        double u;
        do { u = next_double(); } while (u <= 0.0);
        return -mean * std::log(u);
    }

    // Box-Muller; one value per call (the second draw is discarded to keep
    // the stream position independent of call parity).
    double normal(double mean, double stddev) {
        double u1;
        do { u1 = next_double(); } while (u1 <= 0.0);
        double u2 = next_double();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return mean + stddev * z;
    }

    // Knuth's product method; large means are split in half recursively so the
    // running product never underflows.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean > 256.0) return poisson(mean / 2.0) + poisson(mean / 2.0);
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_double();
        } while (p > limit);
        return k - 1;
    }

private:
    std::uint64_t state_;
};

// Stable stream derivation: hash the parent seed with one or more stream ids.
// Used to give every (cell, station) pair and every Monte Carlo draw its own
// independent generator, so parallel evaluation order cannot matter.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    Rng mix(seed ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xc2b2ae3d27d4eb4fULL));
    return mix.next_u64();
}

} // namespace vgala
