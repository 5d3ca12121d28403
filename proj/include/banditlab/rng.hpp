#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace banditlab {

// SplitMix64 step; used both as a mixer and for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministically derives an independent stream seed from a master seed
// and a path of indices (e.g. {kBenchStream, repetition}). Streams with
// different paths never collide in practice.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = master;
    for (std::uint64_t p : path) {
        std::uint64_t t = s ^ (p + 0x9e3779b97f4a7c15ULL);
        s = splitmix64(t);
    }
    std::uint64_t t = s;
    return splitmix64(t);
}

// Stream name constants for seed derivation paths.
inline constexpr std::uint64_t kBenchStream = 0x01;
inline constexpr std::uint64_t kTuneStream = 0x02;
inline constexpr std::uint64_t kTrialStream = 0x03;

// Randomness source handed to policies, samplers and simulations.
// All sampling is done through this wrapper so that a fixed seed yields a
// bit-reproducible draw sequence regardless of platform distribution
// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be positive.
    std::size_t uniform_index(std::size_t n) {
        // Rejection-free modulo bias is negligible for the n used here,
        // but keep it exact anyway.
        std::uint64_t bound = n;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return static_cast<std::size_t>(v % bound);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace banditlab
