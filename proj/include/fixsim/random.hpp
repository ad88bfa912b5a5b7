#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace fixsim {

uint64_t splitmix64(uint64_t x);

// Per-sequence seed derivation: master XOR splitmix of the sequence index.
inline uint64_t derive_sequence_seed(uint64_t master_seed, uint64_t sequence_index) {
    return master_seed ^ splitmix64(sequence_index);
}

// Deterministic RNG. mt19937_64 output is fully specified by the standard and
// all real-valued draws are built from raw 64-bit words here, so the sample
// stream is identical across platforms for a given seed.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) {
        if (lo > hi) {
            throw std::invalid_argument("Rng::uniform: lo > hi");
        }
        return lo + (hi - lo) * uniform();
    }

    // Uniform integer in [0, n), n > 0. Rejection keeps the draw unbiased.
    uint64_t uniform_index(uint64_t n) {
        if (n == 0) {
            throw std::invalid_argument("Rng::uniform_index: n == 0");
        }
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t u;
        do {
            u = next_u64();
        } while (u >= limit);
        return u % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double gaussian();

    // Index draw from unnormalized non-negative weights.
    size_t pick_weighted(std::span<const double> weights);

  private:
    std::mt19937_64 engine_;
};

}  // namespace fixsim
