#include "fixsim/random.hpp"

#include <cmath>

namespace fixsim {

uint64_t splitmix64(uint64_t x) {
    uint64_t z = x + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double Rng::gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

size_t Rng::pick_weighted(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) {
            throw std::invalid_argument("pick_weighted: negative weight");
        }
        total += w;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("pick_weighted: all weights zero");
    }
    const double r = uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r < acc) {
            return i;
        }
    }
    return weights.size() - 1;
}

}  // namespace fixsim
