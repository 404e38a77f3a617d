#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fieldnet {

// Counter-style splitmix64 generator. Streams are derived by hashing entity
// keys into the seed, so records for one entity never depend on how many
// other entities exist.
class Rng {
public:
    explicit Rng(std::uint64_t key) : state_(key) {}

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        return scramble(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)) ^ b);
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return scramble(state_);
    }

    // Uniform in (0, 1): never 0, safe under log().
    double uniform() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    bool bernoulli(double p) { return uniform() < p; }

private:
    static std::uint64_t scramble(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace fieldnet
