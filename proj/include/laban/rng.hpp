#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace laban {

// Deterministic random source. mt19937_64 has a fully specified stream, and
// the normal draws use explicit Box-Muller instead of std::normal_distribution
// (whose output sequence is implementation defined), so identical seeds give
// identical streams on every build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);

    // Standard normal via Box-Muller; draws are cached in pairs.
    double normal();

    std::vector<double> normal_vector(std::size_t n);

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Mixes a master seed with stream identifiers (splitmix64 chain) so parallel
// work items get decorrelated, reproducible seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

}  // namespace laban
