#pragma once

#include <cstdint>
#include <random>

namespace vlab {

// Seeded generator with a platform-independent conversion to doubles, so that
// identical seeds give bitwise-identical draws everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    // Standard normal by Box-Muller (both draws consumed, one returned).
    double normal();
    std::uint64_t next() { return engine_(); }
    // Uniform index in [0, n).
    std::uint64_t index(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

private:
    std::mt19937_64 engine_;
};

// Independent stream for (seed, stream) pairs, e.g. one per Monte-Carlo replicate.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace vlab
