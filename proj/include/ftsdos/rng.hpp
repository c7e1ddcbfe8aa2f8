#pragma once

#include <cstdint>
#include <random>

namespace ftsdos {

/// SplitMix64 finalizer; used to derive independent stream seeds from one base seed.
constexpr std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream)
{
    return splitmix64(base ^ splitmix64(stream));
}

/**
 * mt19937_64 with portable real-valued draws.
 *
 * The standard distributions are implementation-defined, so uniforms are
 * built from the top 53 bits of each engine output. Sequences are identical
 * across standard libraries for the same seed.
 */
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal (Box-Muller, one value per call).
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace ftsdos
