#ifndef WEAKNET_RNG_HPP
#define WEAKNET_RNG_HPP

#include <cstdint>
#include <random>

namespace weaknet::sim {

/// SplitMix64 output for a given state; used to derive per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t state)
{
    std::uint64_t z = state + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Child seed for trial t: the (t+1)-th SplitMix64 output of a stream
/// started at base_seed. Closed form because SplitMix64 advances its state
/// by a fixed increment, so trial seeds are a pure function of (base, t).
inline std::uint64_t child_seed(std::uint64_t base, std::uint64_t trial)
{
    return splitmix64(base + trial * 0x9E3779B97F4A7C15ULL);
}

/// Deterministic portable generator: mt19937_64 (bit-exact by the standard)
/// with uniform doubles built from the top 53 bits, so sequences are
/// identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Index drawn from a finite distribution given as contiguous weights
    /// summing to ~1; falls through to the last index on rounding spill.
    template <typename RowExpr>
    std::int64_t categorical(const RowExpr& weights)
    {
        double u = uniform01();
        double acc = 0.0;
        const std::int64_t n = weights.size();
        for (std::int64_t i = 0; i < n; ++i) {
            acc += weights(i);
            if (u < acc) return i;
        }
        return n - 1;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace weaknet::sim

#endif // WEAKNET_RNG_HPP
