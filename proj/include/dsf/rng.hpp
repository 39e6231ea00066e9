#ifndef DSF_RNG_HPP
#define DSF_RNG_HPP

#include <cstdint>
#include <initializer_list>

namespace dsf {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Order-sensitive combination of seeds, e.g. derive_seed({base, run, split}).
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
    return h;
}

/// Uniform double in [0,1) from the top 53 bits of a word.
constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based generator: draw n is mix64(seed, n). Streams never depend on
/// library distribution implementations, so sequences are portable.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(mix64(seed)) {}

    std::uint64_t next_u64() { return mix64(seed_ ^ mix64(counter_++)); }
    double uniform() { return to_unit(next_u64()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    /// Stateless draw at an explicit position; used for dropout masks.
    static double at(std::uint64_t seed, std::uint64_t index) {
        return to_unit(mix64(mix64(seed) ^ mix64(index)));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace dsf

#endif // DSF_RNG_HPP
