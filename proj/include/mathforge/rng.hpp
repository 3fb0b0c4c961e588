#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mathforge {

// Deterministic RNG wrapper. mt19937_64 output is specified by the standard
// and all derived draws below avoid std::*_distribution, whose sequences are
// implementation-defined. Identical seeds give identical draws on any
// platform/compiler.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed), seed_(seed) {}

    std::uint64_t next() { return eng_(); }

    std::uint64_t seed() const { return seed_; }

    // Unbiased integer in [0, n) via rejection sampling. n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    // Inclusive range [lo, hi].
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + std::int64_t(below(std::uint64_t(hi - lo) + 1));
    }

    bool coin() { return (eng_() & 1) != 0; }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[below(items.size())];
    }

private:
    std::mt19937_64 eng_;
    std::uint64_t seed_;
};

// Stable 64-bit stream derivation for per-item rngs: mixing a global seed
// with an item key (e.g. a program source hash) so worker scheduling cannot
// perturb randomness.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view item_key);
std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t index);

} // namespace mathforge
