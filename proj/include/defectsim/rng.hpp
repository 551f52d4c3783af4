#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace defectsim {

// SplitMix64 generator. One 64-bit word of state, fixed published constants,
// so sequences are reproducible across platforms and implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), built from the top 53 bits.
    double next_uniform() {
        ++uniform_draws_;
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Number of next_uniform() calls so far; lets callers audit draw discipline.
    std::uint64_t uniform_draws() const { return uniform_draws_; }

private:
    std::uint64_t state_;
    std::uint64_t uniform_draws_ = 0;
};

// Fisher-Yates shuffle from the back: for i = n-1 .. 1 pick j in [0, i] as
// floor(u * (i + 1)). Consumes exactly n - 1 uniform draws and returns a
// permutation of 0..n-1.
inline std::vector<std::size_t> shuffle_permutation(std::size_t n, Rng& rng) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i-- > 1;) {
        auto j = static_cast<std::size_t>(rng.next_uniform() * static_cast<double>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

}  // namespace defectsim
