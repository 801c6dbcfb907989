#pragma once

#include <cstdint>
#include <vector>

namespace i2i {

// splitmix64. Used everywhere instead of <random> engines/distributions so
// that seeded runs produce identical bytes on every platform and compiler.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n), n > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Gaussian via Box-Muller (one value per call; the twin is dropped to
    // keep the state sequence simple).
    double gaussian(double mean, double stddev);

private:
    std::uint64_t state_;
};

// Deterministic sub-stream seed for (seed, stream), e.g. one per user or
// per test event, so parallel evaluation cannot change results.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// In-place Fisher-Yates shuffle driven by Rng.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace i2i
