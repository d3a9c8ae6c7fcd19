#pragma once

#include <cstdint>
#include <vector>

namespace loadfair {

// Splittable counter-free PRNG (splitmix64 core). All randomness in the
// library flows from one root seed; split() derives an independent child
// stream so branch exploration stays seed-deterministic regardless of
// evaluation order. std:: distributions are avoided on purpose: their
// output is implementation-defined and would break golden tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection sampling keeps the draw unbiased.
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    Rng split() { return Rng(next_u64() ^ 0xd1b54a32d192ed03ULL); }

    // Index draw with probability proportional to weights[i]; all-zero
    // weights fall back to uniform.
    int sample_discrete(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w > 0 ? w : 0.0;
        if (total <= 0.0) return static_cast<int>(next_below(weights.size()));
        double r = next_double() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const double w = weights[i] > 0 ? weights[i] : 0.0;
            if (r < w) return static_cast<int>(i);
            r -= w;
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    std::uint64_t state_;
};

}  // namespace loadfair
