#pragma once

#include <cstdint>
#include <random>

namespace triqkd {

// splitmix64 step; used to derive independent stream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = base ^ (a * 0xd1342543de82ef95ull) ^ (b * 0xaf251af3b0f025b5ull);
    return splitmix64(s);
}

// Deterministic random stream. All protocol-relevant draws go through the
// hand-rolled helpers below instead of std:: distributions so that transcripts
// are reproducible across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1) with 53 random bits
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    int bit() { return static_cast<int>(next_u64() & 1u); }

    // uniform in [0, n), unbiased via power-of-two rejection
    std::size_t below(std::size_t n) {
        if (n <= 1) return 0;
        std::uint64_t mask = ~0ull >> __builtin_clzll((n - 1) | 1);
        for (;;) {
            std::uint64_t v = next_u64() & mask;
            if (v < n) return static_cast<std::size_t>(v);
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace triqkd
