#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace gmq {

// splitmix64 step; used to derive independent child seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Deterministic seed derivation: child streams depend on the order of the
// stream ids; the returned value is the avalanched splitmix output.
inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> streams) {
    std::uint64_t s = seed;
    std::uint64_t out = splitmix64(s);
    for (std::uint64_t x : streams) {
        s ^= x + 0x9E3779B97F4A7C15ull + (s << 6) + (s >> 2);
        out = splitmix64(s);
    }
    return out;
}

// mt19937_64 with hand-rolled distributions. std::uniform_* and std::shuffle
// are implementation-defined, so we avoid them to keep generated instances
// stable across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        gen_.seed(splitmix64(s));
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound); bound > 0. Rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % bound;
    }

    // Fisher-Yates.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

} // namespace gmq
