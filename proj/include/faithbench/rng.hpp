#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

#include "faithbench/error.hpp"

namespace faithbench {

// Deterministic random streams. Every stochastic site in the engine gets its
// own derived seed; there is no shared global generator. The generators are
// hand-rolled (splitmix64 seeding + xoshiro256**) so streams are identical
// across platforms and standard-library versions.

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a over a tag string, mixed into a master seed. Used to derive child
// seeds from (master, site identity) pairs.
inline uint64_t derive_seed(uint64_t master, std::string_view tag) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    uint64_t s = master ^ h;
    return splitmix64(s);
}

inline uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t index) {
    uint64_t s = derive_seed(master, tag) ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64(s);
}

class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Unbiased integer in [0, n) by rejection.
    uint64_t below(uint64_t n) {
        require(n > 0, ErrorCode::invalid_argument, "Rng::below requires n > 0");
        const uint64_t threshold = (~uint64_t{0} - n + 1) % n;
        for (;;) {
            const uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    template <class T>
    void shuffle(std::vector<T>& values) {
        for (size_t i = values.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

    // k distinct indices from [0, n), in random order.
    std::vector<size_t> sample_without_replacement(size_t n, size_t k) {
        require(k <= n, ErrorCode::invalid_argument, "sample size exceeds population");
        std::vector<size_t> pool(n);
        std::iota(pool.begin(), pool.end(), size_t{0});
        for (size_t i = 0; i < k; ++i) {
            const size_t j = i + static_cast<size_t>(below(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4];
};

}  // namespace faithbench
