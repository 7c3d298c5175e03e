#pragma once
// Self-contained deterministic RNG. All randomized stages derive their draws
// from this generator so results are reproducible across platforms; standard
// library distributions are avoided because their output is not pinned by the
// standard.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace graphlit {

// 64-bit FNV-1a. Used for seed derivation and feature hashing.
inline uint64_t fnv1a64(std::string_view s, uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256** seeded via splitmix64.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    // Derives an independent stream for a named sub-task, e.g. per (book, epoch).
    static Rng derive(uint64_t seed, std::string_view tag, uint64_t index = 0) {
        uint64_t h = fnv1a64(tag);
        uint64_t mix = seed;
        mix ^= h + 0x9e3779b97f4a7c15ull + (mix << 6) + (mix >> 2);
        mix ^= index + 0x9e3779b97f4a7c15ull + (mix << 6) + (mix >> 2);
        return Rng(mix);
    }

    uint64_t next_u64() {
        uint64_t x = s_[1] * 5;
        uint64_t result = ((x << 7) | (x >> 57)) * 9;
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = (s_[3] << 45) | (s_[3] >> 19);
        return result;
    }

    // Uniform in [0, n), unbiased via rejection.
    uint64_t next_below(uint64_t n) {
        if (n <= 1) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (fixed algorithm, no cached spare so the
    // draw count stays predictable).
    double normal() {
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), in sorted order.
    std::vector<size_t> sample_without_replacement(size_t n, size_t k);

private:
    uint64_t s_[4]{};
};

inline std::vector<size_t> Rng::sample_without_replacement(size_t n, size_t k) {
    if (k > n) k = n;
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + static_cast<size_t>(next_below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace graphlit
