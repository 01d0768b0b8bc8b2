#pragma once
// deterministic RNG for seeded experiments: xoshiro256++ seeded via splitmix64.
// std:: distributions are implementation-defined, so bounded draws and unit
// doubles are spelled out here; outputs are stable across platforms.
#include <cstdint>

namespace sil {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct rng {
    uint64_t s[4];

    explicit rng(uint64_t seed) {
        uint64_t st = seed;
        for (auto& w : s) w = splitmix64(st);
    }

    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t next() {
        uint64_t r = rotl(s[0] + s[3], 23) + s[0];
        uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return r;
    }

    // uniform on [0, bound), rejection-debiased
    uint64_t below(uint64_t bound) {
        uint64_t threshold = (-bound) % bound;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // uniform on [lo, hi] inclusive
    int64_t range(int64_t lo, int64_t hi) {
        return lo + (int64_t)below((uint64_t)(hi - lo) + 1);
    }

    // uniform on [0, 1), 53 random bits
    double unit() { return (next() >> 11) * 0x1.0p-53; }

    // independent child stream (for deterministic parallel sampling)
    rng split(uint64_t stream) const {
        uint64_t st = s[0] ^ (stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
        return rng(splitmix64(st));
    }
};

}  // namespace sil
