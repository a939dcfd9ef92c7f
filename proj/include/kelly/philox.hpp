#pragma once

#include <cstdint>

namespace kelly {

// Philox-4x32-10 counter block cipher.  A draw is a pure function of
// (seed, path, round, lane), so paths can be generated in any order or on any
// thread, and two strategies fed the same indices see the same randomness.
struct Philox {
    static void block(std::uint64_t seed, std::uint64_t path, std::uint32_t round,
                      std::uint32_t lane, std::uint32_t out[4]) {
        constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
        constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        std::uint32_t c0 = round;
        std::uint32_t c1 = static_cast<std::uint32_t>(path);
        std::uint32_t c2 = static_cast<std::uint32_t>(path >> 32);
        std::uint32_t c3 = lane;
        std::uint32_t k0 = static_cast<std::uint32_t>(seed);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c0;
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            c0 = n0;
            c1 = lo1;
            c2 = n2;
            c3 = lo0;
            k0 += W0;
            k1 += W1;
        }
        out[0] = c0;
        out[1] = c1;
        out[2] = c2;
        out[3] = c3;
    }

    // uniform double in [0, 1) with 53 random bits
    static double uniform(std::uint64_t seed, std::uint64_t path, std::uint32_t round,
                          std::uint32_t lane = 0) {
        std::uint32_t v[4];
        block(seed, path, round, lane, v);
        const std::uint64_t bits = (static_cast<std::uint64_t>(v[0]) << 32 | v[1]) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }
};

}  // namespace kelly
