// Copyright 2026 The unclonable-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "ucl/bits.hpp"

namespace ucl {

inline uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

/// 128-bit state for the seeded extendable-output mixer that backs the GGM
/// tree, the Feistel round functions, and rng substream derivation.
/// Deterministic and well-diffusing; not a cryptographic primitive.
struct Block128 {
    uint64_t lo = 0, hi = 0;

    friend bool operator==(const Block128&, const Block128&) = default;
};

/// One derivation step: child state of `s` under selector `sel`.
inline Block128 xof_step(Block128 s, uint64_t sel) {
    uint64_t a = mix64(s.lo ^ (0x9e3779b97f4a7c15ULL * (sel + 1)));
    uint64_t b = mix64(s.hi ^ a ^ 0x6a09e667f3bcc909ULL);
    a = mix64(a ^ b ^ sel);
    return Block128{a, b};
}

/// Expands a state into `nbits` output bits (counter mode over xof_step).
inline BitVec xof_expand(Block128 s, size_t nbits, uint64_t domain = 0) {
    BitVec out(nbits);
    size_t produced = 0;
    uint64_t ctr = 0;
    while (produced < nbits) {
        Block128 blk = xof_step(s, (domain << 32) | (0x100 + ctr));
        for (uint64_t word : {blk.lo, blk.hi}) {
            for (int i = 0; i < 64 && produced < nbits; ++i, ++produced)
                out.set(produced, (word >> i) & 1);
        }
        ++ctr;
    }
    return out;
}

/// xoshiro256** with splitmix64 seeding. All experiment randomness flows
/// through one master seed; parallel trials use substream().
class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            w = mix64(x);
        }
    }

    static uint64_t entropy_seed() {
        std::random_device rd;
        return (uint64_t(rd()) << 32) ^ rd();
    }

    /// Documented split: substream i of master seed s is seeded by
    /// mix64(mix64(s ^ i) + i). Trials are independent given distinct i.
    static Rng substream(uint64_t master_seed, uint64_t index) {
        return Rng(mix64(mix64(master_seed ^ index) + index));
    }

    uint64_t u64() {
        uint64_t& s0 = state_[0];
        uint64_t& s1 = state_[1];
        uint64_t& s2 = state_[2];
        uint64_t& s3 = state_[3];
        uint64_t result = rotl(s1 * 5, 7) * 9;
        uint64_t t = s1 << 17;
        s2 ^= s0;
        s3 ^= s1;
        s1 ^= s2;
        s0 ^= s3;
        s2 ^= t;
        s3 = rotl(s3, 45);
        return result;
    }

    bool bit() { return u64() >> 63; }

    /// Uniform in [0, n) without modulo bias.
    uint64_t range(uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::range(0)");
        uint64_t limit = ~uint64_t(0) - ~uint64_t(0) % n;
        uint64_t r;
        do {
            r = u64();
        } while (r >= limit);
        return r % n;
    }

    double real() { return double(u64() >> 11) * 0x1.0p-53; }

    BitVec bitvec(size_t len) {
        BitVec v(len);
        for (size_t i = 0; i < len; ++i) v.set(i, bit());
        return v;
    }

    Block128 block() { return Block128{u64(), u64()}; }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<uint64_t, 4> state_{};
};

}  // namespace ucl
