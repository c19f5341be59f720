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

#include "ucl/games.hpp"

namespace ucl::games {

// ---------------------------------------------------------------------------
// The simultaneous inner-product game over Z_q^n. Two players receive
// (u, z_b) samples with z_0 = <u, x> and z_1 = m + <u, x>; both must name
// the shared bit b. What they know about x is a pluggable leakage policy
// standing in for the family rho_x (no hardness is claimed either way).
// ---------------------------------------------------------------------------

enum class IpDist { Identical, Independent };
enum class IpLeakage { None, Full };

struct SimultIpParams {
    uint32_t q = 257;  // modulus
    uint32_t n = 4;    // dimension
    IpDist dist_x = IpDist::Identical;
    IpDist dist_ch = IpDist::Identical;
    IpLeakage leakage = IpLeakage::None;
};

using ZVec = std::vector<uint32_t>;

namespace detail {

inline ZVec random_zvec(uint32_t q, uint32_t n, Rng& rng) {
    ZVec v(n);
    for (auto& e : v) e = uint32_t(rng.range(q));
    return v;
}

inline uint32_t ip_mod(const ZVec& u, const ZVec& x, uint32_t q) {
    uint64_t acc = 0;
    for (size_t i = 0; i < u.size(); ++i) acc = (acc + uint64_t(u[i]) * x[i]) % q;
    return uint32_t(acc);
}

inline std::string zvec_str(const ZVec& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

inline ZVec zvec_parse(const std::string& s, uint32_t n) {
    ZVec v;
    size_t pos = 0;
    while (pos <= s.size() && v.size() < n) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        v.push_back(uint32_t(std::stoul(s.substr(pos, comma - pos))));
        pos = comma + 1;
    }
    if (v.size() != n) throw std::invalid_argument("zvec_parse: wrong arity");
    return v;
}

}  // namespace detail

/// The five-step game, Monte-Carlo estimated. Builtin adversaries:
/// guess-zero / guess-uniform stay blind; forward-b recomputes the inner
/// product on both sides when the leakage policy reveals x.
inline ExperimentResult run_simult_ip(const SimultIpParams& p, const GameConfig& cfg) {
    if (p.q < 2) throw std::invalid_argument("run_simult_ip: modulus must be at least 2");
    auto trial = [&](Rng& rng) -> TrialOutcome {
        // Step 1: challenge inputs.
        ZVec xb = detail::random_zvec(p.q, p.n, rng);
        ZVec xc = p.dist_x == IpDist::Identical ? xb : detail::random_zvec(p.q, p.n, rng);
        // Step 2: challenge samples.
        ZVec ub = detail::random_zvec(p.q, p.n, rng);
        uint32_t mb = uint32_t(rng.range(p.q));
        ZVec uc = ub;
        uint32_t mc = mb;
        if (p.dist_ch == IpDist::Independent) {
            uc = detail::random_zvec(p.q, p.n, rng);
            mc = uint32_t(rng.range(p.q));
        }
        // Step 3: the z values.
        uint32_t ipb = detail::ip_mod(ub, xb, p.q);
        uint32_t ipc = detail::ip_mod(uc, xc, p.q);
        // Step 4: shared bit.
        bool b = rng.bit();
        uint32_t zb = b ? (mb + ipb) % p.q : ipb;
        uint32_t zc = b ? (mc + ipc) % p.q : ipc;

        auto leak = [&](const ZVec& x) -> std::vector<uint8_t> {
            kv::Writer w;
            if (p.leakage == IpLeakage::Full) w.put("x", detail::zvec_str(x));
            return w.bytes();
        };
        std::vector<uint8_t> side_b = leak(xb), side_c = leak(xc);

        // Step 5: local answers.
        auto play = [&](const ZVec& u, uint32_t z, const std::vector<uint8_t>& classical,
                        bool is_b) -> bool {
            switch (cfg.adversary.kind) {
                case Adversary::Kind::GuessUniform:  // no splitter exists to share a draw
                case Adversary::Kind::GuessIndependent:
                    return rng.bit();
                case Adversary::Kind::GuessZero:
                case Adversary::Kind::SharedCoin:
                    return false;
                case Adversary::Kind::ForwardB: {
                    kv::Reader r(classical);
                    if (!r.has("x")) return rng.bit();
                    ZVec x = detail::zvec_parse(r.get("x"), p.n);
                    return z != detail::ip_mod(u, x, p.q);
                }
                case Adversary::Kind::Custom: {
                    kv::Writer w;
                    w.put_u64("anslen", 1);
                    w.put("u", detail::zvec_str(u));
                    w.put_u64("z", z);
                    w.put_u64("q", p.q);
                    qsim::StateVector empty(0);
                    LocalView view(&empty, {});
                    LocalInput li{w.bytes(), view, classical};
                    return (is_b ? cfg.adversary.play_b : cfg.adversary.play_c)(li, rng).get(0);
                }
            }
            return false;
        };

        bool bb = play(ub, zb, side_b, true);
        bool bc = play(uc, zc, side_c, false);
        return TrialOutcome{bb == b && bc == b, {}};
    };

    ExperimentResult res = monte_carlo(trial, cfg.trials, cfg.seed, cfg.jobs);
    res.game = "simult-ip";
    res.scheme = "ip";
    res.adversary = cfg.adversary.name;
    res.distribution = std::string(p.dist_x == IpDist::Identical ? "x-id" : "x-ind") + "/" +
                       (p.dist_ch == IpDist::Identical ? "ch-id" : "ch-ind");
    res.params = {{"q", std::to_string(p.q)},
                  {"n", std::to_string(p.n)},
                  {"leakage", p.leakage == IpLeakage::Full ? "full" : "none"}};
    return res;
}

/// Exact value of the best deterministic leakage-free strategy pair,
/// found by enumerating every strategy (maps (u, z) -> bit) against the
/// full finite probability space. Tiny parameters only.
inline double simult_ip_best_deterministic(uint32_t q, uint32_t n, IpDist dist_x, IpDist dist_ch) {
    uint64_t un = 1;
    for (uint32_t i = 0; i < n; ++i) {
        un *= q;
        if (un > 16) throw std::invalid_argument("simult_ip_best_deterministic: space too large");
    }
    uint64_t contexts = un * q;  // (u, z) pairs
    if (contexts > 8) throw std::invalid_argument("simult_ip_best_deterministic: strategy space too large");

    auto unrank = [&](uint64_t idx) {
        ZVec v(n);
        for (uint32_t i = 0; i < n; ++i) {
            v[i] = uint32_t(idx % q);
            idx /= q;
        }
        return v;
    };
    auto ctx = [&](const ZVec& u, uint32_t z) {
        uint64_t r = 0;
        for (uint32_t i = n; i-- > 0;) r = r * q + u[i];
        return r * q + z;
    };

    // Enumerate the finite probability space once.
    struct Draw {
        uint64_t ctx_b, ctx_c;
        bool b;
    };
    std::vector<Draw> space;
    uint64_t xs = dist_x == IpDist::Identical ? un : un * un;
    uint64_t chs = dist_ch == IpDist::Identical ? un * q : un * q * un * q;
    for (uint64_t xi = 0; xi < xs; ++xi) {
        ZVec xb = unrank(xi % un);
        ZVec xc = dist_x == IpDist::Identical ? xb : unrank(xi / un);
        for (uint64_t ci = 0; ci < chs; ++ci) {
            uint64_t cb = ci % (un * q);
            uint64_t cc = dist_ch == IpDist::Identical ? cb : ci / (un * q);
            ZVec ub = unrank(cb % un);
            uint32_t mb = uint32_t(cb / un);
            ZVec uc = unrank(cc % un);
            uint32_t mc = uint32_t(cc / un);
            uint32_t ipb = detail::ip_mod(ub, xb, q);
            uint32_t ipc = detail::ip_mod(uc, xc, q);
            for (int b = 0; b < 2; ++b) {
                uint32_t zb = b ? (mb + ipb) % q : ipb;
                uint32_t zc = b ? (mc + ipc) % q : ipc;
                space.push_back({ctx(ub, zb), ctx(uc, zc), b == 1});
            }
        }
    }

    uint64_t nstrat = uint64_t(1) << contexts;
    uint64_t best = 0;
    for (uint64_t sb = 0; sb < nstrat; ++sb) {
        for (uint64_t sc = 0; sc < nstrat; ++sc) {
            uint64_t wins = 0;
            for (const Draw& d : space) {
                bool gb = (sb >> d.ctx_b) & 1;
                bool gc = (sc >> d.ctx_c) & 1;
                if (gb == d.b && gc == d.b) ++wins;
            }
            best = std::max(best, wins);
        }
    }
    return double(best) / double(space.size());
}

}  // namespace ucl::games
