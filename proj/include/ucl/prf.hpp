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

#include <algorithm>
#include <optional>
#include <vector>

#include "ucl/bits.hpp"
#include "ucl/obf.hpp"
#include "ucl/rng.hpp"

namespace ucl::prf {

using circ::as_program;
using circ::BoolCircuit;
using circ::Builder;
using circ::ClassKey;
using circ::KeyedCircuitClass;
using circ::Program;
using circ::ProgPtr;
using circ::register_program;

// Correctness-contract primitives: GGM tree over the seeded mixer and a
// Feistel-permutation PRG that is injective by construction. Neither is a
// security target at this scale.

// ---------------------------------------------------------------------------
// Injective length-doubling PRG
// ---------------------------------------------------------------------------

/// 4-round Feistel permutation over 2*in_len bits applied to r || 0^in_len.
/// A permutation restricted to a slice is injective at any length.
struct PrgSpec {
    uint32_t in_len = 0;
    Block128 seed;
};

inline BitVec prg(const PrgSpec& spec, const BitVec& r);
inline bool prg_verify_injective(const PrgSpec& spec);

/// Small domains are exhaustively checked at generation time; beyond the
/// checkable range injectivity still holds structurally.
inline PrgSpec prg_gen(uint32_t in_len, Rng& rng) {
    PrgSpec spec{in_len, rng.block()};
    if (in_len > 0 && in_len <= 14 && !prg_verify_injective(spec))
        throw std::logic_error("prg_gen: injectivity self-check failed");
    return spec;
}

namespace detail {
inline Block128 absorb(Block128 s, const BitVec& v) {
    std::vector<uint8_t> bytes = v.to_bytes();
    for (size_t i = 0; i < bytes.size(); i += 8) {
        uint64_t word = 0;
        for (size_t j = 0; j < 8 && i + j < bytes.size(); ++j) word |= uint64_t(bytes[i + j]) << (8 * j);
        s = xof_step(s, word ^ 0xa5a5a5a5a5a5a5a5ULL);
    }
    return s;
}
}  // namespace detail

inline BitVec prg(const PrgSpec& spec, const BitVec& r) {
    if (r.size() != spec.in_len) throw std::invalid_argument("prg: input length mismatch");
    BitVec left = r;
    BitVec right(spec.in_len);
    for (uint64_t round = 0; round < 4; ++round) {
        Block128 s = xof_step(spec.seed, 0x40 + round);
        BitVec f = xof_expand(detail::absorb(s, right), spec.in_len, 0x40 + round);
        BitVec nl = right;
        right = left ^ f;
        left = nl;
    }
    return concat(left, right);
}

/// Exhaustive distinctness check; meant for in_len <= 14.
inline bool prg_verify_injective(const PrgSpec& spec) {
    if (spec.in_len > 14) throw std::invalid_argument("prg_verify_injective: domain too large");
    std::vector<BitVec> images;
    images.reserve(size_t(1) << spec.in_len);
    for (uint64_t r = 0; r < (uint64_t(1) << spec.in_len); ++r)
        images.push_back(prg(spec, BitVec::from_u64(spec.in_len, r)));
    std::sort(images.begin(), images.end());
    return std::adjacent_find(images.begin(), images.end()) == images.end();
}

// ---------------------------------------------------------------------------
// GGM puncturable PRF
// ---------------------------------------------------------------------------

struct GgmKey {
    Block128 root;
    uint32_t in_len = 0;
    uint32_t out_len = 0;

    friend bool operator==(const GgmKey&, const GgmKey&) = default;

    std::vector<uint8_t> serialize() const {
        kv::Writer w;
        w.put_u64("root_lo", root.lo);
        w.put_u64("root_hi", root.hi);
        w.put_u64("in", in_len);
        w.put_u64("out", out_len);
        return w.bytes();
    }

    static GgmKey deserialize(const std::vector<uint8_t>& bytes) {
        kv::Reader r(bytes);
        return GgmKey{Block128{r.get_u64("root_lo"), r.get_u64("root_hi")}, uint32_t(r.get_u64("in")),
                      uint32_t(r.get_u64("out"))};
    }
};

inline GgmKey prf_gen(uint32_t in_len, uint32_t out_len, Rng& rng) {
    return GgmKey{rng.block(), in_len, out_len};
}

namespace detail {
// Child selectors 2 (bit 0) and 3 (bit 1); leaf expansion domain 1.
inline Block128 ggm_child(Block128 s, bool bit) { return xof_step(s, bit ? 3 : 2); }
inline BitVec ggm_leaf(Block128 s, uint32_t out_len) { return xof_expand(s, out_len, 1); }
}  // namespace detail

inline BitVec prf_eval(const GgmKey& k, const BitVec& x) {
    if (x.size() != k.in_len) throw std::invalid_argument("prf_eval: input length mismatch");
    Block128 s = k.root;
    for (uint32_t i = 0; i < k.in_len; ++i) s = detail::ggm_child(s, x.get(i));
    return detail::ggm_leaf(s, k.out_len);
}

/// Punctured key: the co-path seeds covering everything except the
/// punctured points.
struct PuncturedPrfKey {
    struct Node {
        uint32_t depth = 0;   // prefix length
        BitVec prefix;        // first `depth` input bits
        Block128 state;
    };

    uint32_t in_len = 0;
    uint32_t out_len = 0;
    std::vector<BitVec> points;   // 1 or 2, deduplicated
    std::vector<Node> nodes;

    friend bool operator==(const PuncturedPrfKey& a, const PuncturedPrfKey& b) {
        if (a.in_len != b.in_len || a.out_len != b.out_len || a.points != b.points ||
            a.nodes.size() != b.nodes.size())
            return false;
        for (size_t i = 0; i < a.nodes.size(); ++i)
            if (a.nodes[i].depth != b.nodes[i].depth || !(a.nodes[i].prefix == b.nodes[i].prefix) ||
                !(a.nodes[i].state == b.nodes[i].state))
                return false;
        return true;
    }

    std::vector<uint8_t> serialize() const {
        kv::Writer w;
        w.put_u64("in", in_len);
        w.put_u64("out", out_len);
        w.put_u64("npoints", points.size());
        for (size_t i = 0; i < points.size(); ++i) w.put("point" + std::to_string(i), points[i].to_hex());
        w.put_u64("nnodes", nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) {
            const Node& nd = nodes[i];
            w.put_u64("d" + std::to_string(i), nd.depth);
            w.put("p" + std::to_string(i), nd.prefix.to_hex());
            w.put_u64("lo" + std::to_string(i), nd.state.lo);
            w.put_u64("hi" + std::to_string(i), nd.state.hi);
        }
        return w.bytes();
    }

    static PuncturedPrfKey deserialize(const std::vector<uint8_t>& bytes) {
        kv::Reader r(bytes);
        PuncturedPrfKey k;
        k.in_len = uint32_t(r.get_u64("in"));
        k.out_len = uint32_t(r.get_u64("out"));
        size_t np = r.get_u64("npoints");
        for (size_t i = 0; i < np; ++i)
            k.points.push_back(BitVec::from_hex(k.in_len, r.get("point" + std::to_string(i))));
        size_t nn = r.get_u64("nnodes");
        for (size_t i = 0; i < nn; ++i) {
            Node nd;
            nd.depth = uint32_t(r.get_u64("d" + std::to_string(i)));
            nd.prefix = BitVec::from_hex(nd.depth, r.get("p" + std::to_string(i)));
            nd.state = Block128{r.get_u64("lo" + std::to_string(i)), r.get_u64("hi" + std::to_string(i))};
            k.nodes.push_back(std::move(nd));
        }
        return k;
    }
};

namespace detail {
inline void puncture_rec(Block128 state, const BitVec& prefix, uint32_t depth,
                         const std::vector<BitVec>& points_here, uint32_t in_len,
                         std::vector<PuncturedPrfKey::Node>& out) {
    if (points_here.empty()) {
        out.push_back({depth, prefix, state});
        return;
    }
    if (depth == in_len) return;  // punctured leaf dropped
    std::vector<BitVec> left, right;
    for (const BitVec& p : points_here) (p.get(depth) ? right : left).push_back(p);
    BitVec p0 = concat(prefix, BitVec::from_bits({0}));
    BitVec p1 = concat(prefix, BitVec::from_bits({1}));
    puncture_rec(ggm_child(state, false), p0, depth + 1, left, in_len, out);
    puncture_rec(ggm_child(state, true), p1, depth + 1, right, in_len, out);
}
}  // namespace detail

inline PuncturedPrfKey prf_puncture(const GgmKey& k, std::vector<BitVec> points) {
    if (points.empty() || points.size() > 2) throw std::invalid_argument("prf_puncture: need 1 or 2 points");
    for (const BitVec& p : points)
        if (p.size() != k.in_len) throw std::invalid_argument("prf_puncture: point length mismatch");
    if (points.size() == 2 && points[0] == points[1]) points.pop_back();
    PuncturedPrfKey out;
    out.in_len = k.in_len;
    out.out_len = k.out_len;
    out.points = points;
    detail::puncture_rec(k.root, BitVec(0), 0, points, k.in_len, out.nodes);
    return out;
}

/// Evaluation under a punctured key: nullopt exactly on the punctured
/// points, identical to prf_eval elsewhere.
inline std::optional<BitVec> prf_punct_eval(const PuncturedPrfKey& k, const BitVec& x) {
    if (x.size() != k.in_len) throw std::invalid_argument("prf_punct_eval: input length mismatch");
    for (const BitVec& p : k.points)
        if (x == p) return std::nullopt;
    for (const auto& node : k.nodes) {
        if (node.prefix == x.slice(0, node.depth)) {
            Block128 s = node.state;
            for (uint32_t i = node.depth; i < k.in_len; ++i) s = detail::ggm_child(s, x.get(i));
            return detail::ggm_leaf(s, k.out_len);
        }
    }
    throw std::logic_error("prf_punct_eval: co-path does not cover input");
}

// ---------------------------------------------------------------------------
// The PRF family as a keyed circuit class
// ---------------------------------------------------------------------------

/// Cutoff below which class circuits are emitted as TABLE gates (and are
/// therefore bit-encodable); above it the class emits native evaluator
/// programs with the same contract.
constexpr uint32_t kPrfTableCutoff = 12;

class PrfProgram final : public Program {
  public:
    explicit PrfProgram(GgmKey k) : key_(std::move(k)) {}

    size_t input_len() const override { return key_.in_len; }
    size_t output_len() const override { return key_.out_len; }
    std::optional<BitVec> run(const BitVec& x) const override { return prf_eval(key_, x); }
    std::string kind() const override { return "prf"; }
    void fields(kv::Writer& w) const override { w.put_bytes("key", key_.serialize()); }
    const GgmKey& key() const { return key_; }

    static ProgPtr from_kv(const kv::Reader& r) {
        return std::make_shared<PrfProgram>(GgmKey::deserialize(r.get_bytes("key")));
    }

  private:
    GgmKey key_;
};

class PunctPrfProgram final : public Program {
  public:
    explicit PunctPrfProgram(PuncturedPrfKey k) : key_(std::move(k)) {}

    size_t input_len() const override { return key_.in_len; }
    size_t output_len() const override { return key_.out_len; }
    std::optional<BitVec> run(const BitVec& x) const override { return prf_punct_eval(key_, x); }
    std::string kind() const override { return "prf-punct"; }
    void fields(kv::Writer& w) const override { w.put_bytes("key", key_.serialize()); }

    static ProgPtr from_kv(const kv::Reader& r) {
        return std::make_shared<PunctPrfProgram>(PuncturedPrfKey::deserialize(r.get_bytes("key")));
    }

  private:
    PuncturedPrfKey key_;
};

inline const bool kPrfProgramsRegistered =
    register_program("prf", &PrfProgram::from_kv) && register_program("prf-punct", &PunctPrfProgram::from_kv);

namespace detail {
inline BoolCircuit prf_table_circuit(uint32_t n, uint32_t m,
                                     const std::function<std::optional<BitVec>(const BitVec&)>& f) {
    Builder b(n);
    std::vector<uint32_t> ins;
    for (uint32_t i = 0; i < n; ++i) ins.push_back(i);
    std::vector<std::vector<bool>> tables(m + 1, std::vector<bool>(size_t(1) << n));
    bool any_bot = false;
    for (uint64_t v = 0; v < (uint64_t(1) << n); ++v) {
        BitVec enc = encode_output(f(BitVec::from_u64(n, v)), m);
        if (!enc.get(m)) any_bot = true;
        for (uint32_t j = 0; j <= m; ++j) tables[j][v] = enc.get(j);
    }
    std::vector<uint32_t> outs;
    for (uint32_t j = 0; j < m; ++j) outs.push_back(b.table(ins, tables[j]));
    if (!any_bot) return b.finish(std::move(outs));
    uint32_t flag = b.table(ins, tables[m]);
    return b.finish_bot(std::move(outs), flag);
}
}  // namespace detail

/// {PRF.Eval(k, .)} keyed by serialized GgmKeys; plain puncturing goes
/// through prf_puncture.
inline KeyedCircuitClass as_keyed_class(uint32_t in_len, uint32_t out_len) {
    KeyedCircuitClass cls;
    cls.name = "ggm-prf";
    cls.input_len = in_len;
    cls.output_len = out_len;
    cls.sample_key = [in_len, out_len](Rng& rng) { return prf_gen(in_len, out_len, rng).serialize(); };
    cls.build = [in_len, out_len](const ClassKey& key) -> ProgPtr {
        GgmKey k = GgmKey::deserialize(key);
        if (in_len <= kPrfTableCutoff)
            return as_program(detail::prf_table_circuit(in_len, out_len,
                                                        [&k](const BitVec& x) { return prf_eval(k, x); }));
        return std::make_shared<PrfProgram>(std::move(k));
    };
    cls.puncture_override = [in_len, out_len](const ClassKey& key,
                                              const std::vector<BitVec>& points) -> ProgPtr {
        PuncturedPrfKey pk = prf_puncture(GgmKey::deserialize(key), points);
        if (in_len <= kPrfTableCutoff)
            return as_program(detail::prf_table_circuit(
                in_len, out_len, [&pk](const BitVec& x) { return prf_punct_eval(pk, x); }));
        return std::make_shared<PunctPrfProgram>(std::move(pk));
    };
    // Punctured co-path keys dominate the serialized size.
    cls.encoded_len = 256 + size_t(2 * in_len + 2) * (64 + 2 * ((in_len + 7) / 8));
    return cls;
}

}  // namespace ucl::prf
