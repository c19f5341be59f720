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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ucl/circuit.hpp"
#include "ucl/rng.hpp"

namespace ucl::circ {

/// TruthTable: the circuit is replaced by its canonical output table, so
/// functionally equal circuits obfuscate to bit-identical payloads
/// (perfect correctness and perfect indistinguishability on small
/// domains). Passthrough: the canonical program encoding, correctness
/// only, no indistinguishability semantics. Auto picks TruthTable
/// whenever the domain fits.
enum class IoMode { TruthTable, Passthrough, Auto };

constexpr size_t kTruthTableCap = 20;         // max input bits
constexpr size_t kTruthTableMaxBits = size_t(1) << 29;  // payload ceiling

class Obfuscated {
  public:
    enum class Mode : uint8_t { TruthTable = 0, Passthrough = 1 };

    Mode mode() const { return mode_; }
    size_t input_len() const { return input_len_; }
    size_t output_len() const { return output_len_; }
    const std::vector<uint8_t>& payload() const { return payload_; }

    std::optional<BitVec> eval(const BitVec& x) const {
        if (x.size() != input_len_) throw std::invalid_argument("Obfuscated::eval: input length mismatch");
        if (mode_ == Mode::Passthrough) return prog_->run(x);
        size_t stride = output_len_ + 1;
        size_t base = x.to_u64() * stride;
        BitVec enc(stride);
        for (size_t i = 0; i < stride; ++i) {
            size_t bit = base + i;
            enc.set(i, (payload_[bit / 8] >> (7 - bit % 8)) & 1);
        }
        return decode_output(enc);
    }

    /// The wrapped program (Passthrough mode only).
    const ProgPtr& program() const {
        if (mode_ != Mode::Passthrough) throw std::logic_error("Obfuscated: no program in TruthTable mode");
        return prog_;
    }

    std::vector<uint8_t> serialize() const {
        kv::Writer w;
        w.put_u64("mode", uint64_t(mode_));
        w.put_u64("n", input_len_);
        w.put_u64("m", output_len_);
        w.put_bytes("payload", payload_);
        return w.bytes();
    }

    static Obfuscated deserialize(const std::vector<uint8_t>& bytes) {
        kv::Reader r(bytes);
        Obfuscated o;
        uint64_t mode = r.get_u64("mode");
        if (mode > 1) throw std::invalid_argument("Obfuscated: bad mode");
        o.mode_ = Mode(mode);
        o.input_len_ = r.get_u64("n");
        o.output_len_ = r.get_u64("m");
        o.payload_ = r.get_bytes("payload");
        if (o.mode_ == Mode::Passthrough) {
            o.prog_ = deserialize_program(o.payload_);
            if (o.prog_->input_len() != o.input_len_ || o.prog_->output_len() != o.output_len_)
                throw std::invalid_argument("Obfuscated: program arity mismatch");
        } else {
            if (o.input_len_ > kTruthTableCap)
                throw std::invalid_argument("Obfuscated: table domain too large");
            size_t need = ((size_t(1) << o.input_len_) * (o.output_len_ + 1) + 7) / 8;
            if (o.payload_.size() != need) throw std::invalid_argument("Obfuscated: bad table size");
        }
        return o;
    }

    friend bool operator==(const Obfuscated& a, const Obfuscated& b) {
        return a.mode_ == b.mode_ && a.input_len_ == b.input_len_ && a.output_len_ == b.output_len_ &&
               a.payload_ == b.payload_;
    }

    static Obfuscated truth_table(const Program& p) {
        size_t n = p.input_len(), m = p.output_len();
        if (n > kTruthTableCap) throw std::invalid_argument("toy_io: TruthTable domain cap exceeded");
        size_t total_bits = (size_t(1) << n) * (m + 1);
        if (total_bits > kTruthTableMaxBits) throw std::invalid_argument("toy_io: TruthTable payload too large");
        BitVec table(total_bits);
        size_t pos = 0;
        for (uint64_t x = 0; x < (uint64_t(1) << n); ++x) {
            BitVec enc = encode_output(p.run(BitVec::from_u64(n, x)), m);
            for (size_t i = 0; i <= m; ++i, ++pos) table.set(pos, enc.get(i));
        }
        Obfuscated o;
        o.mode_ = Mode::TruthTable;
        o.input_len_ = n;
        o.output_len_ = m;
        o.payload_ = table.to_bytes();
        return o;
    }

    static Obfuscated passthrough(ProgPtr p) {
        Obfuscated o;
        o.mode_ = Mode::Passthrough;
        o.input_len_ = p->input_len();
        o.output_len_ = p->output_len();
        o.payload_ = serialize_program(*p);
        o.prog_ = std::move(p);
        return o;
    }

  private:
    Mode mode_ = Mode::TruthTable;
    size_t input_len_ = 0, output_len_ = 0;
    std::vector<uint8_t> payload_;
    ProgPtr prog_;
};

/// Toy indistinguishability obfuscator. The rng parameter mirrors the
/// randomized interface of a real obfuscator; both modes here are
/// deterministic.
inline Obfuscated toy_io(ProgPtr p, IoMode mode, Rng&) {
    if (mode == IoMode::Auto) {
        size_t n = p->input_len();
        bool fits = n <= kTruthTableCap && (size_t(1) << n) * (p->output_len() + 1) <= kTruthTableMaxBits;
        mode = fits ? IoMode::TruthTable : IoMode::Passthrough;
    }
    return mode == IoMode::TruthTable ? Obfuscated::truth_table(*p) : Obfuscated::passthrough(std::move(p));
}

inline Obfuscated toy_io(BoolCircuit c, IoMode mode, Rng& rng) {
    return toy_io(as_program(std::move(c)), mode, rng);
}

inline std::optional<BitVec> io_eval(const Obfuscated& o, const BitVec& x) { return o.eval(x); }

/// An obfuscation viewed as a circuit again, so obfuscator outputs can be
/// re-obfuscated or embedded in larger programs.
class ObfProgram final : public Program {
  public:
    explicit ObfProgram(Obfuscated o) : o_(std::move(o)) {}

    size_t input_len() const override { return o_.input_len(); }
    size_t output_len() const override { return o_.output_len(); }
    std::optional<BitVec> run(const BitVec& x) const override { return o_.eval(x); }
    std::string kind() const override { return "obf"; }
    void fields(kv::Writer& w) const override { w.put_bytes("inner", o_.serialize()); }
    const Obfuscated& inner() const { return o_; }

    static ProgPtr from_kv(const kv::Reader& r) {
        return std::make_shared<ObfProgram>(Obfuscated::deserialize(r.get_bytes("inner")));
    }

  private:
    Obfuscated o_;
};

inline const bool kObfProgramRegistered = register_program("obf", &ObfProgram::from_kv);

// ---------------------------------------------------------------------------
// Keyed circuit classes and puncturing
// ---------------------------------------------------------------------------

using ClassKey = std::vector<uint8_t>;

/// Family {C_k} with fixed input/output lengths and a fixed serialized
/// size; every circuit the class emits (punctured or not) pads to
/// encoded_len bytes.
struct KeyedCircuitClass {
    std::string name;
    uint32_t input_len = 0;
    uint32_t output_len = 0;
    size_t encoded_len = 0;
    std::function<ClassKey(Rng&)> sample_key;
    std::function<ProgPtr(const ClassKey&)> build;
    // Optional class-specific plain puncturing (e.g. PRF co-path keys).
    std::function<ProgPtr(const ClassKey&, const std::vector<BitVec>&)> puncture_override;
    // Optional class-specific generalized puncturing (composed classes
    // puncture first, then recompile).
    std::function<ProgPtr(const ClassKey&, const std::vector<BitVec>&, const std::vector<ProgPtr>&)>
        gen_puncture_override;
};

/// Wrapper realizing punctured behavior around any base program.
class PuncturedProgram final : public Program {
  public:
    PuncturedProgram(ProgPtr base, std::vector<BitVec> points, std::vector<ProgPtr> patches)
        : base_(std::move(base)), points_(std::move(points)), patches_(std::move(patches)) {
        if (patches_.size() != points_.size()) throw std::invalid_argument("PuncturedProgram: patch count");
        for (const auto& p : points_)
            if (p.size() != base_->input_len()) throw std::invalid_argument("PuncturedProgram: point length");
        for (const auto& mu : patches_)
            if (mu && (mu->input_len() != base_->input_len() || mu->output_len() != base_->output_len()))
                throw std::invalid_argument("PuncturedProgram: patch arity mismatch");
    }

    size_t input_len() const override { return base_->input_len(); }
    size_t output_len() const override { return base_->output_len(); }

    std::optional<BitVec> run(const BitVec& x) const override {
        for (size_t i = 0; i < points_.size(); ++i) {
            if (x == points_[i]) {
                if (!patches_[i]) return std::nullopt;
                return patches_[i]->run(x);
            }
        }
        return base_->run(x);
    }

    std::string kind() const override { return "punctured"; }

    void fields(kv::Writer& w) const override {
        w.put_bytes("base", serialize_program(*base_));
        w.put_u64("k", points_.size());
        for (size_t i = 0; i < points_.size(); ++i) {
            w.put_u64("plen" + std::to_string(i), points_[i].size());
            w.put("point" + std::to_string(i), points_[i].to_hex());
            if (patches_[i])
                w.put_bytes("patch" + std::to_string(i), serialize_program(*patches_[i]));
            else
                w.put("patch" + std::to_string(i), "");
        }
    }

    static ProgPtr from_kv(const kv::Reader& r) {
        ProgPtr base = deserialize_program(r.get_bytes("base"));
        size_t k = r.get_u64("k");
        std::vector<BitVec> points;
        std::vector<ProgPtr> patches;
        for (size_t i = 0; i < k; ++i) {
            size_t plen = r.get_u64("plen" + std::to_string(i));
            points.push_back(BitVec::from_hex(plen, r.get("point" + std::to_string(i))));
            std::string tag = "patch" + std::to_string(i);
            if (r.get(tag).empty())
                patches.push_back(nullptr);
            else
                patches.push_back(deserialize_program(r.get_bytes(tag)));
        }
        return std::make_shared<PuncturedProgram>(std::move(base), std::move(points), std::move(patches));
    }

  private:
    ProgPtr base_;
    std::vector<BitVec> points_;
    std::vector<ProgPtr> patches_;
};

inline const bool kPuncturedProgramRegistered = register_program("punctured", &PuncturedProgram::from_kv);

/// G_{k*} together with the puncturing record.
struct PuncturedCircuit {
    ProgPtr circuit;
    std::vector<BitVec> points;     // 1 (collapsed pair) or 2
    std::vector<ProgPtr> patches;   // aligned with points; empty entry = bot
};

inline std::vector<BitVec> collapse_points(const BitVec& x1, const BitVec& x2) {
    if (x1 == x2) return {x1};
    return {x1, x2};
}

/// Plain puncturing: G(x) = C_k(x) off {x1, x2}, undefined on them.
inline PuncturedCircuit puncture(const KeyedCircuitClass& cls, const ClassKey& key, const BitVec& x1,
                                 const BitVec& x2) {
    if (x1.size() != cls.input_len || x2.size() != cls.input_len)
        throw std::invalid_argument("puncture: point length mismatch");
    std::vector<BitVec> points = collapse_points(x1, x2);
    PuncturedCircuit out;
    out.points = points;
    out.patches.assign(points.size(), nullptr);
    if (cls.puncture_override) {
        out.circuit = cls.puncture_override(key, points);
    } else {
        out.circuit = std::make_shared<PuncturedProgram>(cls.build(key), points,
                                                         std::vector<ProgPtr>(points.size(), nullptr));
    }
    return out;
}

/// Generalized puncturing: adversary-chosen patch values at the punctured
/// points. When x1 == x2 only muB applies.
inline PuncturedCircuit gen_puncture(const KeyedCircuitClass& cls, const ClassKey& key, const BitVec& x1,
                                     const BitVec& x2, ProgPtr muB, ProgPtr muC) {
    if (x1.size() != cls.input_len || x2.size() != cls.input_len)
        throw std::invalid_argument("gen_puncture: point length mismatch");
    for (const ProgPtr& mu : {muB, muC})
        if (!mu || mu->input_len() != cls.input_len || mu->output_len() != cls.output_len)
            throw std::invalid_argument("gen_puncture: patch arity mismatch");
    PuncturedCircuit out;
    out.points = collapse_points(x1, x2);
    out.patches = out.points.size() == 1 ? std::vector<ProgPtr>{muB} : std::vector<ProgPtr>{muB, muC};
    if (cls.gen_puncture_override)
        out.circuit = cls.gen_puncture_override(key, out.points, out.patches);
    else
        out.circuit = std::make_shared<PuncturedProgram>(cls.build(key), out.points, out.patches);
    return out;
}

/// Class-size-padded serialization; the size invariant all class members
/// share.
inline std::vector<uint8_t> serialize_class_circuit(const KeyedCircuitClass& cls, const Program& p) {
    std::vector<uint8_t> body = serialize_program(p);
    if (cls.encoded_len == 0) return body;
    if (body.size() + 5 > cls.encoded_len)
        throw std::length_error("serialize_class_circuit: class encoded length exceeded");
    kv::Writer w;
    std::string pad(cls.encoded_len - body.size() - 5, '0');
    w.put("pad", pad);
    std::vector<uint8_t> out = body;
    std::vector<uint8_t> tail = w.bytes();
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

}  // namespace ucl::circ
