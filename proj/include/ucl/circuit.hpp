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
#include <stdexcept>
#include <string>
#include <vector>

#include "ucl/bits.hpp"
#include "ucl/gf2.hpp"
#include "ucl/kv.hpp"

namespace ucl::circ {

enum class GateOp : uint8_t { And = 0, Xor = 1, Not = 2, Const = 3, Table = 4 };

constexpr size_t kTableArityCap = 15;
constexpr size_t kMaxGates = 1 << 16;

struct Gate {
    GateOp op = GateOp::Const;
    uint32_t a = 0, b = 0;          // And/Xor operands; Not uses a only
    bool constant = false;          // Const value
    std::vector<uint32_t> ins;      // Table inputs
    std::vector<bool> table;        // 2^|ins| entries; index bit i = value of ins[i]

    friend bool operator==(const Gate&, const Gate&) = default;
};

/// Acyclic boolean circuit over AND/XOR/NOT/CONST/TABLE gates in
/// topological order. Wire w is input w for w < input_len, otherwise the
/// output of gate w - input_len. A bot-capable circuit designates a flag
/// wire; flag 0 means the circuit outputs the undefined value.
struct BoolCircuit {
    uint32_t input_len = 0;
    uint32_t output_len = 0;
    std::vector<Gate> gates;
    std::vector<uint32_t> outputs;
    bool bot_capable = false;
    uint32_t flag_wire = 0;

    size_t num_wires() const { return input_len + gates.size(); }

    friend bool operator==(const BoolCircuit&, const BoolCircuit&) = default;

    void validate() const {
        if (outputs.size() != output_len) throw std::invalid_argument("BoolCircuit: output list mismatch");
        if (gates.size() > kMaxGates) throw std::invalid_argument("BoolCircuit: too many gates");
        for (size_t g = 0; g < gates.size(); ++g) {
            uint32_t limit = input_len + uint32_t(g);
            const Gate& gate = gates[g];
            auto check = [&](uint32_t w) {
                if (w >= limit) throw std::invalid_argument("BoolCircuit: wire reference ahead of definition");
            };
            switch (gate.op) {
                case GateOp::And:
                case GateOp::Xor:
                    check(gate.a);
                    check(gate.b);
                    break;
                case GateOp::Not:
                    check(gate.a);
                    break;
                case GateOp::Const:
                    break;
                case GateOp::Table:
                    if (gate.ins.empty() || gate.ins.size() > kTableArityCap)
                        throw std::invalid_argument("BoolCircuit: bad table arity");
                    if (gate.table.size() != size_t(1) << gate.ins.size())
                        throw std::invalid_argument("BoolCircuit: bad table size");
                    for (uint32_t w : gate.ins) check(w);
                    break;
            }
        }
        for (uint32_t w : outputs)
            if (w >= num_wires()) throw std::invalid_argument("BoolCircuit: output wire out of range");
        if (bot_capable && flag_wire >= num_wires())
            throw std::invalid_argument("BoolCircuit: flag wire out of range");
    }

    std::optional<BitVec> eval(const BitVec& x) const {
        if (x.size() != input_len) throw std::invalid_argument("BoolCircuit::eval: input length mismatch");
        std::vector<bool> wire(num_wires());
        for (size_t i = 0; i < input_len; ++i) wire[i] = x.get(i);
        for (size_t g = 0; g < gates.size(); ++g) {
            const Gate& gate = gates[g];
            bool v = false;
            switch (gate.op) {
                case GateOp::And: v = wire[gate.a] && wire[gate.b]; break;
                case GateOp::Xor: v = wire[gate.a] != wire[gate.b]; break;
                case GateOp::Not: v = !wire[gate.a]; break;
                case GateOp::Const: v = gate.constant; break;
                case GateOp::Table: {
                    size_t idx = 0;
                    for (size_t i = 0; i < gate.ins.size(); ++i)
                        if (wire[gate.ins[i]]) idx |= size_t(1) << i;
                    v = gate.table[idx];
                    break;
                }
            }
            wire[input_len + g] = v;
        }
        if (bot_capable && !wire[flag_wire]) return std::nullopt;
        BitVec y(output_len);
        for (size_t i = 0; i < output_len; ++i) y.set(i, wire[outputs[i]]);
        return y;
    }
};

// ---------------------------------------------------------------------------
// Bit-exact circuit encoding (version 1).
//
//   version:4  input_len:16  output_len:16  bot:1  gate_count:16
//   gates (op:3, operands with wire refs of width W)
//   outputs (output_len x W)  [flag wire: W if bot]
//   zero padding to the requested total length
//
// W = max(1, bit width of input_len + gate_count - 1). Table gates carry
// arity:4 followed by the input refs and the 2^arity table bits.
// ---------------------------------------------------------------------------

namespace detail {
inline size_t wire_ref_width(size_t total_wires) {
    size_t w = 1;
    while ((size_t(1) << w) < total_wires) ++w;
    return w;
}
}  // namespace detail

inline size_t encoded_bit_length(const BoolCircuit& c) {
    size_t w = detail::wire_ref_width(c.num_wires());
    size_t bits = 4 + 16 + 16 + 1 + 16;
    for (const Gate& g : c.gates) {
        bits += 3;
        switch (g.op) {
            case GateOp::And:
            case GateOp::Xor: bits += 2 * w; break;
            case GateOp::Not: bits += w; break;
            case GateOp::Const: bits += 1; break;
            case GateOp::Table: bits += 4 + g.ins.size() * w + g.table.size(); break;
        }
    }
    bits += c.outputs.size() * w;
    if (c.bot_capable) bits += w;
    return bits;
}

/// Encodes to exactly `pad_to_bits` bits (0 = natural length). Throws
/// std::length_error when the circuit does not fit.
inline BitVec encode_bits(const BoolCircuit& c, size_t pad_to_bits = 0) {
    c.validate();
    size_t w = detail::wire_ref_width(c.num_wires());
    BitWriter bw;
    bw.put_uint(1, 4);
    bw.put_uint(c.input_len, 16);
    bw.put_uint(c.output_len, 16);
    bw.put(c.bot_capable);
    bw.put_uint(c.gates.size(), 16);
    for (const Gate& g : c.gates) {
        bw.put_uint(uint64_t(g.op), 3);
        switch (g.op) {
            case GateOp::And:
            case GateOp::Xor:
                bw.put_uint(g.a, w);
                bw.put_uint(g.b, w);
                break;
            case GateOp::Not:
                bw.put_uint(g.a, w);
                break;
            case GateOp::Const:
                bw.put(g.constant);
                break;
            case GateOp::Table:
                bw.put_uint(g.ins.size(), 4);
                for (uint32_t in : g.ins) bw.put_uint(in, w);
                for (bool b : g.table) bw.put(b);
                break;
        }
    }
    for (uint32_t out : c.outputs) bw.put_uint(out, w);
    if (c.bot_capable) bw.put_uint(c.flag_wire, w);
    return bw.finish(pad_to_bits ? pad_to_bits : bw.size());
}

inline BoolCircuit decode_bits(const BitVec& bits) {
    BitReader br(bits);
    if (br.get_uint(4) != 1) throw std::invalid_argument("decode: bad version");
    BoolCircuit c;
    c.input_len = uint32_t(br.get_uint(16));
    c.output_len = uint32_t(br.get_uint(16));
    c.bot_capable = br.get();
    size_t gate_count = br.get_uint(16);
    size_t w = detail::wire_ref_width(c.input_len + gate_count);
    for (size_t g = 0; g < gate_count; ++g) {
        Gate gate;
        uint64_t op = br.get_uint(3);
        if (op > 4) throw std::invalid_argument("decode: bad opcode");
        gate.op = GateOp(op);
        switch (gate.op) {
            case GateOp::And:
            case GateOp::Xor:
                gate.a = uint32_t(br.get_uint(w));
                gate.b = uint32_t(br.get_uint(w));
                break;
            case GateOp::Not:
                gate.a = uint32_t(br.get_uint(w));
                break;
            case GateOp::Const:
                gate.constant = br.get();
                break;
            case GateOp::Table: {
                size_t arity = br.get_uint(4);
                if (arity == 0 || arity > kTableArityCap) throw std::invalid_argument("decode: bad arity");
                for (size_t i = 0; i < arity; ++i) gate.ins.push_back(uint32_t(br.get_uint(w)));
                for (size_t i = 0; i < (size_t(1) << arity); ++i) gate.table.push_back(br.get());
                break;
            }
        }
        c.gates.push_back(std::move(gate));
    }
    for (size_t i = 0; i < c.output_len; ++i) c.outputs.push_back(uint32_t(br.get_uint(w)));
    if (c.bot_capable) c.flag_wire = uint32_t(br.get_uint(w));
    c.validate();
    return c;
}

inline std::vector<uint8_t> encode(const BoolCircuit& c, size_t pad_to_bytes = 0) {
    return encode_bits(c, pad_to_bytes * 8).to_bytes();
}

inline BoolCircuit decode(const std::vector<uint8_t>& bytes) {
    return decode_bits(BitVec::from_bytes(bytes.size() * 8, bytes));
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Incremental construction helper; methods return the new wire index.
class Builder {
  public:
    explicit Builder(uint32_t input_len) { c_.input_len = input_len; }

    uint32_t input(uint32_t i) const {
        if (i >= c_.input_len) throw std::out_of_range("Builder::input");
        return i;
    }

    uint32_t and_(uint32_t a, uint32_t b) { return binary(GateOp::And, a, b); }
    uint32_t xor_(uint32_t a, uint32_t b) { return binary(GateOp::Xor, a, b); }
    uint32_t or_(uint32_t a, uint32_t b) { return xor_(xor_(a, b), and_(a, b)); }

    uint32_t not_(uint32_t a) {
        Gate g;
        g.op = GateOp::Not;
        g.a = a;
        return push(std::move(g));
    }

    uint32_t constant(bool v) {
        Gate g;
        g.op = GateOp::Const;
        g.constant = v;
        return push(std::move(g));
    }

    uint32_t table(std::vector<uint32_t> ins, std::vector<bool> tbl) {
        Gate g;
        g.op = GateOp::Table;
        g.ins = std::move(ins);
        g.table = std::move(tbl);
        return push(std::move(g));
    }

    /// AND of a wire list (constant 1 when empty).
    uint32_t and_all(const std::vector<uint32_t>& ws) {
        if (ws.empty()) return constant(true);
        uint32_t acc = ws[0];
        for (size_t i = 1; i < ws.size(); ++i) acc = and_(acc, ws[i]);
        return acc;
    }

    uint32_t xor_all(const std::vector<uint32_t>& ws) {
        if (ws.empty()) return constant(false);
        uint32_t acc = ws[0];
        for (size_t i = 1; i < ws.size(); ++i) acc = xor_(acc, ws[i]);
        return acc;
    }

    /// Equality of the input slice [pos, pos+t.size()) with constant t.
    uint32_t equals_const(uint32_t pos, const BitVec& t) {
        std::vector<uint32_t> per_bit;
        for (size_t i = 0; i < t.size(); ++i) {
            uint32_t w = input(pos + uint32_t(i));
            per_bit.push_back(t.get(i) ? w : not_(w));
        }
        return and_all(per_bit);
    }

    BoolCircuit finish(std::vector<uint32_t> outputs) {
        c_.outputs = std::move(outputs);
        c_.output_len = uint32_t(c_.outputs.size());
        c_.validate();
        return c_;
    }

    BoolCircuit finish_bot(std::vector<uint32_t> outputs, uint32_t flag) {
        c_.bot_capable = true;
        c_.flag_wire = flag;
        return finish(std::move(outputs));
    }

  private:
    uint32_t binary(GateOp op, uint32_t a, uint32_t b) {
        Gate g;
        g.op = op;
        g.a = a;
        g.b = b;
        return push(std::move(g));
    }

    uint32_t push(Gate g) {
        c_.gates.push_back(std::move(g));
        return uint32_t(c_.input_len + c_.gates.size() - 1);
    }

    BoolCircuit c_;
};

inline BoolCircuit identity_circuit(uint32_t n) {
    Builder b(n);
    std::vector<uint32_t> outs;
    for (uint32_t i = 0; i < n; ++i) outs.push_back(i);
    return b.finish(std::move(outs));
}

inline BoolCircuit const_circuit(uint32_t n, const BitVec& value) {
    Builder b(n);
    std::vector<uint32_t> outs;
    for (size_t i = 0; i < value.size(); ++i) outs.push_back(b.constant(value.get(i)));
    return b.finish(std::move(outs));
}

inline BoolCircuit xor_all_circuit(uint32_t n) {
    Builder b(n);
    std::vector<uint32_t> ws;
    for (uint32_t i = 0; i < n; ++i) ws.push_back(i);
    return b.finish({b.xor_all(ws)});
}

/// Outputs `value` at `point`, undefined elsewhere.
inline BoolCircuit point_circuit(uint32_t n, const BitVec& point, const BitVec& value) {
    if (point.size() != n) throw std::invalid_argument("point_circuit: point length mismatch");
    Builder b(n);
    uint32_t eq = b.equals_const(0, point);
    std::vector<uint32_t> outs;
    for (size_t i = 0; i < value.size(); ++i) outs.push_back(b.constant(value.get(i)));
    return b.finish_bot(std::move(outs), eq);
}

/// 1-bit total circuit accepting exactly the coset space + shift.
/// Built from the dual-basis parity checks; with use_table and small n a
/// single TABLE gate is emitted instead.
inline BoolCircuit coset_membership_circuit(const gf2::Subspace& space, const BitVec& shift,
                                            bool use_table = false) {
    uint32_t n = uint32_t(space.ambient_dim());
    Builder b(n);
    if (use_table) {
        if (n == 0 || n > kTableArityCap) throw std::invalid_argument("coset_membership_circuit: table arity");
        std::vector<uint32_t> ins;
        for (uint32_t i = 0; i < n; ++i) ins.push_back(i);
        std::vector<bool> tbl(size_t(1) << n);
        for (size_t v = 0; v < tbl.size(); ++v)
            tbl[v] = gf2::coset_contains(space, shift, BitVec::from_u64(n, v));
        return b.finish({b.table(std::move(ins), std::move(tbl))});
    }
    gf2::Subspace perp = gf2::dual(space);
    std::vector<uint32_t> checks;
    for (const BitVec& row : perp.basis()) {
        std::vector<uint32_t> terms;
        for (uint32_t i = 0; i < n; ++i)
            if (row.get(i)) terms.push_back(i);
        uint32_t parity = b.xor_all(terms);
        // <row, v> must equal <row, shift>.
        checks.push_back(row.dot(shift) ? parity : b.not_(parity));
    }
    return b.finish({b.and_all(checks)});
}

/// Appends unreferenced CONST filler gates; functionality is unchanged.
inline BoolCircuit pad_with_const(BoolCircuit c, size_t extra_gates) {
    for (size_t i = 0; i < extra_gates; ++i) {
        Gate g;
        g.op = GateOp::Const;
        g.constant = false;
        c.gates.push_back(g);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Programs: the evaluable-object interface shared by gate circuits and the
// native keyed programs (PRF evaluators, the copy-protection program, the
// obfuscator's wrapper circuits). Everything behind it serializes to
// canonical bytes so it can ride inside obfuscations and key files.
// ---------------------------------------------------------------------------

class Program {
  public:
    virtual ~Program() = default;
    virtual size_t input_len() const = 0;
    virtual size_t output_len() const = 0;
    virtual std::optional<BitVec> run(const BitVec& x) const = 0;
    virtual std::string kind() const = 0;
    virtual void fields(kv::Writer& w) const = 0;
};

using ProgPtr = std::shared_ptr<const Program>;

inline std::vector<uint8_t> serialize_program(const Program& p) {
    kv::Writer w;
    w.put("kind", p.kind());
    p.fields(w);
    return w.bytes();
}

using ProgramFactory = std::function<ProgPtr(const kv::Reader&)>;

inline std::map<std::string, ProgramFactory>& program_registry() {
    static std::map<std::string, ProgramFactory> reg;
    return reg;
}

inline bool register_program(const std::string& kind, ProgramFactory f) {
    program_registry().emplace(kind, std::move(f));
    return true;
}

inline ProgPtr deserialize_program(const std::vector<uint8_t>& bytes) {
    kv::Reader r(bytes);
    auto it = program_registry().find(r.get("kind"));
    if (it == program_registry().end())
        throw std::invalid_argument("deserialize_program: unknown kind " + r.get("kind"));
    return it->second(r);
}

/// Gate circuit as a Program.
class CircuitProgram final : public Program {
  public:
    explicit CircuitProgram(BoolCircuit c) : c_(std::move(c)) { c_.validate(); }

    size_t input_len() const override { return c_.input_len; }
    size_t output_len() const override { return c_.output_len; }
    std::optional<BitVec> run(const BitVec& x) const override { return c_.eval(x); }
    std::string kind() const override { return "circuit"; }

    void fields(kv::Writer& w) const override { w.put_bytes("body", encode(c_)); }

    const BoolCircuit& circuit() const { return c_; }

    static ProgPtr from_kv(const kv::Reader& r) {
        return std::make_shared<CircuitProgram>(decode(r.get_bytes("body")));
    }

  private:
    BoolCircuit c_;
};

inline ProgPtr as_program(BoolCircuit c) { return std::make_shared<CircuitProgram>(std::move(c)); }

inline const bool kCircuitProgramRegistered = register_program("circuit", &CircuitProgram::from_kv);

/// Constant-output total program of arbitrary arity (used for mu patches).
class ConstProgram final : public Program {
  public:
    ConstProgram(size_t n, BitVec value) : n_(n), value_(std::move(value)) {}

    size_t input_len() const override { return n_; }
    size_t output_len() const override { return value_.size(); }
    std::optional<BitVec> run(const BitVec&) const override { return value_; }
    std::string kind() const override { return "const"; }

    void fields(kv::Writer& w) const override {
        w.put_u64("n", n_);
        w.put_u64("m", value_.size());
        w.put("value", value_.to_hex());
    }

    static ProgPtr from_kv(const kv::Reader& r) {
        return std::make_shared<ConstProgram>(r.get_u64("n"),
                                              BitVec::from_hex(r.get_u64("m"), r.get("value")));
    }

  private:
    size_t n_;
    BitVec value_;
};

inline const bool kConstProgramRegistered = register_program("const", &ConstProgram::from_kv);

/// Always-undefined program.
class BotProgram final : public Program {
  public:
    BotProgram(size_t n, size_t m) : n_(n), m_(m) {}

    size_t input_len() const override { return n_; }
    size_t output_len() const override { return m_; }
    std::optional<BitVec> run(const BitVec&) const override { return std::nullopt; }
    std::string kind() const override { return "bot"; }

    void fields(kv::Writer& w) const override {
        w.put_u64("n", n_);
        w.put_u64("m", m_);
    }

    static ProgPtr from_kv(const kv::Reader& r) {
        return std::make_shared<BotProgram>(r.get_u64("n"), r.get_u64("m"));
    }

  private:
    size_t n_, m_;
};

inline const bool kBotProgramRegistered = register_program("bot", &BotProgram::from_kv);

}  // namespace ucl::circ
