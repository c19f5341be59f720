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

#include "ucl/cp.hpp"

namespace ucl::upo {

using circ::Obfuscated;
using circ::ProgPtr;

struct UpoParams {
    cp::CpParams cp;

    uint32_t input_len() const { return cp.input_len(); }  // circuit input length n_W
    uint32_t v_len() const { return cp.v_len(); }
};

/// C = PRG . iO(P): the copy-protection program with its output stretched
/// by the injective PRG.
class CircuitC final : public circ::Program {
  public:
    CircuitC(Obfuscated p_tilde, prf::PrgSpec prg_spec, cp::CpParams params)
        : p_tilde_(std::move(p_tilde)), prg_(prg_spec), params_(params) {
        if (prg_.in_len != params_.m) throw std::invalid_argument("CircuitC: PRG arity mismatch");
    }

    size_t input_len() const override { return params_.input_len() + params_.v_len(); }
    size_t output_len() const override { return 2 * size_t(params_.m); }

    std::optional<BitVec> run(const BitVec& xv) const override {
        auto y = p_tilde_.eval(xv);
        if (!y) return std::nullopt;
        return prf::prg(prg_, *y);
    }

    std::string kind() const override { return "upo-c"; }

    void fields(kv::Writer& w) const override {
        w.put_bytes("p", p_tilde_.serialize());
        w.put_u64("prg_in", prg_.in_len);
        w.put_u64("prg_lo", prg_.seed.lo);
        w.put_u64("prg_hi", prg_.seed.hi);
        w.put_u64("n", params_.n);
        w.put_u64("l0", params_.l0);
        w.put_u64("n1", params_.n1);
        w.put_u64("encq", params_.enc_q_bits);
        w.put_u64("m", params_.m);
    }

    static cp::CpParams params_from_kv(const kv::Reader& r) {
        cp::CpParams p;
        p.n = uint32_t(r.get_u64("n"));
        p.l0 = uint32_t(r.get_u64("l0"));
        p.n1 = uint32_t(r.get_u64("n1"));
        p.enc_q_bits = uint32_t(r.get_u64("encq"));
        p.m = uint32_t(r.get_u64("m"));
        return p;
    }

    static ProgPtr from_kv(const kv::Reader& r) {
        prf::PrgSpec spec{uint32_t(r.get_u64("prg_in")), Block128{r.get_u64("prg_lo"), r.get_u64("prg_hi")}};
        return std::make_shared<CircuitC>(Obfuscated::deserialize(r.get_bytes("p")), spec,
                                          params_from_kv(r));
    }

    /// Trigger diagnostics of the inner copy-protection program.
    std::shared_ptr<cp::TriggerDiag> p_diag() const {
        if (p_tilde_.mode() == Obfuscated::Mode::Passthrough)
            if (auto p = std::dynamic_pointer_cast<const cp::ProgramP>(p_tilde_.program()))
                return p->diag();
        return nullptr;
    }

  private:
    Obfuscated p_tilde_;
    prf::PrgSpec prg_;
    cp::CpParams params_;
};

/// D(x, v, y): reruns C on (x, v); outputs W(x) when the result matches y,
/// undefined otherwise.
class CircuitD final : public circ::Program {
  public:
    CircuitD(Obfuscated c_tilde, ProgPtr w, cp::CpParams params)
        : c_tilde_(std::move(c_tilde)), w_(std::move(w)), params_(params) {
        if (w_->input_len() != params_.input_len())
            throw std::invalid_argument("CircuitD: W input length mismatch");
    }

    size_t input_len() const override {
        return params_.input_len() + params_.v_len() + 2 * size_t(params_.m);
    }
    size_t output_len() const override { return w_->output_len(); }

    std::optional<BitVec> run(const BitVec& xvy) const override {
        size_t nx = params_.input_len(), nv = params_.v_len();
        BitVec xv = xvy.slice(0, nx + nv);
        BitVec y = xvy.slice(nx + nv, 2 * size_t(params_.m));
        auto y_prime = c_tilde_.eval(xv);
        if (!y_prime || !(*y_prime == y)) return std::nullopt;
        return w_->run(xvy.slice(0, nx));
    }

    std::string kind() const override { return "upo-d"; }

    void fields(kv::Writer& w) const override {
        w.put_bytes("c", c_tilde_.serialize());
        w.put_bytes("w", serialize_program(*w_));
        w.put_u64("n", params_.n);
        w.put_u64("l0", params_.l0);
        w.put_u64("n1", params_.n1);
        w.put_u64("encq", params_.enc_q_bits);
        w.put_u64("m", params_.m);
    }

    static ProgPtr from_kv(const kv::Reader& r) {
        return std::make_shared<CircuitD>(Obfuscated::deserialize(r.get_bytes("c")),
                                          circ::deserialize_program(r.get_bytes("w")),
                                          CircuitC::params_from_kv(r));
    }

  private:
    Obfuscated c_tilde_;
    ProgPtr w_;
    cp::CpParams params_;
};

inline const bool kUpoCircuitsRegistered = circ::register_program("upo-c", &CircuitC::from_kv) &&
                                           circ::register_program("upo-d", &CircuitD::from_kv);

/// The obfuscated state: coset registers plus the two wrapped circuits.
/// fresh == true means the quantum part is exactly the freshly prepared
/// coset states (all measurements so far were deterministic), so
/// serialization can store just the defining coset pairs.
struct UpoObfuscation {
    qsim::StateVector state;
    std::vector<std::vector<uint32_t>> blocks;
    Obfuscated c_tilde;
    Obfuscated d_tilde;
    UpoParams params;
    std::vector<gf2::CosetPair> cosets;
    bool fresh = true;
    std::shared_ptr<cp::TriggerDiag> diag;

    std::vector<uint8_t> serialize() const;
    static UpoObfuscation deserialize(const std::vector<uint8_t>& bytes);
};

inline UpoObfuscation upo_obf(ProgPtr w, const UpoParams& params, Rng& rng) {
    if (w->input_len() != params.input_len())
        throw std::invalid_argument("upo_obf: circuit input length must equal l0+n1+n2");
    prf::GgmKey k = prf::prf_gen(params.input_len(), params.cp.m, rng);
    cp::CpPrfProgram cpp = cp::copyprotect(k, params.cp, rng);
    prf::PrgSpec prg_spec = prf::prg_gen(params.cp.m, rng);

    UpoObfuscation out;
    out.params = params;
    out.state = std::move(cpp.state);
    out.blocks = std::move(cpp.blocks);
    out.cosets = std::move(cpp.cosets);
    out.diag = cpp.diag;
    out.c_tilde = circ::toy_io(std::make_shared<CircuitC>(cpp.p_tilde, prg_spec, params.cp),
                               circ::IoMode::Passthrough, rng);
    out.d_tilde = circ::toy_io(std::make_shared<CircuitD>(out.c_tilde, std::move(w), params.cp),
                               circ::IoMode::Passthrough, rng);
    return out;
}

/// Evaluation core over any quantum-ops backend (owned state or a game
/// view). Follows the construction order: rotate the coset blocks by x0,
/// run C in superposition and measure y, run D on (x, V, y) and measure z,
/// then undo the rotation. Reports whether every measurement was
/// deterministic (prob ~ 1) via `deterministic`.
template <typename Ops>
std::optional<BitVec> upo_eval_core(Ops& ops, const std::vector<std::vector<uint32_t>>& blocks,
                                    const Obfuscated& c_tilde, const Obfuscated& d_tilde,
                                    const UpoParams& params, const BitVec& x, Rng& rng,
                                    bool* deterministic = nullptr) {
    if (x.size() != params.input_len()) throw std::invalid_argument("upo_eval: input length mismatch");
    BitVec x0 = x.slice(0, params.cp.l0);
    if (deterministic) *deterministic = true;
    for (size_t i = 0; i < blocks.size(); ++i)
        if (x0.get(i)) ops.hadamard(blocks[i]);

    std::vector<uint32_t> v_reg;
    for (const auto& blk : blocks) v_reg.insert(v_reg.end(), blk.begin(), blk.end());

    auto ym = ops.measure_fn([&](const BitVec& v) { return c_tilde.eval(concat(x, v)); },
                             2 * size_t(params.cp.m), v_reg, rng);
    if (deterministic && ym.probability < 1.0 - 1e-9) *deterministic = false;

    std::optional<BitVec> z;
    if (ym.value) {
        BitVec y = *ym.value;
        auto zm = ops.measure_fn([&](const BitVec& v) { return d_tilde.eval(concat(x, v, y)); },
                                 d_tilde.output_len(), v_reg, rng);
        if (deterministic && zm.probability < 1.0 - 1e-9) *deterministic = false;
        z = zm.value;
    }

    for (size_t i = 0; i < blocks.size(); ++i)
        if (x0.get(i)) ops.hadamard(blocks[i]);
    return z;
}

/// Value-semantics evaluation: returns W(x) (or the undefined marker) and
/// the successor obfuscation.
inline std::pair<std::optional<BitVec>, UpoObfuscation> upo_eval(UpoObfuscation rho, const BitVec& x,
                                                                 Rng& rng) {
    cllz::detail::OwnedOps ops{rho.state};
    bool deterministic = true;
    auto z = upo_eval_core(ops, rho.blocks, rho.c_tilde, rho.d_tilde, rho.params, x, rng, &deterministic);
    if (!deterministic) rho.fresh = false;
    return {z, std::move(rho)};
}

enum class PunctureMode { Plain, Generalized };

/// Obfuscation of the punctured circuit G_{k*} for a keyed class.
inline UpoObfuscation upo_obf_punctured(const circ::KeyedCircuitClass& cls, const circ::ClassKey& key,
                                        const BitVec& x1, const BitVec& x2, PunctureMode mode,
                                        ProgPtr muB, ProgPtr muC, const UpoParams& params, Rng& rng) {
    circ::PuncturedCircuit g = mode == PunctureMode::Plain
                                   ? circ::puncture(cls, key, x1, x2)
                                   : circ::gen_puncture(cls, key, x1, x2, std::move(muB), std::move(muC));
    return upo_obf(g.circuit, params, rng);
}

// ---------------------------------------------------------------------------
// Composition: UPO' = UPO after a functionality-preserving compiler.
// ---------------------------------------------------------------------------

/// A circuit compiler with an explicit randomness length; apply must be
/// functionality-preserving for every randomness string.
struct Compiler {
    std::string name;
    uint32_t rand_len = 0;
    std::function<ProgPtr(ProgPtr, const BitVec& r)> apply;
};

inline Compiler identity_compiler() {
    return Compiler{"identity", 0, [](ProgPtr w, const BitVec&) { return w; }};
}

/// Compile = toy iO (Auto mode: canonical truth table on small domains,
/// normalized encoding beyond the table cap).
inline Compiler toy_io_compiler(circ::IoMode mode = circ::IoMode::Auto) {
    return Compiler{"toy-io", 64, [mode](ProgPtr w, const BitVec& r) -> ProgPtr {
                        Rng rng(r.size() ? r.to_u64() : 0);
                        return std::make_shared<circ::ObfProgram>(circ::toy_io(std::move(w), mode, rng));
                    }};
}

/// Obf'(W) = Obf(Compile(W; r)) with fresh compiler randomness.
inline UpoObfuscation compose_obf(ProgPtr w, const Compiler& comp, const UpoParams& params, Rng& rng) {
    BitVec r = rng.bitvec(comp.rand_len);
    return upo_obf(comp.apply(std::move(w), r), params, rng);
}

/// The derived class G_{k||r}: circuits compile the base class member with
/// the key's randomness; puncturing punctures the base key first and then
/// compiles with the same randomness.
inline circ::KeyedCircuitClass compose_class(const circ::KeyedCircuitClass& base, const Compiler& comp) {
    circ::KeyedCircuitClass out;
    out.name = base.name + "+" + comp.name;
    out.input_len = base.input_len;
    out.output_len = base.output_len;
    out.encoded_len = 0;  // composed images vary; padding handled by callers when needed

    auto unpack = [base, comp](const circ::ClassKey& key) {
        kv::Reader r(key);
        circ::ClassKey inner = r.get_bytes("k");
        BitVec rand = BitVec::from_hex(comp.rand_len, r.get("r"));
        return std::make_pair(inner, rand);
    };

    out.sample_key = [base, comp](Rng& rng) {
        kv::Writer w;
        w.put_bytes("k", base.sample_key(rng));
        w.put("r", rng.bitvec(comp.rand_len).to_hex());
        return w.bytes();
    };
    out.build = [base, comp, unpack](const circ::ClassKey& key) {
        auto [inner, rand] = unpack(key);
        return comp.apply(base.build(inner), rand);
    };
    out.puncture_override = [base, comp, unpack](const circ::ClassKey& key,
                                                 const std::vector<BitVec>& points) {
        auto [inner, rand] = unpack(key);
        circ::PuncturedCircuit g =
            points.size() == 1 ? circ::puncture(base, inner, points[0], points[0])
                               : circ::puncture(base, inner, points[0], points[1]);
        return comp.apply(g.circuit, rand);
    };
    out.gen_puncture_override = [base, comp, unpack](const circ::ClassKey& key,
                                                     const std::vector<BitVec>& points,
                                                     const std::vector<circ::ProgPtr>& patches) {
        auto [inner, rand] = unpack(key);
        circ::PuncturedCircuit g =
            points.size() == 1
                ? circ::gen_puncture(base, inner, points[0], points[0], patches[0], patches[0])
                : circ::gen_puncture(base, inner, points[0], points[1], patches[0], patches[1]);
        return comp.apply(g.circuit, rand);
    };
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::vector<uint8_t> UpoObfuscation::serialize() const {
    kv::Writer w;
    w.put_u64("n", params.cp.n);
    w.put_u64("l0", params.cp.l0);
    w.put_u64("n1", params.cp.n1);
    w.put_u64("encq", params.cp.enc_q_bits);
    w.put_u64("m", params.cp.m);
    w.put_u64("fresh", fresh ? 1 : 0);
    for (size_t i = 0; i < cosets.size(); ++i) w.put("coset" + std::to_string(i), cosets[i].to_hex());
    w.put_bytes("c", c_tilde.serialize());
    w.put_bytes("d", d_tilde.serialize());
    if (!fresh) {
        // Partially collapsed state persists as dense amplitudes.
        kv::Writer amps;
        for (size_t i = 0; i < state.dim(); ++i) {
            const auto& a = state.amp(i);
            if (std::norm(a) < 1e-30) continue;
            char buf[64];
            snprintf(buf, sizeof buf, "%a;%a", a.real(), a.imag());
            std::string entry(buf);
            for (char& ch : entry)
                if (ch == '=') ch = '~';  // hexfloat never emits '=', defensive only
            amps.put("a" + std::to_string(i), entry);
        }
        w.put_bytes("amps", amps.bytes());
    }
    return w.bytes();
}

inline UpoObfuscation UpoObfuscation::deserialize(const std::vector<uint8_t>& bytes) {
    kv::Reader r(bytes);
    UpoObfuscation out;
    out.params.cp.n = uint32_t(r.get_u64("n"));
    out.params.cp.l0 = uint32_t(r.get_u64("l0"));
    out.params.cp.n1 = uint32_t(r.get_u64("n1"));
    out.params.cp.enc_q_bits = uint32_t(r.get_u64("encq"));
    out.params.cp.m = uint32_t(r.get_u64("m"));
    out.fresh = r.get_u64("fresh") != 0;
    for (uint32_t i = 0; i < out.params.cp.l0; ++i)
        out.cosets.push_back(gf2::CosetPair::from_hex(r.get("coset" + std::to_string(i))));
    out.c_tilde = Obfuscated::deserialize(r.get_bytes("c"));
    out.d_tilde = Obfuscated::deserialize(r.get_bytes("d"));

    cllz::SecretKey sk{out.cosets};
    cllz::QuantumDecryptor dec = cllz::qkeygen(sk);
    out.blocks = dec.blocks();
    if (out.fresh) {
        out.state = std::move(dec.state);
    } else {
        qsim::StateVector st(dec.state.num_qubits());
        st.amp(0) = 0.0;
        kv::Reader ar(r.get_bytes("amps"));
        for (size_t i = 0; i < st.dim(); ++i) {
            std::string key = "a" + std::to_string(i);
            if (!ar.has(key)) continue;
            std::string entry = ar.get(key);
            size_t semi = entry.find(';');
            st.amp(i) = {std::strtod(entry.substr(0, semi).c_str(), nullptr),
                         std::strtod(entry.substr(semi + 1).c_str(), nullptr)};
        }
        out.state = std::move(st);
    }
    // Diagnostics rebind to the deserialized inner program when available.
    out.diag = std::make_shared<cp::TriggerDiag>();
    if (out.c_tilde.mode() == Obfuscated::Mode::Passthrough)
        if (auto c_prog = std::dynamic_pointer_cast<const CircuitC>(out.c_tilde.program()))
            if (auto d = c_prog->p_diag()) out.diag = d;
    return out;
}

}  // namespace ucl::upo
