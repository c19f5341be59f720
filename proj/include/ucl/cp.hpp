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

#include <atomic>
#include <memory>
#include <mutex>

#include "ucl/cllz.hpp"
#include "ucl/prf.hpp"

namespace ucl::cp {

using circ::Obfuscated;
using circ::ProgPtr;

/// Copy-protection parameters. An input splits as x = x0 || x1 || x2 with
/// |x0| = l0, |x1| = n1 and |x2| = l0 + enc_q_bits; the last segment is
/// sized so a triggered input can carry x0 alongside an encoded circuit.
struct CpParams {
    uint32_t n = 4;              // coset ambient dimension
    uint32_t l0 = 2;             // coset blocks (= |x0|)
    uint32_t n1 = 32;            // secondary PRF F2 output length
    uint32_t enc_q_bits = 256;   // encoded trigger-circuit length
    uint32_t m = 8;              // primary PRF output length
    bool screen = true;          // trigger-freeness screening at key generation
    uint32_t screen_samples = 256;

    uint32_t n2() const { return l0 + enc_q_bits; }
    uint32_t input_len() const { return l0 + n1 + n2(); }
    uint32_t v_len() const { return n * l0; }

    cllz::CllzParams cllz() const { return cllz::CllzParams{n, l0, m}; }
};

/// Shared eval diagnostics: counts hidden-trigger activations so that
/// correctness failures can be traced back to accidental triggers.
struct TriggerDiag {
    std::atomic<uint64_t> fired{0};
    mutable std::mutex mu;
    std::vector<BitVec> log;  // triggered x values, capped

    void record(const BitVec& x) {
        fired.fetch_add(1, std::memory_order_relaxed);
        std::lock_guard<std::mutex> lk(mu);
        if (log.size() < 64) log.push_back(x);
    }
};

/// The program behind the copy-protection obfuscation. On (x, v):
/// if x2 xor F3(K3, x1) parses as x0 || Q with x1 = F2(K2, x0 || Q), run
/// the hidden circuit Q on v; otherwise check every block of v against
/// the basis selected by x0 and output F1(K1, x).
class ProgramP final : public circ::Program {
  public:
    ProgramP(prf::GgmKey k1, prf::GgmKey k2, prf::GgmKey k3, cllz::PublicKey pk, CpParams params)
        : k1_(std::move(k1)),
          k2_(std::move(k2)),
          k3_(std::move(k3)),
          pk_(std::move(pk)),
          params_(params),
          diag_(std::make_shared<TriggerDiag>()) {
        if (k1_.in_len != params_.input_len() || k1_.out_len != params_.m)
            throw std::invalid_argument("ProgramP: primary key arity");
        if (k2_.in_len != params_.n2() || k2_.out_len != params_.n1)
            throw std::invalid_argument("ProgramP: F2 arity");
        if (k3_.in_len != params_.n1 || k3_.out_len != params_.n2())
            throw std::invalid_argument("ProgramP: F3 arity");
    }

    size_t input_len() const override { return params_.input_len() + params_.v_len(); }
    size_t output_len() const override { return params_.m; }

    /// The trigger condition depends only on x, not on v.
    bool is_trigger(const BitVec& x) const {
        BitVec x1 = x.slice(params_.l0, params_.n1);
        BitVec x2 = x.slice(params_.l0 + params_.n1, params_.n2());
        BitVec t = prf::prf_eval(k3_, x1) ^ x2;
        if (!(t.slice(0, params_.l0) == x.slice(0, params_.l0))) return false;
        return prf::prf_eval(k2_, t) == x1;
    }

    std::optional<BitVec> run(const BitVec& xv) const override {
        const uint32_t nx = params_.input_len();
        BitVec x = xv.slice(0, nx);
        BitVec v = xv.slice(nx, params_.v_len());
        BitVec x0 = x.slice(0, params_.l0);
        BitVec x1 = x.slice(params_.l0, params_.n1);
        BitVec x2 = x.slice(params_.l0 + params_.n1, params_.n2());

        BitVec t = prf::prf_eval(k3_, x1) ^ x2;
        if (t.slice(0, params_.l0) == x0 && prf::prf_eval(k2_, t) == x1) {
            // Hidden trigger mode.
            diag_->record(x);
            circ::BoolCircuit q;
            try {
                q = circ::decode_bits(t.slice(params_.l0, params_.enc_q_bits));
            } catch (const std::exception&) {
                return std::nullopt;
            }
            if (q.input_len != params_.v_len() || q.output_len != params_.m) return std::nullopt;
            return q.eval(v);
        }

        // Normal mode.
        for (uint32_t i = 0; i < params_.l0; ++i) {
            BitVec vi = v.slice(size_t(i) * params_.n, params_.n);
            auto ok = pk_.checker(i, x0.get(i)).eval(vi);
            if (!ok || !ok->get(0)) return std::nullopt;
        }
        return prf::prf_eval(k1_, x);
    }

    std::string kind() const override { return "cp-p"; }

    void fields(kv::Writer& w) const override {
        w.put_bytes("k1", k1_.serialize());
        w.put_bytes("k2", k2_.serialize());
        w.put_bytes("k3", k3_.serialize());
        w.put_bytes("pk", pk_.serialize());
        w.put_u64("n", params_.n);
        w.put_u64("l0", params_.l0);
        w.put_u64("n1", params_.n1);
        w.put_u64("encq", params_.enc_q_bits);
        w.put_u64("m", params_.m);
    }

    static ProgPtr from_kv(const kv::Reader& r) {
        CpParams p;
        p.n = uint32_t(r.get_u64("n"));
        p.l0 = uint32_t(r.get_u64("l0"));
        p.n1 = uint32_t(r.get_u64("n1"));
        p.enc_q_bits = uint32_t(r.get_u64("encq"));
        p.m = uint32_t(r.get_u64("m"));
        return std::make_shared<ProgramP>(prf::GgmKey::deserialize(r.get_bytes("k1")),
                                          prf::GgmKey::deserialize(r.get_bytes("k2")),
                                          prf::GgmKey::deserialize(r.get_bytes("k3")),
                                          cllz::PublicKey::deserialize(r.get_bytes("pk")), p);
    }

    const std::shared_ptr<TriggerDiag>& diag() const { return diag_; }
    const prf::GgmKey& primary_key() const { return k1_; }

  private:
    prf::GgmKey k1_, k2_, k3_;
    cllz::PublicKey pk_;
    CpParams params_;
    std::shared_ptr<TriggerDiag> diag_;
};

inline const bool kProgramPRegistered = circ::register_program("cp-p", &ProgramP::from_kv);

/// Copy-protected PRF: coset states plus the obfuscated program.
struct CpPrfProgram {
    qsim::StateVector state;
    std::vector<std::vector<uint32_t>> blocks;
    Obfuscated p_tilde;
    CpParams params;
    std::vector<gf2::CosetPair> cosets;
    std::shared_ptr<TriggerDiag> diag;
};

/// The hidden circuit a trigger carries: per-block membership (in the
/// basis chosen by x0) and a constant output y. This is exactly the CLLZ
/// ciphertext circuit for message y under randomness x0.
inline circ::BoolCircuit trigger_circuit(const BitVec& x0, const BitVec& y,
                                         const std::vector<gf2::CosetPair>& cosets, const CpParams& p) {
    if (x0.size() != p.l0 || cosets.size() != p.l0) throw std::invalid_argument("trigger_circuit: l0 mismatch");
    circ::Builder b(p.v_len());
    std::vector<uint32_t> checks;
    for (uint32_t i = 0; i < p.l0; ++i) {
        std::vector<uint32_t> ins;
        for (uint32_t q = 0; q < p.n; ++q) ins.push_back(i * p.n + q);
        const gf2::CosetPair& cp = cosets[i];
        gf2::Subspace space = x0.get(i) ? gf2::dual(cp.space) : cp.space;
        const BitVec& shift = x0.get(i) ? cp.shift_dual : cp.shift_primary;
        std::vector<bool> tbl(size_t(1) << p.n);
        for (size_t v = 0; v < tbl.size(); ++v)
            tbl[v] = gf2::coset_contains(space, shift, BitVec::from_u64(p.n, v));
        checks.push_back(b.table(std::move(ins), std::move(tbl)));
    }
    uint32_t ok = b.and_all(checks);
    std::vector<uint32_t> outs;
    for (size_t i = 0; i < y.size(); ++i) outs.push_back(b.constant(y.get(i)));
    return b.finish_bot(std::move(outs), ok);
}

/// Builds a triggered input x = x0 || x1 || x2 such that P routes to the
/// hidden circuit and P(x, honest v) = y:
///   x1 = F2(K2, x0 || enc(Q)),  x2 = F3(K3, x1) xor (x0 || enc(Q)).
inline BitVec gen_trigger(const BitVec& x0, const BitVec& y, const prf::GgmKey& k2, const prf::GgmKey& k3,
                          const std::vector<gf2::CosetPair>& cosets, const CpParams& p) {
    if (y.size() != p.m) throw std::invalid_argument("gen_trigger: output length mismatch");
    circ::BoolCircuit q = trigger_circuit(x0, y, cosets, p);
    BitVec enc_q = circ::encode_bits(q, p.enc_q_bits);  // throws on overflow
    BitVec t = concat(x0, enc_q);                       // length n2
    BitVec x1 = prf::prf_eval(k2, t);
    BitVec x2 = prf::prf_eval(k3, x1) ^ t;
    return concat(x0, x1, x2);
}

/// Samples secondary keys and coset states and wraps P. With screening
/// enabled, rejects secondary keys for which any sampled honest input
/// accidentally satisfies the trigger condition; at tiny parameters the
/// nominally negligible collision rate is not actually negligible.
inline CpPrfProgram copyprotect(const prf::GgmKey& k1, const CpParams& params, Rng& rng) {
    if (k1.in_len != params.input_len() || k1.out_len != params.m)
        throw std::invalid_argument("copyprotect: primary key arity mismatch");
    auto [sk, pk] = cllz::gen(params.cllz(), rng);

    std::shared_ptr<ProgramP> p;
    for (int attempt = 0;; ++attempt) {
        prf::GgmKey k2 = prf::prf_gen(params.n2(), params.n1, rng);
        prf::GgmKey k3 = prf::prf_gen(params.n1, params.n2(), rng);
        p = std::make_shared<ProgramP>(k1, k2, k3, pk, params);
        if (!params.screen) break;
        bool clean = true;
        for (uint32_t s = 0; s < params.screen_samples && clean; ++s)
            clean = !p->is_trigger(rng.bitvec(params.input_len()));
        if (clean) break;
        if (attempt > 64) throw std::runtime_error("copyprotect: screening failed to find trigger-free keys");
    }

    cllz::QuantumDecryptor dec = cllz::qkeygen(sk);
    CpPrfProgram out;
    out.state = std::move(dec.state);
    out.blocks = dec.blocks();
    out.params = params;
    out.cosets = sk.pairs;
    out.diag = p->diag();
    out.p_tilde = circ::toy_io(std::static_pointer_cast<const circ::Program>(p), circ::IoMode::Passthrough,
                               rng);
    return out;
}

/// Quantum evaluation core shared with the game harness.
template <typename Ops>
std::optional<BitVec> cp_eval_core(Ops& ops, const std::vector<std::vector<uint32_t>>& blocks,
                                   const Obfuscated& p_tilde, const CpParams& params, const BitVec& x,
                                   Rng& rng) {
    if (x.size() != params.input_len()) throw std::invalid_argument("cp_eval: input length mismatch");
    BitVec x0 = x.slice(0, params.l0);
    for (size_t i = 0; i < blocks.size(); ++i)
        if (x0.get(i)) ops.hadamard(blocks[i]);
    std::vector<uint32_t> input_reg;
    for (const auto& blk : blocks) input_reg.insert(input_reg.end(), blk.begin(), blk.end());
    auto fm = ops.measure_fn([&](const BitVec& v) { return p_tilde.eval(concat(x, v)); }, params.m,
                             input_reg, rng);
    for (size_t i = 0; i < blocks.size(); ++i)
        if (x0.get(i)) ops.hadamard(blocks[i]);
    return fm.value;
}

/// Honest evaluation; the coset state is rotated per x0, P runs in
/// superposition, the output register is measured, and the rotation is
/// undone. Non-trigger inputs leave the state untouched.
inline std::optional<BitVec> cp_eval(CpPrfProgram& prog, const BitVec& x, Rng& rng) {
    cllz::detail::OwnedOps ops{prog.state};
    return cp_eval_core(ops, prog.blocks, prog.p_tilde, prog.params, x, rng);
}

}  // namespace ucl::cp
