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

#include "ucl/apps.hpp"

namespace ucl::selftest {

struct SuiteResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

using MaskFn = std::function<BitVec(const BitVec&, const BitVec&)>;

/// Post-processing roundtrip, exhaustive at q = 6. The mask function is a
/// parameter so fault-injection tests can verify the check has teeth.
inline bool check_postproc(const MaskFn& mask) {
    for (uint64_t mi = 0; mi < 64; ++mi)
        for (uint64_t ri = 0; ri < 64; ++ri)
            for (uint64_t ui = 0; ui < 64; ++ui) {
                BitVec m = BitVec::from_u64(6, mi), r = BitVec::from_u64(6, ri), u = BitVec::from_u64(6, ui);
                BitVec z = m ^ mask(u, r);
                if (!((z ^ cllz::postproc_mask(u, r)) == m)) return false;
            }
    return true;
}

namespace detail {

inline SuiteResult gf2_rref(uint64_t seed) {
    Rng rng(seed);
    for (int t = 0; t < 30; ++t) {
        size_t n = 1 + rng.range(8);
        std::vector<BitVec> rows;
        for (size_t i = 0, k = rng.range(n + 2); i < k; ++i) rows.push_back(rng.bitvec(n));
        gf2::Subspace s = gf2::rref(n, rows);
        if (!(gf2::rref(n, s.basis()) == s)) return {"gf2-rref", false, "not idempotent"};
        for (const BitVec& r : rows)
            if (!s.contains(r)) return {"gf2-rref", false, "row escaped the span"};
    }
    return {"gf2-rref", true, ""};
}

inline SuiteResult gf2_dual(uint64_t seed) {
    Rng rng(seed + 1);
    for (int t = 0; t < 30; ++t) {
        size_t n = 1 + rng.range(8);
        gf2::Subspace s = gf2::sample_subspace(n, rng.range(n + 1), rng);
        if (!(gf2::dual(gf2::dual(s)) == s)) return {"gf2-dual", false, "not an involution"};
        if (s.dim() + gf2::dual(s).dim() != n) return {"gf2-dual", false, "dimension sum broken"};
    }
    return {"gf2-dual", true, ""};
}

inline SuiteResult coset_membership(uint64_t seed) {
    Rng rng(seed + 2);
    for (int t = 0; t < 15; ++t) {
        size_t n = 1 + rng.range(7);
        gf2::Subspace s = gf2::sample_subspace(n, rng.range(n + 1), rng);
        BitVec shift = rng.bitvec(n);
        auto coset = gf2::enumerate_coset(s, shift);
        std::set<BitVec> cs(coset.begin(), coset.end());
        for (uint64_t v = 0; v < (uint64_t(1) << n); ++v) {
            BitVec in = BitVec::from_u64(n, v);
            if (gf2::coset_contains(s, shift, in) != (cs.count(in) != 0))
                return {"coset-membership", false, "contains/enumerate disagree"};
        }
    }
    return {"coset-membership", true, ""};
}

inline SuiteResult coset_duality(uint64_t seed) {
    Rng rng(seed + 3);
    for (int t = 0; t < 60; ++t) {
        size_t n = (t % 2) ? 6 : 4;
        gf2::CosetPair cp = gf2::sample_coset_pair(n, rng.range(n + 1), rng);
        qsim::StateVector st = qsim::prepare_coset_state(cp);
        std::vector<uint32_t> all;
        for (uint32_t q = 0; q < n; ++q) all.push_back(q);
        st.hadamard(all);
        qsim::StateVector expect = qsim::prepare_coset_state(
            gf2::make_coset_pair(gf2::dual(cp.space), cp.shift_dual, cp.shift_primary));
        if (qsim::fidelity(st, expect) < 1.0 - 1e-9) return {"coset-duality", false, "fidelity below 1"};
    }
    return {"coset-duality", true, ""};
}

inline SuiteResult io_canonical(uint64_t seed) {
    Rng rng(seed + 4);
    // Two distinct XOR implementations must produce identical tables.
    circ::Builder b1(3);
    circ::BoolCircuit direct = b1.finish({b1.xor_(b1.xor_(0, 1), 2)});
    circ::Builder b2(3);
    uint32_t p01 = b2.xor_(0, 1);
    uint32_t dn = b2.not_(b2.not_(p01));
    circ::BoolCircuit padded = b2.finish({b2.xor_(dn, 2)});
    circ::Obfuscated t1 = circ::toy_io(direct, circ::IoMode::TruthTable, rng);
    circ::Obfuscated t2 = circ::toy_io(padded, circ::IoMode::TruthTable, rng);
    if (!(t1.payload() == t2.payload())) return {"io-canonical", false, "payloads differ"};
    for (uint64_t x = 0; x < 8; ++x) {
        BitVec in = BitVec::from_u64(3, x);
        if (!(circ::io_eval(t1, in) == direct.eval(in))) return {"io-canonical", false, "eval mismatch"};
    }
    return {"io-canonical", true, ""};
}

inline SuiteResult puncture_ggm(uint64_t seed) {
    Rng rng(seed + 5);
    circ::KeyedCircuitClass cls = prf::as_keyed_class(8, 8);
    circ::ClassKey key = cls.sample_key(rng);
    prf::GgmKey k = prf::GgmKey::deserialize(key);
    BitVec x1 = rng.bitvec(8), x2 = rng.bitvec(8);
    circ::PuncturedCircuit g = circ::puncture(cls, key, x1, x2);
    for (uint64_t x = 0; x < 256; ++x) {
        BitVec in = BitVec::from_u64(8, x);
        auto got = g.circuit->run(in);
        bool hit = in == x1 || in == x2;
        if (hit && got.has_value()) return {"puncture-ggm", false, "defined at punctured point"};
        if (!hit && !(got == std::optional<BitVec>(prf::prf_eval(k, in))))
            return {"puncture-ggm", false, "mismatch off punctured points"};
    }
    return {"puncture-ggm", true, ""};
}

inline SuiteResult puncture_point(uint64_t seed) {
    Rng rng(seed + 6);
    circ::KeyedCircuitClass cls = apps::evasive_class(8, 1);
    circ::ClassKey key = cls.sample_key(rng);
    circ::ProgPtr base = cls.build(key);
    BitVec x1 = rng.bitvec(8), x2 = rng.bitvec(8);
    circ::ProgPtr one = apps::const_one_patch(8);
    circ::PuncturedCircuit g = circ::gen_puncture(cls, key, x1, x2, one, one);
    for (uint64_t x = 0; x < 256; ++x) {
        BitVec in = BitVec::from_u64(8, x);
        auto got = g.circuit->run(in);
        if (in == x1 || in == x2) {
            if (!(got == one->run(in))) return {"puncture-point", false, "patch not applied"};
        } else if (!(got == base->run(in))) {
            return {"puncture-point", false, "mismatch off punctured points"};
        }
    }
    return {"puncture-point", true, ""};
}

inline SuiteResult prg_injective(uint64_t seed) {
    Rng rng(seed + 7);
    prf::PrgSpec spec = prf::prg_gen(10, rng);
    if (!prf::prg_verify_injective(spec)) return {"prg-injective", false, "collision found"};
    return {"prg-injective", true, ""};
}

inline SuiteResult postproc_roundtrip(uint64_t) {
    bool ok = check_postproc([](const BitVec& u, const BitVec& r) { return cllz::postproc_mask(u, r); });
    return {"postproc-roundtrip", ok, ok ? "" : "roundtrip broke"};
}

inline SuiteResult cllz_roundtrip(uint64_t seed) {
    Rng rng(seed + 8);
    cllz::CllzParams p{4, 2, 8};
    auto [sk, pk] = cllz::gen(p, rng);
    cllz::QuantumDecryptor dec = cllz::qkeygen(sk);
    for (int t = 0; t < 50; ++t) {
        BitVec m = rng.bitvec(8);
        auto [got, next] = cllz::dec(std::move(dec), cllz::enc(pk, m, rng), 8, rng);
        dec = std::move(next);
        if (!(got == std::optional<BitVec>(m))) return {"cllz-roundtrip", false, "decryption mismatch"};
    }
    return {"cllz-roundtrip", true, ""};
}

inline SuiteResult trigger_roundtrip(uint64_t seed) {
    Rng rng(seed + 9);
    cp::CpParams params;
    prf::GgmKey k1 = prf::prf_gen(params.input_len(), params.m, rng);
    cp::CpPrfProgram prog = cp::copyprotect(k1, params, rng);
    auto p = std::dynamic_pointer_cast<const cp::ProgramP>(prog.p_tilde.program());
    kv::Writer w;
    p->fields(w);
    kv::Reader r(w.str());
    prf::GgmKey k2 = prf::GgmKey::deserialize(r.get_bytes("k2"));
    prf::GgmKey k3 = prf::GgmKey::deserialize(r.get_bytes("k3"));
    for (int t = 0; t < 10; ++t) {
        BitVec x0 = rng.bitvec(params.l0);
        BitVec y = rng.bitvec(params.m);
        BitVec xt = cp::gen_trigger(x0, y, k2, k3, prog.cosets, params);
        auto got = cp::cp_eval(prog, xt, rng);
        if (!(got == std::optional<BitVec>(y))) return {"trigger-roundtrip", false, "trigger missed y"};
    }
    for (int t = 0; t < 200; ++t)
        if (p->is_trigger(rng.bitvec(params.input_len())))
            return {"trigger-roundtrip", false, "accidental trigger"};
    return {"trigger-roundtrip", true, ""};
}

inline SuiteResult upo_roundtrip(uint64_t seed) {
    Rng rng(seed + 10);
    upo::UpoParams params;
    circ::ProgPtr w = circ::as_program(circ::identity_circuit(params.input_len()));
    upo::UpoObfuscation rho = upo::upo_obf(w, params, rng);
    for (int t = 0; t < 25; ++t) {
        BitVec x = rng.bitvec(params.input_len());
        auto [z, next] = upo::upo_eval(std::move(rho), x, rng);
        rho = std::move(next);
        if (!(z == std::optional<BitVec>(x))) return {"upo-roundtrip", false, "evaluation mismatch"};
    }
    return {"upo-roundtrip", true, ""};
}

inline SuiteResult sig_roundtrip(uint64_t seed) {
    Rng rng(seed + 11);
    sig::SigScheme s = sig::sig_gen(16, 12, rng);
    for (int t = 0; t < 50; ++t) {
        BitVec m = rng.bitvec(16);
        if (!sig::sig_verify(s.vk, m, sig::sig_sign(s, m))) return {"sig-roundtrip", false, "verify failed"};
    }
    BitVec m1 = rng.bitvec(16);
    if (sig::sig_sign_star(sig::sig_puncture(s, {m1}), m1).has_value())
        return {"sig-roundtrip", false, "punctured signer answered"};
    return {"sig-roundtrip", true, ""};
}

}  // namespace detail

/// Runs all suites whose names contain `filter` (empty = all).
inline std::vector<SuiteResult> run_all(const std::string& filter = "", uint64_t seed = 17) {
    std::vector<std::pair<std::string, std::function<SuiteResult(uint64_t)>>> suites = {
        {"gf2-rref", detail::gf2_rref},
        {"gf2-dual", detail::gf2_dual},
        {"coset-membership", detail::coset_membership},
        {"coset-duality", detail::coset_duality},
        {"io-canonical", detail::io_canonical},
        {"puncture-ggm", detail::puncture_ggm},
        {"puncture-point", detail::puncture_point},
        {"prg-injective", detail::prg_injective},
        {"postproc-roundtrip", detail::postproc_roundtrip},
        {"cllz-roundtrip", detail::cllz_roundtrip},
        {"trigger-roundtrip", detail::trigger_roundtrip},
        {"upo-roundtrip", detail::upo_roundtrip},
        {"sig-roundtrip", detail::sig_roundtrip}};
    std::vector<SuiteResult> out;
    for (const auto& [name, suite] : suites) {
        if (!filter.empty() && name.find(filter) == std::string::npos) continue;
        out.push_back(suite(seed));
    }
    return out;
}

}  // namespace ucl::selftest
