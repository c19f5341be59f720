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
// Single-decryptor encryption experiments. Every scheme's quantum key is a
// list of coset states (a basis state is the zero-subspace case), so one
// adapter shape covers CLLZ, its post-processed variant, and the SW-based
// scheme.
// ---------------------------------------------------------------------------

struct SdeGameScheme {
    struct Instance {
        std::vector<gf2::CosetPair> cosets;
        std::vector<uint8_t> qkey_classical;  // classical companions of the quantum key
        std::vector<uint8_t> pk;
        std::vector<uint8_t> sk;
    };

    std::string name;
    uint32_t msg_len = 0;
    std::function<Instance(Rng&)> gen;
    std::function<std::vector<uint8_t>(const Instance&, const BitVec&, Rng&)> enc;
    std::function<std::optional<BitVec>(const std::vector<uint8_t>& qkey_classical, LocalView&,
                                        const std::vector<std::vector<uint32_t>>&,
                                        const std::vector<uint8_t>& ct, Rng&)>
        dec_local;
};

namespace detail {

inline std::pair<qsim::StateVector, std::vector<std::vector<uint32_t>>> materialize_qkey(
    const std::vector<gf2::CosetPair>& cosets) {
    cllz::QuantumDecryptor dec = cllz::qkeygen(cllz::SecretKey{cosets});
    return {std::move(dec.state), dec.blocks()};
}

}  // namespace detail

inline SdeGameScheme make_cllz_sde_game(const cllz::CllzParams& params) {
    SdeGameScheme s;
    s.name = "cllz-sde";
    s.msg_len = params.msg_len;
    s.gen = [params](Rng& rng) {
        auto [sk, pk] = cllz::gen(params, rng);
        SdeGameScheme::Instance inst;
        inst.cosets = sk.pairs;
        inst.pk = pk.serialize();
        inst.sk = sk.serialize();
        return inst;
    };
    s.enc = [params](const SdeGameScheme::Instance& inst, const BitVec& m, Rng& rng) {
        cllz::PublicKey pk = cllz::PublicKey::deserialize(inst.pk);
        return cllz::enc(pk, m, rng).serialize();
    };
    s.dec_local = [params](const std::vector<uint8_t>&, LocalView& view,
                           const std::vector<std::vector<uint32_t>>& blocks,
                           const std::vector<uint8_t>& ct_bytes, Rng& rng) {
        cllz::Ciphertext ct = cllz::Ciphertext::deserialize(ct_bytes);
        return cllz::dec_core(view, blocks, ct, params.msg_len, rng);
    };
    return s;
}

inline SdeGameScheme make_cllz_postproc_game(const cllz::CllzParams& params) {
    SdeGameScheme s = make_cllz_sde_game(params);
    s.name = "cllz-postproc";
    s.enc = [params](const SdeGameScheme::Instance& inst, const BitVec& m, Rng& rng) {
        cllz::PublicKey pk = cllz::PublicKey::deserialize(inst.pk);
        return cllz::postproc_enc(pk, m, rng).serialize();
    };
    s.dec_local = [](const std::vector<uint8_t>&, LocalView& view,
                     const std::vector<std::vector<uint32_t>>& blocks,
                     const std::vector<uint8_t>& ct_bytes, Rng& rng) -> std::optional<BitVec> {
        cllz::PostProcCiphertext ct = cllz::PostProcCiphertext::deserialize(ct_bytes);
        auto r = cllz::dec_core(view, blocks, ct.inner, ct.u.size(), rng);
        if (!r) return std::nullopt;
        return cllz::dec_post_process(ct.u, ct.z, *r);
    };
    return s;
}

inline SdeGameScheme make_sw_sde_game(const upo::UpoParams& params) {
    SdeGameScheme s;
    s.name = "sw-sde";
    s.msg_len = params.input_len();
    s.gen = [params](Rng& rng) {
        apps::SwSde sde = apps::sw_sde_gen(params, rng);
        upo::UpoObfuscation rho = apps::sw_sde_qkeygen(sde, rng);
        SdeGameScheme::Instance inst;
        inst.cosets = rho.cosets;
        kv::Writer w;
        w.put_bytes("c", rho.c_tilde.serialize());
        w.put_bytes("d", rho.d_tilde.serialize());
        w.put_u64("n", params.cp.n);
        w.put_u64("l0", params.cp.l0);
        w.put_u64("n1", params.cp.n1);
        w.put_u64("encq", params.cp.enc_q_bits);
        w.put_u64("m", params.cp.m);
        inst.qkey_classical = w.bytes();
        inst.pk = sde.pk.serialize();
        inst.sk = sde.k.serialize();
        return inst;
    };
    s.enc = [](const SdeGameScheme::Instance& inst, const BitVec& m, Rng& rng) {
        circ::Obfuscated pk = circ::Obfuscated::deserialize(inst.pk);
        BitVec r = rng.bitvec(m.size() / 2);
        auto ct = pk.eval(concat(r, m));
        return apps::SwSdeCiphertext{ct->slice(0, m.size()), ct->slice(m.size(), m.size())}.serialize();
    };
    s.dec_local = [](const std::vector<uint8_t>& qkc, LocalView& view,
                     const std::vector<std::vector<uint32_t>>& blocks,
                     const std::vector<uint8_t>& ct_bytes, Rng& rng) -> std::optional<BitVec> {
        apps::SwSdeCiphertext ct = apps::SwSdeCiphertext::deserialize(ct_bytes);
        auto y = detail::eval_on_view(view, blocks, qkc, ct.y, rng);
        if (!y) return std::nullopt;
        return *y ^ ct.z;
    };
    return s;
}

/// CPA-lifted wrapper around any SDE game scheme.
inline SdeGameScheme make_lifted_game(SdeGameScheme base, uint32_t r_len = 12) {
    if (r_len > apps::kLiftPointDomainCap || r_len > base.msg_len)
        throw std::invalid_argument("make_lifted_game: bad point domain");
    auto base_ptr = std::make_shared<SdeGameScheme>(std::move(base));
    SdeGameScheme s;
    s.name = base_ptr->name + "+cpa";
    s.msg_len = base_ptr->msg_len;
    s.gen = base_ptr->gen;
    s.enc = [base_ptr, r_len](const SdeGameScheme::Instance& inst, const BitVec& m, Rng& rng) {
        BitVec r = rng.bitvec(r_len);
        circ::Obfuscated point = circ::toy_io(circ::point_circuit(r_len, r, m),
                                              circ::IoMode::TruthTable, rng);
        kv::Writer w;
        w.put_bytes("point", point.serialize());
        w.put_bytes("inner", base_ptr->enc(inst, apps::pad_input(r, base_ptr->msg_len), rng));
        return w.bytes();
    };
    s.dec_local = [base_ptr, r_len](const std::vector<uint8_t>& qkc, LocalView& view,
                                    const std::vector<std::vector<uint32_t>>& blocks,
                                    const std::vector<uint8_t>& ct_bytes,
                                    Rng& rng) -> std::optional<BitVec> {
        kv::Reader r(ct_bytes);
        circ::Obfuscated point = circ::Obfuscated::deserialize(r.get_bytes("point"));
        auto inner = base_ptr->dec_local(qkc, view, blocks, r.get_bytes("inner"), rng);
        if (!inner) return std::nullopt;
        return point.eval(inner->slice(0, r_len));
    };
    return s;
}

namespace detail {

struct SdeTrialSetup {
    SdeGameScheme::Instance inst;
    std::shared_ptr<qsim::StateVector> state;
    std::vector<std::vector<uint32_t>> blocks;
    std::vector<uint8_t> bundle;  // qkey classical + pk (what A legitimately holds)
};

inline SdeTrialSetup sde_setup(const SdeGameScheme& scheme, Rng& rng) {
    SdeTrialSetup setup;
    setup.inst = scheme.gen(rng);
    auto [st, blocks] = materialize_qkey(setup.inst.cosets);
    setup.state = std::make_shared<qsim::StateVector>(std::move(st));
    setup.blocks = blocks;
    kv::Writer w;
    w.put_bytes("qkc", setup.inst.qkey_classical);
    w.put_bytes("pk", setup.inst.pk);
    setup.bundle = w.bytes();
    return setup;
}

inline std::vector<uint8_t> with_extra(const std::vector<uint8_t>& bundle, const std::string& key,
                                       const std::vector<uint8_t>& value) {
    kv::Writer w;
    kv::Reader r(bundle);
    w.put_bytes("qkc", r.get_bytes("qkc"));
    w.put_bytes("pk", r.get_bytes("pk"));
    w.put_bytes(key, value);
    return w.bytes();
}

/// Honest decryption by a local player holding the full bundle.
inline std::optional<BitVec> honest_dec(const SdeGameScheme& scheme, const SdeTrialSetup& setup,
                                        LocalView& view, const std::vector<uint8_t>& classical,
                                        const std::vector<uint8_t>& ct, Rng& rng) {
    kv::Reader r(classical);
    return scheme.dec_local(r.get_bytes("qkc"), view, setup.blocks, ct, rng);
}

}  // namespace detail

/// Search anti-piracy: both players must recover their full plaintexts.
inline ExperimentResult run_sde_search(const SdeGameScheme& scheme, DistX dist, const GameConfig& cfg) {
    uint32_t q = scheme.msg_len;
    auto trial = [&](Rng& rng) -> TrialOutcome {
        auto setup = detail::sde_setup(scheme, rng);
        BipartiteAllocation alloc = detail::builtin_split(
            cfg.adversary, SplitterInput{setup.state, setup.blocks, setup.bundle}, q, rng);

        auto [mb, mc] = sample_dist_x(dist, q, rng);
        std::vector<uint8_t> ctb = scheme.enc(setup.inst, mb, rng);
        std::vector<uint8_t> ctc = scheme.enc(setup.inst, mc, rng);

        auto play = [&](const std::vector<uint8_t>& ct, const std::vector<uint32_t>& qubits,
                        const std::vector<uint8_t>& classical, bool is_b) -> BitVec {
            LocalView view(alloc.state.get(), qubits);
            if (cfg.adversary.kind == Adversary::Kind::Custom) {
                kv::Writer w;
                w.put_u64("anslen", q);
                w.put_bytes("ct", ct);
                LocalInput li{w.bytes(), view, classical};
                return (is_b ? cfg.adversary.play_b : cfg.adversary.play_c)(li, rng);
            }
            if (cfg.adversary.kind == Adversary::Kind::ForwardB && is_b) {
                auto m = detail::honest_dec(scheme, setup, view, classical, ct, rng);
                return m ? *m : BitVec(q);
            }
            return detail::blind_answer(cfg.adversary, classical, q, rng);
        };

        BitVec yb = play(ctb, alloc.b_qubits, alloc.b_classical, true);
        BitVec yc = play(ctc, alloc.c_qubits, alloc.c_classical, false);
        return TrialOutcome{yb == mb && yc == mc, {{"b_correct", yb == mb ? 1.0 : 0.0}}};
    };

    ExperimentResult res = monte_carlo(trial, cfg.trials, cfg.seed, cfg.jobs);
    res.game = "sde-search";
    res.scheme = scheme.name;
    res.adversary = cfg.adversary.name;
    res.distribution = dist_x_name(dist);
    res.params = {{"q", std::to_string(q)}};
    return res;
}

enum class DistCt { IndMsg, IdenticalCipher };

inline const char* dist_ct_name(DistCt d) { return d == DistCt::IndMsg ? "ind-msg" : "identical-cipher"; }

/// Indistinguishability-from-random: b = 0 encrypts all-zero messages,
/// b = 1 fresh random messages.
inline ExperimentResult run_sde_indrandom(const SdeGameScheme& scheme, DistCt dist,
                                          const GameConfig& cfg) {
    uint32_t q = scheme.msg_len;
    auto trial = [&](Rng& rng) -> TrialOutcome {
        auto setup = detail::sde_setup(scheme, rng);
        BipartiteAllocation alloc = detail::builtin_split(
            cfg.adversary, SplitterInput{setup.state, setup.blocks, setup.bundle}, 1, rng);

        bool b = rng.bit();
        std::vector<uint8_t> ctb, ctc;
        if (dist == DistCt::IndMsg) {
            BitVec m0(q);
            ctb = scheme.enc(setup.inst, b ? rng.bitvec(q) : m0, rng);
            ctc = scheme.enc(setup.inst, b ? rng.bitvec(q) : m0, rng);
        } else {
            BitVec m = b ? rng.bitvec(q) : BitVec(q);
            ctb = scheme.enc(setup.inst, m, rng);
            ctc = ctb;
        }

        auto play = [&](const std::vector<uint8_t>& ct, const std::vector<uint32_t>& qubits,
                        const std::vector<uint8_t>& classical, bool is_b) -> bool {
            LocalView view(alloc.state.get(), qubits);
            if (cfg.adversary.kind == Adversary::Kind::Custom) {
                kv::Writer w;
                w.put_u64("anslen", 1);
                w.put_bytes("ct", ct);
                LocalInput li{w.bytes(), view, classical};
                return (is_b ? cfg.adversary.play_b : cfg.adversary.play_c)(li, rng).get(0);
            }
            if (cfg.adversary.kind == Adversary::Kind::ForwardB && is_b) {
                auto m = detail::honest_dec(scheme, setup, view, classical, ct, rng);
                return !(m && m->is_zero());  // zero plaintext => the b=0 world
            }
            return detail::blind_answer(cfg.adversary, classical, 1, rng).get(0);
        };

        bool bb = play(ctb, alloc.b_qubits, alloc.b_classical, true);
        bool bc = play(ctc, alloc.c_qubits, alloc.c_classical, false);
        return TrialOutcome{bb == b && bc == b, {}};
    };

    ExperimentResult res = monte_carlo(trial, cfg.trials, cfg.seed, cfg.jobs);
    res.game = "sde-indrandom";
    res.scheme = scheme.name;
    res.adversary = cfg.adversary.name;
    res.distribution = dist_ct_name(dist);
    res.params = {{"q", std::to_string(q)}};
    return res;
}

enum class DistCpa { IdenBitIndMsg, Identical };

inline const char* dist_cpa_name(DistCpa d) {
    return d == DistCpa::IdenBitIndMsg ? "iden-bit-ind-msg" : "identical";
}

namespace detail {
/// Baseline adversary message choice for the CPA games: fresh random
/// pairs, shared with both local players through the classical strings.
struct CpaMessages {
    BitVec m0b, m1b, m0c, m1c;
};

inline CpaMessages choose_cpa_messages(uint32_t q, Rng& rng) {
    CpaMessages ms{rng.bitvec(q), rng.bitvec(q), rng.bitvec(q), rng.bitvec(q)};
    if (ms.m0b == ms.m1b) ms.m1b.flip(0);
    if (ms.m0c == ms.m1c) ms.m1c.flip(0);
    return ms;
}
}  // namespace detail

/// Selective / full-blown CPA anti-piracy (the two share mechanics: the
/// adversary names message pairs, the challenger encrypts per the chosen
/// distribution, both players name the bit).
inline ExperimentResult run_sde_cpa_style(const SdeGameScheme& scheme, DistCpa dist,
                                          const GameConfig& cfg, bool selective) {
    uint32_t q = scheme.msg_len;
    auto trial = [&](Rng& rng) -> TrialOutcome {
        auto setup = detail::sde_setup(scheme, rng);
        detail::CpaMessages ms = detail::choose_cpa_messages(q, rng);
        kv::Writer mw;
        mw.put("m0b", ms.m0b.to_hex());
        mw.put("m1b", ms.m1b.to_hex());
        mw.put("m0c", ms.m0c.to_hex());
        mw.put("m1c", ms.m1c.to_hex());
        std::vector<uint8_t> bundle = detail::with_extra(setup.bundle, "msgs", mw.bytes());

        BipartiteAllocation alloc = detail::builtin_split(
            cfg.adversary, SplitterInput{setup.state, setup.blocks, bundle}, 1, rng);

        bool b = rng.bit();
        std::vector<uint8_t> ctb, ctc;
        if (dist == DistCpa::IdenBitIndMsg) {
            ctb = scheme.enc(setup.inst, b ? ms.m1b : ms.m0b, rng);
            ctc = scheme.enc(setup.inst, b ? ms.m1c : ms.m0c, rng);
        } else {
            ctb = scheme.enc(setup.inst, b ? ms.m1b : ms.m0b, rng);
            ctc = ctb;
        }

        auto play = [&](const std::vector<uint8_t>& ct, const std::vector<uint32_t>& qubits,
                        const std::vector<uint8_t>& classical, bool is_b) -> bool {
            LocalView view(alloc.state.get(), qubits);
            if (cfg.adversary.kind == Adversary::Kind::Custom) {
                kv::Writer w;
                w.put_u64("anslen", 1);
                w.put_bytes("ct", ct);
                LocalInput li{w.bytes(), view, classical};
                return (is_b ? cfg.adversary.play_b : cfg.adversary.play_c)(li, rng).get(0);
            }
            if (cfg.adversary.kind == Adversary::Kind::ForwardB && is_b) {
                kv::Reader r(classical);
                kv::Reader msgs(r.get_bytes("msgs"));
                BitVec m1 = BitVec::from_hex(q, msgs.get("m1b"));
                auto m = detail::honest_dec(scheme, setup, view, classical, ct, rng);
                return m && *m == m1;
            }
            return detail::blind_answer(cfg.adversary, classical, 1, rng).get(0);
        };

        bool bb = play(ctb, alloc.b_qubits, alloc.b_classical, true);
        bool bc = play(ctc, alloc.c_qubits, alloc.c_classical, false);
        return TrialOutcome{bb == b && bc == b, {}};
    };

    ExperimentResult res = monte_carlo(trial, cfg.trials, cfg.seed, cfg.jobs);
    res.game = selective ? "sde-selcpa" : "sde-cpa";
    res.scheme = scheme.name;
    res.adversary = cfg.adversary.name;
    res.distribution = dist_cpa_name(dist);
    res.params = {{"q", std::to_string(q)}};
    return res;
}

inline ExperimentResult run_sde_selcpa(const SdeGameScheme& scheme, DistCpa dist, const GameConfig& cfg) {
    return run_sde_cpa_style(scheme, dist, cfg, true);
}

inline ExperimentResult run_sde_cpa(const SdeGameScheme& scheme, DistCpa dist, const GameConfig& cfg) {
    return run_sde_cpa_style(scheme, dist, cfg, false);
}

// ---------------------------------------------------------------------------
// Unclonable encryption experiment. The scheme here is a deliberately
// plain stand-in (computational-basis one-time pad) used to calibrate the
// experiment itself; the split happens before the key is revealed to the
// players.
// ---------------------------------------------------------------------------

inline ExperimentResult run_ue_expt(uint32_t q, const GameConfig& cfg) {
    if (q > qsim::kMaxQubits) throw std::invalid_argument("run_ue_expt: message too wide");
    auto trial = [&](Rng& rng) -> TrialOutcome {
        BitVec sk = rng.bitvec(q);
        BitVec m0 = rng.bitvec(q), m1 = rng.bitvec(q);
        if (m0 == m1) m1.flip(0);
        bool b = rng.bit();
        auto state = std::make_shared<qsim::StateVector>(qsim::StateVector::basis(q, (b ? m1 : m0) ^ sk));

        std::vector<std::vector<uint32_t>> blocks(1);
        for (uint32_t i = 0; i < q; ++i) blocks[0].push_back(i);
        kv::Writer bw;
        bw.put("m0", m0.to_hex());
        bw.put("m1", m1.to_hex());
        BipartiteAllocation alloc =
            detail::builtin_split(cfg.adversary, SplitterInput{state, blocks, bw.bytes()}, 1, rng);

        auto play = [&](const std::vector<uint32_t>& qubits, const std::vector<uint8_t>& classical,
                        bool is_b) -> bool {
            LocalView view(alloc.state.get(), qubits);
            if (cfg.adversary.kind == Adversary::Kind::Custom) {
                kv::Writer w;
                w.put_u64("anslen", 1);
                w.put("sk", sk.to_hex());
                LocalInput li{w.bytes(), view, classical};
                return (is_b ? cfg.adversary.play_b : cfg.adversary.play_c)(li, rng).get(0);
            }
            if (cfg.adversary.kind == Adversary::Kind::ForwardB && is_b) {
                auto mo = view.measure(blocks[0], rng);
                BitVec m = mo.value ^ sk;
                kv::Reader r(classical);
                return m == BitVec::from_hex(q, r.get("m1"));
            }
            return detail::blind_answer(cfg.adversary, classical, 1, rng).get(0);
        };

        bool bb = play(alloc.b_qubits, alloc.b_classical, true);
        bool bc = play(alloc.c_qubits, alloc.c_classical, false);
        return TrialOutcome{bb == b && bc == b, {}};
    };

    ExperimentResult res = monte_carlo(trial, cfg.trials, cfg.seed, cfg.jobs);
    res.game = "ue";
    res.scheme = "otp-ue";
    res.adversary = cfg.adversary.name;
    res.distribution = "chosen-pair";
    res.params = {{"q", std::to_string(q)}};
    return res;
}

}  // namespace ucl::games
