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
#include <map>
#include <set>

#include "ucl/sig.hpp"
#include "ucl/upo.hpp"

namespace ucl::apps {

using circ::ClassKey;
using circ::KeyedCircuitClass;
using circ::Obfuscated;
using circ::ProgPtr;

// ---------------------------------------------------------------------------
// Input extension: the obfuscator's input length is structurally
// l0 + n1 + n2, so narrower functionalities ride in the leading bits and
// ignore the tail.
// ---------------------------------------------------------------------------

class ExtendInputProgram final : public circ::Program {
  public:
    ExtendInputProgram(ProgPtr base, size_t ext_len) : base_(std::move(base)), ext_len_(ext_len) {
        if (ext_len_ < base_->input_len()) throw std::invalid_argument("ExtendInputProgram: shrinking");
    }

    size_t input_len() const override { return ext_len_; }
    size_t output_len() const override { return base_->output_len(); }
    std::optional<BitVec> run(const BitVec& x) const override {
        return base_->run(x.slice(0, base_->input_len()));
    }
    std::string kind() const override { return "extend"; }

    void fields(kv::Writer& w) const override {
        w.put_u64("ext", ext_len_);
        w.put_bytes("base", serialize_program(*base_));
    }

    static ProgPtr from_kv(const kv::Reader& r) {
        return std::make_shared<ExtendInputProgram>(circ::deserialize_program(r.get_bytes("base")),
                                                    r.get_u64("ext"));
    }

  private:
    ProgPtr base_;
    size_t ext_len_;
};

inline const bool kExtendRegistered = circ::register_program("extend", &ExtendInputProgram::from_kv);

inline BitVec pad_input(const BitVec& x, size_t ext_len) {
    BitVec out(ext_len);
    for (size_t i = 0; i < x.size(); ++i) out.set(i, x.get(i));
    return out;
}

/// The keyed class whose members are base members on the leading bits.
/// Punctured points live in the extended domain.
inline KeyedCircuitClass extend_class(const KeyedCircuitClass& base, uint32_t ext_len) {
    KeyedCircuitClass out = base;
    out.name = base.name + "-ext";
    out.input_len = ext_len;
    out.encoded_len = 0;
    out.build = [base, ext_len](const ClassKey& key) -> ProgPtr {
        return std::make_shared<ExtendInputProgram>(base.build(key), ext_len);
    };
    out.puncture_override = nullptr;
    out.gen_puncture_override = nullptr;
    return out;
}

// ---------------------------------------------------------------------------
// Copy-protection of puncturable function classes
// ---------------------------------------------------------------------------

/// CopyProtect() is the obfuscator itself.
inline upo::UpoObfuscation cp_copyprotect(const KeyedCircuitClass& cls, const ClassKey& key,
                                          const upo::UpoParams& params, Rng& rng) {
    ProgPtr c = cls.build(key);
    if (c->input_len() != params.input_len())
        c = std::make_shared<ExtendInputProgram>(std::move(c), params.input_len());
    return upo::upo_obf(std::move(c), params, rng);
}

// ---------------------------------------------------------------------------
// Puncturable cryptographic schemes and the SW instantiation
// ---------------------------------------------------------------------------

struct PuncturableCryptoScheme {
    std::string name;
    uint32_t in_len = 0;
    uint32_t out_len = 0;
    std::function<std::pair<std::vector<uint8_t>, std::vector<uint8_t>>(Rng&)> gen;  // (sk, aux)
    std::function<BitVec(const std::vector<uint8_t>&, const BitVec&)> eval;          // deterministic
    std::function<ProgPtr(const std::vector<uint8_t>&, const BitVec&, const BitVec&)> puncture;
    std::function<bool(const std::vector<uint8_t>&, const std::vector<uint8_t>&, const BitVec&,
                       const BitVec&)>
        verify;
};

/// The pseudorandom-ciphertext encryption circuit:
/// (r, m) -> (PRG(r), PRF(k, PRG(r)) xor m).
class SwEncProgram final : public circ::Program {
  public:
    SwEncProgram(prf::GgmKey k, prf::PrgSpec prg_spec) : k_(std::move(k)), prg_(prg_spec) {
        if (2 * prg_.in_len != k_.in_len || k_.in_len != k_.out_len)
            throw std::invalid_argument("SwEncProgram: arity mismatch");
    }

    size_t input_len() const override { return prg_.in_len + k_.in_len; }
    size_t output_len() const override { return 2 * size_t(k_.in_len); }

    std::optional<BitVec> run(const BitVec& rm) const override {
        BitVec r = rm.slice(0, prg_.in_len);
        BitVec m = rm.slice(prg_.in_len, k_.in_len);
        BitVec y = prf::prg(prg_, r);
        return concat(y, prf::prf_eval(k_, y) ^ m);
    }

    std::string kind() const override { return "sw-enc"; }

    void fields(kv::Writer& w) const override {
        w.put_bytes("key", k_.serialize());
        w.put_u64("prg_in", prg_.in_len);
        w.put_u64("prg_lo", prg_.seed.lo);
        w.put_u64("prg_hi", prg_.seed.hi);
    }

    static ProgPtr from_kv(const kv::Reader& r) {
        prf::PrgSpec spec{uint32_t(r.get_u64("prg_in")), Block128{r.get_u64("prg_lo"), r.get_u64("prg_hi")}};
        return std::make_shared<SwEncProgram>(prf::GgmKey::deserialize(r.get_bytes("key")), spec);
    }

  private:
    prf::GgmKey k_;
    prf::PrgSpec prg_;
};

inline const bool kSwEncRegistered = circ::register_program("sw-enc", &SwEncProgram::from_kv);

/// Puncturable cryptographic scheme built from the pseudorandom-ciphertext
/// encryption: Eval is the PRF, Verify recomputes it, Puncture hands out
/// the co-path evaluator.
inline PuncturableCryptoScheme sw_scheme(uint32_t n) {
    if (n % 2) throw std::invalid_argument("sw_scheme: n must be even");
    PuncturableCryptoScheme s;
    s.name = "sw";
    s.in_len = n;
    s.out_len = n;
    s.gen = [n](Rng& rng) {
        prf::GgmKey k = prf::prf_gen(n, n, rng);
        prf::PrgSpec prg_spec = prf::prg_gen(n / 2, rng);
        Obfuscated pk = circ::toy_io(std::make_shared<SwEncProgram>(k, prg_spec),
                                     circ::IoMode::Passthrough, rng);
        return std::make_pair(k.serialize(), pk.serialize());
    };
    s.eval = [](const std::vector<uint8_t>& sk, const BitVec& x) {
        return prf::prf_eval(prf::GgmKey::deserialize(sk), x);
    };
    s.puncture = [](const std::vector<uint8_t>& sk, const BitVec& x1, const BitVec& x2) -> ProgPtr {
        prf::GgmKey k = prf::GgmKey::deserialize(sk);
        return std::make_shared<prf::PunctPrfProgram>(prf::prf_puncture(k, {x1, x2}));
    };
    s.verify = [](const std::vector<uint8_t>& sk, const std::vector<uint8_t>&, const BitVec& x,
                  const BitVec& y) {
        return prf::prf_eval(prf::GgmKey::deserialize(sk), x) == y;
    };
    return s;
}

// ---------------------------------------------------------------------------
// Single-decryptor encryption from the SW scheme
// ---------------------------------------------------------------------------

struct SwSde {
    prf::GgmKey k;          // sk
    Obfuscated pk;          // the encryption circuit, obfuscated
    prf::PrgSpec prg_spec;  // n/2 -> n
    upo::UpoParams params;  // message length = params.input_len()

    uint32_t msg_len() const { return params.input_len(); }
};

inline SwSde sw_sde_gen(const upo::UpoParams& params, Rng& rng) {
    uint32_t n = params.input_len();
    if (n % 2) throw std::invalid_argument("sw_sde_gen: message length must be even");
    SwSde sde;
    sde.params = params;
    sde.k = prf::prf_gen(n, n, rng);
    sde.prg_spec = prf::prg_gen(n / 2, rng);
    sde.pk = circ::toy_io(std::make_shared<SwEncProgram>(sde.k, sde.prg_spec), circ::IoMode::Passthrough,
                          rng);
    return sde;
}

/// The quantum decryption key: the obfuscated (and then unclonably
/// obfuscated) PRF evaluator.
inline upo::UpoObfuscation sw_sde_qkeygen(const SwSde& sde, Rng& rng) {
    Obfuscated f_tilde = circ::toy_io(std::make_shared<prf::PrfProgram>(sde.k),
                                      circ::IoMode::Passthrough, rng);
    return upo::upo_obf(std::make_shared<circ::ObfProgram>(std::move(f_tilde)), sde.params, rng);
}

struct SwSdeCiphertext {
    BitVec y, z;

    std::vector<uint8_t> serialize() const {
        kv::Writer w;
        w.put_u64("n", y.size());
        w.put("y", y.to_hex());
        w.put("z", z.to_hex());
        return w.bytes();
    }

    static SwSdeCiphertext deserialize(const std::vector<uint8_t>& bytes) {
        kv::Reader r(bytes);
        size_t n = r.get_u64("n");
        return SwSdeCiphertext{BitVec::from_hex(n, r.get("y")), BitVec::from_hex(n, r.get("z"))};
    }
};

inline SwSdeCiphertext sw_sde_enc(const SwSde& sde, const BitVec& m, Rng& rng) {
    if (m.size() != sde.msg_len()) throw std::invalid_argument("sw_sde_enc: message length mismatch");
    BitVec r = rng.bitvec(sde.msg_len() / 2);
    auto ct = sde.pk.eval(concat(r, m));
    return SwSdeCiphertext{ct->slice(0, sde.msg_len()), ct->slice(sde.msg_len(), sde.msg_len())};
}

inline std::pair<std::optional<BitVec>, upo::UpoObfuscation> sw_sde_dec(upo::UpoObfuscation rho,
                                                                        const SwSdeCiphertext& ct,
                                                                        Rng& rng) {
    auto [y, next] = upo::upo_eval(std::move(rho), ct.y, rng);
    if (!y) return {std::nullopt, std::move(next)};
    return {*y ^ ct.z, std::move(next)};
}

// ---------------------------------------------------------------------------
// Copy-protected signatures
// ---------------------------------------------------------------------------

struct CpSignatures {
    sig::SigScheme ds;
    upo::UpoParams params;
};

/// Gen and Verify come from the puncturable signature scheme; the quantum
/// signing key is the obfuscated signing circuit.
inline CpSignatures cp_sig_gen(uint32_t sig_len, const upo::UpoParams& params, Rng& rng) {
    return CpSignatures{sig::sig_gen(params.input_len(), sig_len, rng), params};
}

inline upo::UpoObfuscation cp_sig_qkeygen(const CpSignatures& cps, Rng& rng) {
    return upo::upo_obf(std::make_shared<prf::PrfProgram>(cps.ds.sk), cps.params, rng);
}

inline std::pair<std::optional<BitVec>, upo::UpoObfuscation> cp_sig_sign(upo::UpoObfuscation rho,
                                                                         const BitVec& m, Rng& rng) {
    return upo::upo_eval(std::move(rho), m, rng);
}

// ---------------------------------------------------------------------------
// CPA lift: selectively secure SDE -> full CPA SDE via an obfuscated
// point circuit carrying the message.
// ---------------------------------------------------------------------------

/// Type-erased single-decryptor encryption (correctness surface: the
/// decryptor state lives inside the closures).
struct SdeOps {
    std::string name;
    uint32_t msg_len = 0;
    std::function<std::vector<uint8_t>(const BitVec&, Rng&)> enc;
    std::function<std::optional<BitVec>(const std::vector<uint8_t>&, Rng&)> dec;
};

constexpr uint32_t kLiftPointDomainCap = 14;

inline SdeOps cpa_lift(SdeOps base, uint32_t r_len = 12) {
    if (r_len > kLiftPointDomainCap) throw std::invalid_argument("cpa_lift: point domain cap exceeded");
    if (r_len > base.msg_len) throw std::invalid_argument("cpa_lift: r does not fit base messages");
    SdeOps out;
    out.name = base.name + "+cpa";
    out.msg_len = base.msg_len;
    auto base_ptr = std::make_shared<SdeOps>(std::move(base));
    out.enc = [base_ptr, r_len](const BitVec& m, Rng& rng) {
        BitVec r = rng.bitvec(r_len);
        Obfuscated c_tilde =
            circ::toy_io(circ::point_circuit(r_len, r, m), circ::IoMode::TruthTable, rng);
        kv::Writer w;
        w.put_bytes("point", c_tilde.serialize());
        w.put_bytes("inner", base_ptr->enc(pad_input(r, base_ptr->msg_len), rng));
        return w.bytes();
    };
    out.dec = [base_ptr, r_len](const std::vector<uint8_t>& ct, Rng& rng) -> std::optional<BitVec> {
        kv::Reader r(ct);
        Obfuscated c_tilde = Obfuscated::deserialize(r.get_bytes("point"));
        auto r_pad = base_ptr->dec(r.get_bytes("inner"), rng);
        if (!r_pad) return std::nullopt;
        return c_tilde.eval(r_pad->slice(0, r_len));
    };
    return out;
}

/// SW-SDE wrapped as SdeOps (owns one quantum decryptor internally).
inline SdeOps make_sw_sde_ops(const upo::UpoParams& params, Rng& rng) {
    auto sde = std::make_shared<SwSde>(sw_sde_gen(params, rng));
    auto rho = std::make_shared<upo::UpoObfuscation>(sw_sde_qkeygen(*sde, rng));
    SdeOps ops;
    ops.name = "sw-sde";
    ops.msg_len = sde->msg_len();
    ops.enc = [sde](const BitVec& m, Rng& r) { return sw_sde_enc(*sde, m, r).serialize(); };
    ops.dec = [rho](const std::vector<uint8_t>& ct, Rng& r) {
        auto [m, next] = sw_sde_dec(std::move(*rho), SwSdeCiphertext::deserialize(ct), r);
        *rho = std::move(next);
        return m;
    };
    return ops;
}

/// CLLZ post-processing SDE wrapped as SdeOps.
inline SdeOps make_cllz_postproc_ops(const cllz::CllzParams& params, Rng& rng) {
    auto [sk, pk] = cllz::gen(params, rng);
    auto pk_ptr = std::make_shared<cllz::PublicKey>(std::move(pk));
    auto dec_ptr = std::make_shared<cllz::QuantumDecryptor>(cllz::qkeygen(sk));
    SdeOps ops;
    ops.name = "cllz-postproc";
    ops.msg_len = params.msg_len;
    ops.enc = [pk_ptr](const BitVec& m, Rng& r) { return cllz::postproc_enc(*pk_ptr, m, r).serialize(); };
    ops.dec = [dec_ptr](const std::vector<uint8_t>& ct, Rng& r) {
        auto [m, next] =
            cllz::postproc_dec(std::move(*dec_ptr), cllz::PostProcCiphertext::deserialize(ct), r);
        *dec_ptr = std::move(next);
        return m;
    };
    return ops;
}

// ---------------------------------------------------------------------------
// Evasive function classes
// ---------------------------------------------------------------------------

/// Keys of the F^t class: exactly t distinct accepting points, sorted.
inline ClassKey evasive_key(std::vector<BitVec> points) {
    std::sort(points.begin(), points.end());
    if (std::adjacent_find(points.begin(), points.end()) != points.end())
        throw std::invalid_argument("evasive_key: duplicate accepting points");
    kv::Writer w;
    w.put_u64("t", points.size());
    if (!points.empty()) w.put_u64("n", points[0].size());
    for (size_t i = 0; i < points.size(); ++i) w.put("p" + std::to_string(i), points[i].to_hex());
    return w.bytes();
}

inline std::vector<BitVec> evasive_key_points(const ClassKey& key) {
    kv::Reader r(key);
    size_t t = r.get_u64("t");
    std::vector<BitVec> points;
    size_t n = t ? r.get_u64("n") : 0;
    for (size_t i = 0; i < t; ++i) points.push_back(BitVec::from_hex(n, r.get("p" + std::to_string(i))));
    return points;
}

/// F^t: boolean functions with exactly t accepting points, keyed by the
/// sorted point list; circuits are OR-of-comparators padded to the t-way
/// shape.
inline KeyedCircuitClass evasive_class(uint32_t n, uint32_t t) {
    if ((uint64_t(t)) > (uint64_t(1) << n)) throw std::invalid_argument("evasive_class: t too large");
    KeyedCircuitClass cls;
    cls.name = "evasive-f" + std::to_string(t);
    cls.input_len = n;
    cls.output_len = 1;
    cls.encoded_len = 1024 + size_t(t) * 16 * n;
    cls.sample_key = [n, t](Rng& rng) {
        std::set<BitVec> pts;
        while (pts.size() < t) pts.insert(rng.bitvec(n));
        return evasive_key({pts.begin(), pts.end()});
    };
    cls.build = [n, t](const ClassKey& key) -> ProgPtr {
        std::vector<BitVec> points = evasive_key_points(key);
        if (points.size() != t) throw std::invalid_argument("evasive_class: key has wrong accepting count");
        circ::Builder b(n);
        uint32_t acc = b.constant(false);
        for (const BitVec& p : points) acc = b.or_(acc, b.equals_const(0, p));
        return circ::as_program(b.finish({acc}));
    };
    return cls;
}

/// C_{k', y1, y2, mu1, mu2} from the auxiliary class: patch values at the
/// chosen points, the class circuit elsewhere. The single-point form
/// C_{k', y, mu} is the x1 == x2 case.
inline ProgPtr evasive_gen_puncture(const KeyedCircuitClass& cls, const ClassKey& key, const BitVec& y1,
                                    const BitVec& y2, ProgPtr mu1, ProgPtr mu2) {
    return circ::gen_puncture(cls, key, y1, y2, std::move(mu1), std::move(mu2)).circuit;
}

inline ProgPtr const_one_patch(uint32_t n) {
    return std::make_shared<circ::ConstProgram>(n, BitVec::from_bits({1}));
}

/// The instantiation wrapper: class members ride behind the toy
/// obfuscator, so punctured and fresh members of adjacent classes are
/// syntactically alike.
inline KeyedCircuitClass evasive_io_class(uint32_t n, uint32_t t) {
    return upo::compose_class(evasive_class(n, t), upo::toy_io_compiler());
}

/// Copy-protection of an evasive class member.
inline upo::UpoObfuscation cp_evasive(const KeyedCircuitClass& cls, const ClassKey& key,
                                      const upo::UpoParams& params, Rng& rng) {
    return cp_copyprotect(cls, key, params, rng);
}

/// The identical challenge sampler: a fair coin picks between a uniform
/// input and a uniform accepting input, duplicated across both players.
inline std::pair<BitVec, BitVec> d_identical_sampler(uint32_t n, const std::vector<BitVec>& accepting,
                                                     Rng& rng) {
    BitVec x = rng.bit() && !accepting.empty() ? accepting[rng.range(accepting.size())] : rng.bitvec(n);
    return {x, x};
}

/// Exact total-variation distance between the two sides of the
/// preimage-sampling condition for F^t over n-bit inputs, with the toy
/// obfuscator's canonical tables as the circuit representation. Tiny
/// parameters only (enumerates every key).
inline double presamp_statistical_distance(uint32_t n, uint32_t t) {
    if (n > 4 || t == 0 || t > 3) throw std::invalid_argument("presamp_statistical_distance: tiny only");
    uint64_t domain = uint64_t(1) << n;
    Rng rng(0);

    auto payload_of = [&](const ProgPtr& p) {
        return Obfuscated::truth_table(*p).payload();
    };

    std::map<std::pair<std::vector<uint8_t>, BitVec>, double> lhs, rhs;

    // LHS: k uniform over F^t keys, x uniform over the t accepting points.
    std::vector<std::vector<BitVec>> keys_t;
    std::vector<BitVec> scratch;
    std::function<void(uint64_t, uint32_t)> choose = [&](uint64_t start, uint32_t left) {
        if (left == 0) {
            keys_t.push_back(scratch);
            return;
        }
        for (uint64_t v = start; v < domain; ++v) {
            scratch.push_back(BitVec::from_u64(n, v));
            choose(v + 1, left - 1);
            scratch.pop_back();
        }
    };
    choose(0, t);
    KeyedCircuitClass cls_t = evasive_class(n, t);
    for (const auto& pts : keys_t) {
        ProgPtr c = cls_t.build(evasive_key(pts));
        auto payload = payload_of(c);
        for (const BitVec& x : pts) lhs[{payload, x}] += 1.0 / (double(keys_t.size()) * t);
    }

    // RHS: k' uniform over F^{t-1} keys, y uniform, puncture to constant 1.
    std::vector<std::vector<BitVec>> keys_tm1;
    keys_t.clear();
    std::function<void(uint64_t, uint32_t)> choose2 = [&](uint64_t start, uint32_t left) {
        if (left == 0) {
            keys_tm1.push_back(scratch);
            return;
        }
        for (uint64_t v = start; v < domain; ++v) {
            scratch.push_back(BitVec::from_u64(n, v));
            choose2(v + 1, left - 1);
            scratch.pop_back();
        }
    };
    choose2(0, t - 1);
    KeyedCircuitClass cls_tm1 = evasive_class(n, t - 1);
    for (const auto& pts : keys_tm1) {
        ClassKey key = evasive_key(pts);
        for (uint64_t yv = 0; yv < domain; ++yv) {
            BitVec y = BitVec::from_u64(n, yv);
            ProgPtr c = evasive_gen_puncture(cls_tm1, key, y, y, const_one_patch(n), const_one_patch(n));
            rhs[{payload_of(c), y}] += 1.0 / (double(keys_tm1.size()) * domain);
        }
    }

    double tv = 0;
    std::set<std::pair<std::vector<uint8_t>, BitVec>> support;
    for (const auto& [k, v] : lhs) support.insert(k);
    for (const auto& [k, v] : rhs) support.insert(k);
    for (const auto& k : support) {
        double a = lhs.count(k) ? lhs.at(k) : 0.0;
        double b = rhs.count(k) ? rhs.at(k) : 0.0;
        tv += std::abs(a - b);
    }
    return tv / 2;
}

}  // namespace ucl::apps
