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

#include <optional>
#include <utility>
#include <vector>

#include "ucl/gf2.hpp"
#include "ucl/obf.hpp"
#include "ucl/qsim.hpp"

namespace ucl::cllz {

using circ::Obfuscated;

struct CllzParams {
    uint32_t n = 4;        // coset ambient dimension (even; subspace dim n/2)
    uint32_t l0 = 2;       // number of coset blocks
    uint32_t msg_len = 8;  // plaintext bits

    uint32_t total_qubits() const { return n * l0; }
};

struct SecretKey {
    std::vector<gf2::CosetPair> pairs;

    std::vector<uint8_t> serialize() const {
        kv::Writer w;
        w.put_u64("l0", pairs.size());
        for (size_t i = 0; i < pairs.size(); ++i) w.put("pair" + std::to_string(i), pairs[i].to_hex());
        return w.bytes();
    }

    static SecretKey deserialize(const std::vector<uint8_t>& bytes) {
        kv::Reader r(bytes);
        SecretKey sk;
        size_t l0 = r.get_u64("l0");
        for (size_t i = 0; i < l0; ++i)
            sk.pairs.push_back(gf2::CosetPair::from_hex(r.get("pair" + std::to_string(i))));
        return sk;
    }
};

/// Per block i: R0[i] accepts exactly A_i + s_i, R1[i] accepts exactly
/// A_i-perp + s'_i.
struct PublicKey {
    uint32_t n = 0;
    std::vector<Obfuscated> r0, r1;

    const Obfuscated& checker(size_t block, bool dual_basis) const {
        return dual_basis ? r1[block] : r0[block];
    }

    std::vector<uint8_t> serialize() const {
        kv::Writer w;
        w.put_u64("n", n);
        w.put_u64("l0", r0.size());
        for (size_t i = 0; i < r0.size(); ++i) {
            w.put_bytes("r0_" + std::to_string(i), r0[i].serialize());
            w.put_bytes("r1_" + std::to_string(i), r1[i].serialize());
        }
        return w.bytes();
    }

    static PublicKey deserialize(const std::vector<uint8_t>& bytes) {
        kv::Reader r(bytes);
        PublicKey pk;
        pk.n = uint32_t(r.get_u64("n"));
        size_t l0 = r.get_u64("l0");
        for (size_t i = 0; i < l0; ++i) {
            pk.r0.push_back(Obfuscated::deserialize(r.get_bytes("r0_" + std::to_string(i))));
            pk.r1.push_back(Obfuscated::deserialize(r.get_bytes("r1_" + std::to_string(i))));
        }
        return pk;
    }
};

inline std::pair<SecretKey, PublicKey> gen(const CllzParams& p, Rng& rng) {
    if (p.n % 2 != 0) throw std::invalid_argument("cllz::gen: n must be even");
    if (p.l0 == 0) throw std::invalid_argument("cllz::gen: l0 must be positive");
    if (p.total_qubits() > qsim::kMaxQubits) throw std::invalid_argument("cllz::gen: simulator cap exceeded");
    SecretKey sk;
    PublicKey pk;
    pk.n = p.n;
    for (uint32_t i = 0; i < p.l0; ++i) {
        gf2::CosetPair cp = gf2::sample_coset_pair(p.n, p.n / 2, rng);
        pk.r0.push_back(circ::toy_io(circ::coset_membership_circuit(cp.space, cp.shift_primary),
                                     circ::IoMode::Auto, rng));
        pk.r1.push_back(circ::toy_io(
            circ::coset_membership_circuit(gf2::dual(cp.space), cp.shift_dual), circ::IoMode::Auto, rng));
        sk.pairs.push_back(std::move(cp));
    }
    return {std::move(sk), std::move(pk)};
}

/// Quantum decryption key: the product of the block coset states.
struct QuantumDecryptor {
    qsim::StateVector state;
    qsim::RegisterMap regs;
    uint32_t n = 0, l0 = 0;

    std::vector<std::vector<uint32_t>> blocks() const {
        std::vector<std::vector<uint32_t>> out;
        for (uint32_t i = 0; i < l0; ++i) out.push_back(regs.at("v" + std::to_string(i)));
        return out;
    }

    std::vector<uint32_t> all_qubits() const {
        std::vector<uint32_t> out;
        for (const auto& blk : blocks()) out.insert(out.end(), blk.begin(), blk.end());
        return out;
    }
};

inline QuantumDecryptor qkeygen(const SecretKey& sk) {
    if (sk.pairs.empty()) throw std::invalid_argument("cllz::qkeygen: empty key");
    uint32_t n = uint32_t(sk.pairs[0].space.ambient_dim());
    QuantumDecryptor dec;
    dec.n = n;
    dec.l0 = uint32_t(sk.pairs.size());
    qsim::StateVector st = qsim::prepare_coset_state(sk.pairs[0]);
    for (size_t i = 1; i < sk.pairs.size(); ++i)
        st = qsim::product(st, qsim::prepare_coset_state(sk.pairs[i]));
    dec.state = std::move(st);
    for (uint32_t i = 0; i < dec.l0; ++i) {
        std::vector<uint32_t> qubits;
        for (uint32_t q = 0; q < n; ++q) qubits.push_back(i * n + q);
        dec.regs.add("v" + std::to_string(i), std::move(qubits), size_t(dec.l0) * n);
    }
    return dec;
}

/// The ciphertext circuit: on v = v_1..v_l0, outputs m iff every selected
/// checker accepts its block. Emitted with one TABLE membership gate per
/// block so it stays compact under the bit encoding.
inline circ::BoolCircuit ciphertext_circuit(const PublicKey& pk, const BitVec& basis_choice,
                                            const BitVec& m) {
    uint32_t n = pk.n;
    uint32_t l0 = uint32_t(pk.r0.size());
    if (basis_choice.size() != l0) throw std::invalid_argument("ciphertext_circuit: r length mismatch");
    circ::Builder b(n * l0);
    std::vector<uint32_t> checks;
    for (uint32_t i = 0; i < l0; ++i) {
        std::vector<uint32_t> ins;
        for (uint32_t q = 0; q < n; ++q) ins.push_back(i * n + q);
        std::vector<bool> tbl(size_t(1) << n);
        const Obfuscated& chk = pk.checker(i, basis_choice.get(i));
        for (size_t v = 0; v < tbl.size(); ++v) tbl[v] = chk.eval(BitVec::from_u64(n, v))->get(0);
        checks.push_back(b.table(std::move(ins), std::move(tbl)));
    }
    uint32_t ok = b.and_all(checks);
    std::vector<uint32_t> outs;
    for (size_t i = 0; i < m.size(); ++i) outs.push_back(b.constant(m.get(i)));
    return b.finish_bot(std::move(outs), ok);
}

struct Ciphertext {
    BitVec basis_choice;   // one basis bit per block (the figure's r)
    Obfuscated program;    // the obfuscated ciphertext circuit Q

    std::vector<uint8_t> serialize() const {
        kv::Writer w;
        w.put_u64("l0", basis_choice.size());
        w.put("r", basis_choice.to_hex());
        w.put_bytes("q", program.serialize());
        return w.bytes();
    }

    static Ciphertext deserialize(const std::vector<uint8_t>& bytes) {
        kv::Reader r(bytes);
        Ciphertext ct;
        ct.basis_choice = BitVec::from_hex(r.get_u64("l0"), r.get("r"));
        ct.program = Obfuscated::deserialize(r.get_bytes("q"));
        return ct;
    }
};

inline Ciphertext enc(const PublicKey& pk, const BitVec& m, Rng& rng) {
    BitVec r = rng.bitvec(pk.r0.size());
    circ::BoolCircuit q = ciphertext_circuit(pk, r, m);
    return Ciphertext{r, circ::toy_io(std::move(q), circ::IoMode::Auto, rng)};
}

/// Shared quantum-evaluation core so the same decryption runs on an owned
/// decryptor or on a game-side restricted view.
template <typename Ops>
std::optional<BitVec> dec_core(Ops& ops, const std::vector<std::vector<uint32_t>>& blocks,
                               const Ciphertext& ct, size_t msg_len, Rng& rng) {
    const BitVec& r = ct.basis_choice;
    if (r.size() != blocks.size()) throw std::invalid_argument("cllz::dec: block count mismatch");
    for (size_t i = 0; i < blocks.size(); ++i)
        if (r.get(i)) ops.hadamard(blocks[i]);
    std::vector<uint32_t> input_reg;
    for (const auto& blk : blocks) input_reg.insert(input_reg.end(), blk.begin(), blk.end());
    auto fm = ops.measure_fn([&ct](const BitVec& v) { return ct.program.eval(v); }, msg_len, input_reg, rng);
    for (size_t i = 0; i < blocks.size(); ++i)
        if (r.get(i)) ops.hadamard(blocks[i]);
    return fm.value;
}

namespace detail {
struct OwnedOps {
    qsim::StateVector& st;
    void hadamard(const std::vector<uint32_t>& qs) { st.hadamard(qs); }
    qsim::FnMeasurement measure_fn(const qsim::ClassicalFn& fn, size_t out_len,
                                   const std::vector<uint32_t>& in, Rng& rng) {
        auto fm = qsim::measure_function(st, fn, out_len, in, rng);
        st = fm.post_state;
        return fm;
    }
};
}  // namespace detail

/// Honest decryption. Returns the message and the post-measurement
/// decryptor; on honest ciphertexts the measurement is deterministic and
/// the returned decryptor is exactly the original state.
inline std::pair<std::optional<BitVec>, QuantumDecryptor> dec(QuantumDecryptor decryptor,
                                                              const Ciphertext& ct, size_t msg_len,
                                                              Rng& rng) {
    detail::OwnedOps ops{decryptor.state};
    auto m = dec_core(ops, decryptor.blocks(), ct, msg_len, rng);
    return {m, std::move(decryptor)};
}

// ---------------------------------------------------------------------------
// Post-processing layer: the mask m xor <u, r>, with <u, r> the integer
// product u*r mod Q reduced to q bits, Q the smallest prime above 2^q.
// ---------------------------------------------------------------------------

namespace detail {

using u128 = unsigned __int128;

inline u128 mulmod(u128 a, u128 b, u128 mod) {
    u128 result = 0;
    a %= mod;
    while (b) {
        if (b & 1) result = (result + a) % mod;
        a = (a + a) % mod;
        b >>= 1;
    }
    return result;
}

inline u128 powmod(u128 base, u128 exp, u128 mod) {
    u128 result = 1;
    base %= mod;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, mod);
        base = mulmod(base, base, mod);
        exp >>= 1;
    }
    return result;
}

inline bool is_prime(u128 n) {
    if (n < 2) return false;
    for (u128 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u128 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u128 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u128 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 0; i < s - 1; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

inline u128 smallest_prime_above(u128 x) {
    u128 p = x + 1;
    while (!is_prime(p)) ++p;
    return p;
}

inline u128 bits_to_int(const BitVec& v) {
    // Coordinate 0 is the most significant digit.
    u128 out = 0;
    for (size_t i = 0; i < v.size(); ++i) out = (out << 1) | u128(v.get(i));
    return out;
}

inline BitVec int_to_bits(u128 x, size_t q) {
    BitVec v(q);
    for (size_t i = 0; i < q; ++i) v.set(i, (x >> (q - 1 - i)) & 1);
    return v;
}

}  // namespace detail

/// The shared mask both post-processing directions apply.
inline BitVec postproc_mask(const BitVec& u, const BitVec& r) {
    if (u.size() != r.size()) throw std::invalid_argument("postproc_mask: length mismatch");
    size_t q = u.size();
    if (q > 62) throw std::invalid_argument("postproc_mask: q too large for exact arithmetic");
    detail::u128 modulus = detail::smallest_prime_above(detail::u128(1) << q);
    detail::u128 prod = detail::mulmod(detail::bits_to_int(u), detail::bits_to_int(r), modulus);
    return detail::int_to_bits(prod & (((detail::u128(1) << q)) - 1), q);
}

/// (u, m xor <u,r>).
inline std::pair<BitVec, BitVec> enc_post_process(const BitVec& m, const BitVec& r, Rng& rng) {
    if (m.size() != r.size()) throw std::invalid_argument("enc_post_process: length mismatch");
    BitVec u = rng.bitvec(m.size());
    return {u, m ^ postproc_mask(u, r)};
}

inline BitVec dec_post_process(const BitVec& u, const BitVec& z, const BitVec& r) {
    return z ^ postproc_mask(u, r);
}

struct PostProcCiphertext {
    BitVec u, z;         // c = (u, z)
    Ciphertext inner;    // CLLZ encryption of r

    std::vector<uint8_t> serialize() const {
        kv::Writer w;
        w.put_u64("q", u.size());
        w.put("u", u.to_hex());
        w.put("z", z.to_hex());
        w.put_bytes("inner", inner.serialize());
        return w.bytes();
    }

    static PostProcCiphertext deserialize(const std::vector<uint8_t>& bytes) {
        kv::Reader r(bytes);
        size_t q = r.get_u64("q");
        return PostProcCiphertext{BitVec::from_hex(q, r.get("u")), BitVec::from_hex(q, r.get("z")),
                                  Ciphertext::deserialize(r.get_bytes("inner"))};
    }
};

inline PostProcCiphertext postproc_enc(const PublicKey& pk, const BitVec& m, Rng& rng) {
    BitVec r = rng.bitvec(m.size());
    auto [u, z] = enc_post_process(m, r, rng);
    return PostProcCiphertext{u, z, enc(pk, r, rng)};
}

inline std::pair<std::optional<BitVec>, QuantumDecryptor> postproc_dec(QuantumDecryptor decryptor,
                                                                       const PostProcCiphertext& ct,
                                                                       Rng& rng) {
    auto [r, dec2] = dec(std::move(decryptor), ct.inner, ct.u.size(), rng);
    if (!r) return {std::nullopt, std::move(dec2)};
    return {dec_post_process(ct.u, ct.z, *r), std::move(dec2)};
}

}  // namespace ucl::cllz
