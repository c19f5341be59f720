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

#include "ucl/obf.hpp"
#include "ucl/prf.hpp"

namespace ucl::sig {

using circ::Obfuscated;
using circ::Program;
using circ::ProgPtr;

/// Verification circuit hardwired into the public key: accepts (m, sigma)
/// iff PRG(sigma) == PRG(PRF(k, m)). With an injective PRG each message
/// has exactly one accepted signature.
class VerifyProgram final : public Program {
  public:
    VerifyProgram(prf::GgmKey k, prf::PrgSpec prg_spec) : key_(std::move(k)), prg_(prg_spec) {
        if (prg_.in_len != key_.out_len) throw std::invalid_argument("VerifyProgram: PRG arity mismatch");
    }

    size_t input_len() const override { return key_.in_len + key_.out_len; }
    size_t output_len() const override { return 1; }

    std::optional<BitVec> run(const BitVec& x) const override {
        BitVec msg = x.slice(0, key_.in_len);
        BitVec sigma = x.slice(key_.in_len, key_.out_len);
        bool ok = prf::prg(prg_, sigma) == prf::prg(prg_, prf::prf_eval(key_, msg));
        return BitVec::from_bits({ok ? 1 : 0});
    }

    std::string kind() const override { return "sig-verify"; }

    void fields(kv::Writer& w) const override {
        w.put_bytes("key", key_.serialize());
        w.put_u64("prg_in", prg_.in_len);
        w.put_u64("prg_lo", prg_.seed.lo);
        w.put_u64("prg_hi", prg_.seed.hi);
    }

    static ProgPtr from_kv(const kv::Reader& r) {
        prf::PrgSpec spec{uint32_t(r.get_u64("prg_in")), Block128{r.get_u64("prg_lo"), r.get_u64("prg_hi")}};
        return std::make_shared<VerifyProgram>(prf::GgmKey::deserialize(r.get_bytes("key")), spec);
    }

  private:
    prf::GgmKey key_;
    prf::PrgSpec prg_;
};

inline const bool kVerifyProgramRegistered = circ::register_program("sig-verify", &VerifyProgram::from_kv);

struct SigScheme {
    prf::GgmKey sk;
    Obfuscated vk;        // obfuscated signature checker
    prf::PrgSpec prg_spec;

    uint32_t msg_len() const { return sk.in_len; }
    uint32_t sig_len() const { return sk.out_len; }
};

inline SigScheme sig_gen(uint32_t msg_len, uint32_t sig_len, Rng& rng) {
    SigScheme s;
    s.sk = prf::prf_gen(msg_len, sig_len, rng);
    s.prg_spec = prf::prg_gen(sig_len, rng);
    s.vk = circ::toy_io(std::make_shared<VerifyProgram>(s.sk, s.prg_spec), circ::IoMode::Passthrough, rng);
    return s;
}

inline BitVec sig_sign(const SigScheme& s, const BitVec& msg) { return prf::prf_eval(s.sk, msg); }

inline bool sig_verify(const Obfuscated& vk, const BitVec& msg, const BitVec& sigma) {
    auto out = vk.eval(concat(msg, sigma));
    return out && out->get(0);
}

inline prf::PuncturedPrfKey sig_puncture(const SigScheme& s, std::vector<BitVec> msgs) {
    return prf::prf_puncture(s.sk, std::move(msgs));
}

/// Signing under a punctured key; nullopt at the punctured messages.
inline std::optional<BitVec> sig_sign_star(const prf::PuncturedPrfKey& pk, const BitVec& msg) {
    return prf::prf_punct_eval(pk, msg);
}

}  // namespace ucl::sig
