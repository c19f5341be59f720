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

#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "ucl/apps.hpp"

using namespace ucl;
using namespace ucl::apps;

namespace {

upo::UpoParams desk_params() { return upo::UpoParams{}; }

std::set<BitVec> accepting_set(const circ::Program& c, uint32_t n) {
    std::set<BitVec> out;
    for (uint64_t x = 0; x < (uint64_t(1) << n); ++x) {
        BitVec in = BitVec::from_u64(n, x);
        auto y = c.run(in);
        if (y && y->get(0)) out.insert(in);
    }
    return out;
}

}  // namespace

TEST_CASE("cp_copyprotect: PRF class roundtrip and punctured comparison") {
    Rng rng(111);
    upo::UpoParams params = desk_params();
    uint32_t nw = params.input_len();

    circ::KeyedCircuitClass cls = prf::as_keyed_class(nw, 8);
    circ::ClassKey key = cls.sample_key(rng);
    prf::GgmKey k = prf::GgmKey::deserialize(key);

    upo::UpoObfuscation rho = cp_copyprotect(cls, key, params, rng);
    for (int trial = 0; trial < 100; ++trial) {
        BitVec x = rng.bitvec(nw);
        auto [y, next] = upo::upo_eval(std::move(rho), x, rng);
        rho = std::move(next);
        CHECK(*y == prf::prf_eval(k, x));
    }

    // Copy-protect the punctured member and compare against the class
    // member off the punctured points.
    BitVec x1 = rng.bitvec(nw), x2 = rng.bitvec(nw);
    upo::UpoObfuscation rho_g = upo::upo_obf_punctured(cls, key, x1, x2, upo::PunctureMode::Plain,
                                                       nullptr, nullptr, params, rng);
    auto [z1, rg1] = upo::upo_eval(std::move(rho_g), x1, rng);
    CHECK_FALSE(z1.has_value());
    rho_g = std::move(rg1);
    for (int trial = 0; trial < 20; ++trial) {
        BitVec x = rng.bitvec(nw);
        if (x == x1 || x == x2) continue;
        auto [zg, ng] = upo::upo_eval(std::move(rho_g), x, rng);
        rho_g = std::move(ng);
        CHECK(*zg == prf::prf_eval(k, x));
    }
}

TEST_CASE("cp_copyprotect: constant class") {
    Rng rng(112);
    upo::UpoParams params = desk_params();
    circ::KeyedCircuitClass cls;
    cls.name = "const";
    cls.input_len = params.input_len();
    cls.output_len = 8;
    uint32_t nw = params.input_len();
    cls.sample_key = [](Rng& r) { return r.bitvec(8).to_bytes(); };
    cls.build = [nw](const circ::ClassKey& key) -> circ::ProgPtr {
        return std::make_shared<circ::ConstProgram>(nw, BitVec::from_bytes(8, key));
    };
    circ::ClassKey key = cls.sample_key(rng);
    upo::UpoObfuscation rho = cp_copyprotect(cls, key, params, rng);
    auto [y, next] = upo::upo_eval(std::move(rho), rng.bitvec(nw), rng);
    CHECK(*y == BitVec::from_bytes(8, key));
}

TEST_CASE("sw scheme is a puncturable cryptographic scheme") {
    Rng rng(113);
    PuncturableCryptoScheme s = sw_scheme(8);
    auto [sk, aux] = s.gen(rng);

    // Verify after Eval always accepts.
    for (uint64_t x = 0; x < 256; ++x) {
        BitVec in = BitVec::from_u64(8, x);
        CHECK(s.verify(sk, aux, in, s.eval(sk, in)));
    }

    // Punctured circuit: exhaustive agreement off the punctured points.
    BitVec x1 = rng.bitvec(8), x2 = rng.bitvec(8);
    circ::ProgPtr g = s.puncture(sk, x1, x2);
    for (uint64_t x = 0; x < 256; ++x) {
        BitVec in = BitVec::from_u64(8, x);
        auto got = g->run(in);
        if (in == x1 || in == x2)
            CHECK_FALSE(got.has_value());
        else
            CHECK(*got == s.eval(sk, in));
    }

    // Verify rejects any perturbed output.
    for (int i = 0; i < 200; ++i) {
        BitVec x = rng.bitvec(8);
        BitVec y = s.eval(sk, x);
        BitVec e = rng.bitvec(8);
        if (e.is_zero()) e.set(0, true);
        CHECK_FALSE(s.verify(sk, aux, x, y ^ e));
    }

    // The auxiliary information is the obfuscated encryption circuit.
    circ::Obfuscated pk = circ::Obfuscated::deserialize(aux);
    auto swp = std::dynamic_pointer_cast<const SwEncProgram>(pk.program());
    REQUIRE(swp);
    BitVec r = rng.bitvec(4), m = rng.bitvec(8);
    auto ct = pk.eval(concat(r, m));
    REQUIRE(ct.has_value());
    CHECK(ct->size() == 16);
}

TEST_CASE("sw-sde: roundtrips, determinism, ciphertext structure") {
    Rng rng(114);
    upo::UpoParams params = desk_params();
    SwSde sde = sw_sde_gen(params, rng);
    upo::UpoObfuscation rho = sw_sde_qkeygen(sde, rng);

    for (int trial = 0; trial < 200; ++trial) {
        BitVec m = rng.bitvec(sde.msg_len());
        SwSdeCiphertext ct = sw_sde_enc(sde, m, rng);
        auto [got, next] = sw_sde_dec(std::move(rho), ct, rng);
        rho = std::move(next);
        REQUIRE(got.has_value());
        CHECK(*got == m);
    }

    // Determinism given the seed, and the first component is the PRG image
    // of the drawn randomness.
    BitVec m = rng.bitvec(sde.msg_len());
    Rng ra(7), rb(7);
    SwSdeCiphertext c1 = sw_sde_enc(sde, m, ra);
    SwSdeCiphertext c2 = sw_sde_enc(sde, m, rb);
    CHECK(c1.y == c2.y);
    CHECK(c1.z == c2.z);
    Rng rc(7);
    BitVec r = rc.bitvec(sde.msg_len() / 2);
    CHECK(c1.y == prf::prg(sde.prg_spec, r));
    CHECK(c1.z == (prf::prf_eval(sde.k, c1.y) ^ m));
}

TEST_CASE("copy-protected signatures") {
    Rng rng(115);
    upo::UpoParams params = desk_params();
    CpSignatures cps = cp_sig_gen(12, params, rng);
    upo::UpoObfuscation rho = cp_sig_qkeygen(cps, rng);

    for (int trial = 0; trial < 200; ++trial) {
        BitVec m = rng.bitvec(params.input_len());
        auto [sigma, next] = cp_sig_sign(std::move(rho), m, rng);
        rho = std::move(next);
        REQUIRE(sigma.has_value());
        CHECK(sig::sig_verify(cps.ds.vk, m, *sigma));
    }

    // Punctured signing key is undefined exactly at the punctured message.
    BitVec m1 = rng.bitvec(params.input_len());
    auto psk = sig::sig_puncture(cps.ds, {m1});
    CHECK_FALSE(sig::sig_sign_star(psk, m1).has_value());

    // The verification key is fixed classical data, independent of how
    // many quantum signing keys are minted.
    std::vector<uint8_t> vk_before = cps.ds.vk.serialize();
    upo::UpoObfuscation rho2 = cp_sig_qkeygen(cps, rng);
    CHECK(cps.ds.vk.serialize() == vk_before);
}

TEST_CASE("cpa lift: roundtrips, point-circuit domain, double lift") {
    Rng rng(116);

    // Lift over the CLLZ post-processing SDE (fast quantum base).
    SdeOps base = make_cllz_postproc_ops(cllz::CllzParams{4, 2, 16}, rng);
    SdeOps lifted = cpa_lift(base, 12);
    CHECK(lifted.msg_len == 16);

    for (int trial = 0; trial < 200; ++trial) {
        BitVec m = rng.bitvec(16);
        auto ct = lifted.enc(m, rng);
        auto got = lifted.dec(ct, rng);
        REQUIRE(got.has_value());
        CHECK(*got == m);
    }

    // The embedded point circuit answers only at its point.
    BitVec m = rng.bitvec(16);
    auto ct = lifted.enc(m, rng);
    kv::Reader r(ct);
    circ::Obfuscated point = circ::Obfuscated::deserialize(r.get_bytes("point"));
    int defined = 0;
    for (uint64_t x = 0; x < (uint64_t(1) << 12); ++x)
        if (point.eval(BitVec::from_u64(12, x)).has_value()) ++defined;
    CHECK(defined == 1);

    // Lifting the lifted scheme stays correct.
    SdeOps twice = cpa_lift(lifted, 10);
    for (int trial = 0; trial < 20; ++trial) {
        BitVec mm = rng.bitvec(16);
        auto c2 = twice.enc(mm, rng);
        CHECK(*twice.dec(c2, rng) == mm);
    }

    CHECK_THROWS_AS(cpa_lift(lifted, 15), std::invalid_argument);
}

TEST_CASE("evasive class: accepting sets have exactly t points") {
    Rng rng(117);
    for (uint32_t t : {1u, 2u, 3u}) {
        circ::KeyedCircuitClass cls = evasive_class(10, t);
        for (int trial = 0; trial < 5; ++trial) {
            circ::ClassKey key = cls.sample_key(rng);
            circ::ProgPtr c = cls.build(key);
            auto acc = accepting_set(*c, 10);
            CHECK(acc.size() == t);
            auto pts = evasive_key_points(key);
            CHECK(acc == std::set<BitVec>(pts.begin(), pts.end()));
        }
    }
}

TEST_CASE("evasive puncturing: planted points change accepting sets exactly") {
    Rng rng(118);
    uint32_t n = 8;

    // mu = 1 at an already-accepting y leaves the functionality unchanged.
    circ::KeyedCircuitClass f2 = evasive_class(n, 2);
    circ::ClassKey key = f2.sample_key(rng);
    auto pts = evasive_key_points(key);
    circ::ProgPtr base = f2.build(key);
    circ::ProgPtr same = evasive_gen_puncture(f2, key, pts[0], pts[0], const_one_patch(n),
                                              const_one_patch(n));
    CHECK(accepting_set(*same, n) == accepting_set(*base, n));

    // Puncturing at a non-accepting y with mu = 1 gains exactly that point.
    BitVec y = rng.bitvec(n);
    while (std::find(pts.begin(), pts.end(), y) != pts.end()) y = rng.bitvec(n);
    circ::ProgPtr grown = evasive_gen_puncture(f2, key, y, y, const_one_patch(n), const_one_patch(n));
    auto expect = accepting_set(*base, n);
    expect.insert(y);
    CHECK(accepting_set(*grown, n) == expect);
}

TEST_CASE("copy-protected point function: exhaustive n=8 agreement") {
    Rng rng(119);
    upo::UpoParams params = desk_params();
    circ::KeyedCircuitClass f1 = evasive_class(8, 1);
    circ::ClassKey key = f1.sample_key(rng);
    BitVec point = evasive_key_points(key)[0];

    upo::UpoObfuscation rho = cp_evasive(f1, key, params, rng);
    for (uint64_t x = 0; x < 256; ++x) {
        BitVec in = BitVec::from_u64(8, x);
        auto [y, next] = upo::upo_eval(std::move(rho), pad_input(in, params.input_len()), rng);
        rho = std::move(next);
        REQUIRE(y.has_value());
        CHECK(y->get(0) == (in == point));
    }
}

TEST_CASE("evasive iO-composed class keeps functionality") {
    Rng rng(120);
    circ::KeyedCircuitClass cls = evasive_io_class(8, 2);
    circ::ClassKey key = cls.sample_key(rng);
    kv::Reader kr(key);
    auto pts = evasive_key_points(kr.get_bytes("k"));
    circ::ProgPtr c = cls.build(key);
    auto acc = accepting_set(*c, 8);
    CHECK(acc == std::set<BitVec>(pts.begin(), pts.end()));
}

TEST_CASE("d_identical sampler: equal pairs, accepting branch, fair coin") {
    Rng rng(121);
    circ::KeyedCircuitClass f2 = evasive_class(8, 2);
    circ::ClassKey key = f2.sample_key(rng);
    auto pts = evasive_key_points(key);
    circ::ProgPtr c = f2.build(key);
    std::set<BitVec> acc(pts.begin(), pts.end());

    int accepting = 0;
    const int kDraws = 2000;
    for (int i = 0; i < kDraws; ++i) {
        auto [xb, xc] = d_identical_sampler(8, pts, rng);
        CHECK(xb == xc);
        if (acc.count(xb)) {
            ++accepting;
            CHECK(c->run(xb)->get(0));
        }
    }
    // Half the draws come from the accepting branch (uniform draws hit the
    // 2-point accepting set with probability 2/256, folded into margin).
    CHECK(double(accepting) / kDraws == Catch::Approx(0.5).margin(0.03));
}

TEST_CASE("preimage-sampling statistical distance at tiny parameters") {
    // t=1: punctured constant-0 circuits and fresh point functions induce
    // identical (payload, x) distributions under canonical tables.
    CHECK(presamp_statistical_distance(3, 1) == Catch::Approx(0.0).margin(1e-12));
    CHECK(presamp_statistical_distance(4, 1) == Catch::Approx(0.0).margin(1e-12));

    // t=2: the RHS occasionally re-plants an accepting point on top of an
    // existing one, producing 1-point functions the LHS never emits. That
    // collision mass is exactly (t-1)/2^n of the RHS.
    double tv = presamp_statistical_distance(3, 2);
    CHECK(tv == Catch::Approx(1.0 / 8).margin(1e-9));
}
