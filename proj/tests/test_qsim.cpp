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

#include <cmath>
#include <map>
#include <set>

#include "ucl/circuit.hpp"
#include "ucl/qsim.hpp"

using namespace ucl;
using namespace ucl::qsim;

namespace {

std::vector<uint32_t> iota_reg(uint32_t lo, uint32_t count) {
    std::vector<uint32_t> r;
    for (uint32_t i = 0; i < count; ++i) r.push_back(lo + i);
    return r;
}

ClassicalFn fn_of(const circ::BoolCircuit& c) {
    return [c](const BitVec& x) { return c.eval(x); };
}

}  // namespace

TEST_CASE("prepare_coset_state canonical cases") {
    Rng rng(21);

    // Full space with zero shifts: uniform superposition.
    gf2::Subspace full = gf2::rref(3, {BitVec::from_string("100"), BitVec::from_string("010"),
                                       BitVec::from_string("001")});
    StateVector u = prepare_coset_state(gf2::make_coset_pair(full, BitVec(3), BitVec(3)));
    for (size_t i = 0; i < u.dim(); ++i)
        CHECK(u.amp(i).real() == Catch::Approx(1.0 / std::sqrt(8.0)).margin(1e-12));

    // Zero space: the basis state |s>.
    gf2::Subspace zero = gf2::rref(3, {});
    BitVec s = BitVec::from_string("110");
    StateVector b = prepare_coset_state(gf2::make_coset_pair(zero, s, BitVec(3)));
    CHECK(fidelity(b, StateVector::basis(3, s)) == Catch::Approx(1.0).margin(1e-12));

    // n=4, A = span{e0,e1}, s=0, s'=(0,0,1,1): <s',a>=0 for all a in A,
    // so every supported amplitude is +1/2.
    gf2::Subspace a = gf2::rref(4, {BitVec::from_string("1000"), BitVec::from_string("0100")});
    StateVector st = prepare_coset_state(gf2::make_coset_pair(a, BitVec(4), BitVec::from_string("0011")));
    std::set<size_t> support = {0b0000, 0b0001, 0b0010, 0b0011};  // LSB-first indices of {0000,1000,0100,1100}
    for (size_t i = 0; i < st.dim(); ++i) {
        if (support.count(i))
            CHECK(st.amp(i).real() == Catch::Approx(0.5).margin(1e-12));
        else
            CHECK(std::abs(st.amp(i)) < 1e-12);
    }
}

TEST_CASE("coset state support equals enumerate_coset exactly") {
    Rng rng(22);
    for (int trial = 0; trial < 25; ++trial) {
        size_t n = 1 + rng.range(6);
        gf2::CosetPair cp = gf2::sample_coset_pair(n, rng.range(n + 1), rng);
        StateVector st = prepare_coset_state(cp);
        auto coset = gf2::enumerate_coset(cp.space, cp.shift_primary);
        std::set<size_t> support;
        for (const BitVec& v : coset) support.insert(size_t(v.to_u64()));
        for (size_t i = 0; i < st.dim(); ++i)
            CHECK((std::norm(st.amp(i)) > 1e-18) == (support.count(i) != 0));
    }
}

TEST_CASE("hadamard identity and involution") {
    Rng rng(23);
    gf2::CosetPair cp = gf2::sample_coset_pair(4, 2, rng);
    StateVector st = prepare_coset_state(cp);
    std::vector<std::vector<uint32_t>> blocks = {iota_reg(0, 4)};

    StateVector same = hadamard_blocks(st, blocks, BitVec::from_string("0"));
    CHECK(fidelity(st, same) == Catch::Approx(1.0).margin(1e-12));

    StateVector twice =
        hadamard_blocks(hadamard_blocks(st, blocks, BitVec::from_string("1")), blocks, BitVec::from_string("1"));
    CHECK(fidelity(st, twice) == Catch::Approx(1.0).margin(1e-12));

    CHECK_THROWS_AS(hadamard_blocks(st, blocks, BitVec::from_string("11")), std::invalid_argument);
}

TEST_CASE("coset duality: H-all maps |A_{s,s'}> onto |A-perp_{s',s}>") {
    Rng rng(24);
    for (int trial = 0; trial < 200; ++trial) {
        size_t n = 2 + rng.range(7);  // up to n=8
        gf2::CosetPair cp = gf2::sample_coset_pair(n, rng.range(n + 1), rng);
        StateVector st = prepare_coset_state(cp);
        st.hadamard(iota_reg(0, uint32_t(n)));
        gf2::CosetPair dual_pair =
            gf2::make_coset_pair(gf2::dual(cp.space), cp.shift_dual, cp.shift_primary);
        StateVector expect = prepare_coset_state(dual_pair);
        CHECK(fidelity(st, expect) >= 1.0 - 1e-9);
    }
}

TEST_CASE("apply_classical basics") {
    Rng rng(25);
    // Constant-zero circuit leaves the state unchanged.
    circ::BoolCircuit zero_c = circ::const_circuit(2, BitVec::from_string("0"));
    StateVector st(4);
    st.hadamard(0);
    st.hadamard(1);
    StateVector out = apply_classical(st, fn_of(zero_c), 1, iota_reg(0, 2), iota_reg(2, 2));
    // Output register gains only the defined flag (wire 3).
    for (size_t i = 0; i < out.dim(); ++i) {
        bool flag = (i >> 3) & 1;
        bool outbit = (i >> 2) & 1;
        if (std::norm(out.amp(i)) > 1e-18) {
            CHECK(flag);
            CHECK_FALSE(outbit);
        }
    }
    CHECK(out.norm() == Catch::Approx(1.0).margin(1e-9));

    // Classical input: measuring the output gives C(v0) with probability 1.
    circ::BoolCircuit x0r = circ::xor_all_circuit(3);
    BitVec v0 = BitVec::from_string("110");
    StateVector cls = StateVector::basis(5, concat(v0, BitVec::from_string("00")));
    StateVector ev = apply_classical(cls, fn_of(x0r), 1, iota_reg(0, 3), iota_reg(3, 2));
    Rng mrng(1);
    auto mo = measure(ev, {3}, mrng);
    CHECK(mo.probability == Catch::Approx(1.0).margin(1e-12));
    CHECK(mo.value == BitVec::from_string("0"));  // 1 xor 1 xor 0

    // Strict mode rejects dirty output registers.
    StateVector dirty = StateVector::basis(5, BitVec::from_string("00010"));
    CHECK_THROWS_AS(apply_classical(dirty, fn_of(x0r), 1, iota_reg(0, 3), iota_reg(3, 2)),
                    std::invalid_argument);
}

TEST_CASE("membership check accepts a coset superposition with certainty") {
    Rng rng(26);
    for (int trial = 0; trial < 10; ++trial) {
        gf2::CosetPair cp = gf2::sample_coset_pair(4, 2, rng);
        StateVector st = prepare_coset_state(cp);
        circ::BoolCircuit chk = circ::coset_membership_circuit(cp.space, cp.shift_primary);
        // Widen with an output register (1 value bit + flag).
        StateVector wide = product(st, StateVector(2));
        StateVector ev = apply_classical(wide, fn_of(chk), 1, iota_reg(0, 4), iota_reg(4, 2));
        auto mo = measure(ev, {4}, rng);
        CHECK(mo.value == BitVec::from_string("1"));
        CHECK(mo.probability == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("measure: classical states, frequencies, and marginal sums") {
    Rng rng(27);

    StateVector basis = StateVector::basis(3, BitVec::from_string("101"));
    auto mo = measure(basis, iota_reg(0, 3), rng);
    CHECK(mo.value == BitVec::from_string("101"));
    CHECK(mo.probability == Catch::Approx(1.0).margin(1e-12));
    CHECK(fidelity(mo.post_state, basis) == Catch::Approx(1.0).margin(1e-12));

    StateVector uniform(2);
    uniform.hadamard(0);
    uniform.hadamard(1);
    std::map<uint64_t, int> counts;
    for (int i = 0; i < 20000; ++i) {
        auto m = measure(uniform, iota_reg(0, 2), rng);
        counts[m.value.to_u64()]++;
    }
    REQUIRE(counts.size() == 4);
    for (const auto& [v, c] : counts) CHECK(double(c) / 20000 == Catch::Approx(0.25).margin(0.02));

    // Probabilities over any register sum to 1.
    StateVector rnd(4);
    for (uint32_t q = 0; q < 4; ++q) rnd.hadamard(q);
    auto m2 = measure(rnd, {1, 3}, rng);
    CHECK(m2.post_state.norm() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("measuring one register leaves the other register's marginals intact") {
    Rng rng(28);
    // Product state: measuring qubits {0,1} must not shift outcome
    // frequencies on {2,3}.
    gf2::CosetPair cp = gf2::sample_coset_pair(2, 1, rng);
    StateVector left = prepare_coset_state(cp);
    StateVector right(2);
    right.hadamard(0);
    StateVector st = product(left, right);

    std::map<uint64_t, int> direct, after;
    const int kTrials = 4000;
    for (int i = 0; i < kTrials; ++i) {
        auto m = measure(st, {2, 3}, rng);
        direct[m.value.to_u64()]++;
        auto pre = measure(st, {0, 1}, rng);
        auto m2 = measure(pre.post_state, {2, 3}, rng);
        after[m2.value.to_u64()]++;
    }
    for (const auto& [v, c] : direct)
        CHECK(double(after[v]) / kTrials == Catch::Approx(double(c) / kTrials).margin(0.05));
}

TEST_CASE("norm is preserved under long random op sequences") {
    Rng rng(29);
    StateVector st(6);
    for (uint32_t q = 0; q < 3; ++q) st.hadamard(q);
    circ::BoolCircuit xr = circ::xor_all_circuit(3);
    for (int op = 0; op < 100; ++op) {
        if (rng.bit()) {
            st.hadamard(uint32_t(rng.range(4)));
        } else {
            // Uncomputed scratch: XOR into qubits 4..5 then XOR back.
            StateVector tmp = apply_classical(st, fn_of(xr), 1, iota_reg(0, 3), iota_reg(4, 2), false);
            st = apply_classical(tmp, fn_of(xr), 1, iota_reg(0, 3), iota_reg(4, 2), false);
        }
        REQUIRE(std::abs(st.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("fidelity basics") {
    StateVector a = StateVector::basis(2, BitVec::from_string("01"));
    StateVector b = StateVector::basis(2, BitVec::from_string("10"));
    CHECK(fidelity(a, a) == Catch::Approx(1.0));
    CHECK(fidelity(a, b) == Catch::Approx(0.0).margin(1e-15));
    CHECK_THROWS_AS(fidelity(a, StateVector(3)), std::invalid_argument);
}

TEST_CASE("measure_function agrees with explicit output-register route") {
    Rng rng(30);
    for (int trial = 0; trial < 20; ++trial) {
        gf2::CosetPair cp = gf2::sample_coset_pair(3, 1 + rng.range(2), rng);
        StateVector st = prepare_coset_state(cp);
        circ::BoolCircuit chk = circ::coset_membership_circuit(cp.space, rng.bitvec(3));

        // Route A: grouped measurement without materializing output qubits.
        Rng ra(1000 + trial);
        auto fm = measure_function(st, fn_of(chk), 1, iota_reg(0, 3), ra);

        // Route B: explicit ancilla register, apply, measure, discard.
        Rng rb(1000 + trial);
        StateVector wide = product(st, StateVector(2));
        StateVector ev = apply_classical(wide, fn_of(chk), 1, iota_reg(0, 3), iota_reg(3, 2));
        auto mo = measure(ev, {3, 4}, rb);

        auto enc = encode_output(fm.value, 1);
        CHECK(enc == mo.value);
        CHECK(fm.probability == Catch::Approx(mo.probability).margin(1e-12));
        // Post states agree on the surviving input-register slice.
        for (size_t i = 0; i < fm.post_state.dim(); ++i) {
            size_t wide_idx = i | (size_t(mo.value.get(0)) << 3) | (size_t(mo.value.get(1)) << 4);
            CHECK(std::abs(fm.post_state.amp(i) - mo.post_state.amp(wide_idx)) < 1e-9);
        }
    }
}

TEST_CASE("qubit cap is enforced") {
    CHECK_THROWS_AS(StateVector(23), std::invalid_argument);
}
