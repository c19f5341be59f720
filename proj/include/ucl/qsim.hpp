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

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ucl/bits.hpp"
#include "ucl/gf2.hpp"
#include "ucl/rng.hpp"

namespace ucl::qsim {

using cplx = std::complex<double>;

/// Hard ceiling on simulator width (~4M double-precision amplitudes).
constexpr size_t kMaxQubits = 22;

/// Classical function evaluated in superposition: total on its input
/// register; nullopt encodes the reserved "undefined" output.
using ClassicalFn = std::function<std::optional<BitVec>(const BitVec&)>;

/// Dense statevector over `num_qubits` qubits. Basis index bit q (LSB
/// ordering) is the value of qubit q. Value type: operations below return
/// fresh states.
class StateVector {
  public:
    StateVector() = default;

    explicit StateVector(size_t num_qubits) : nq_(num_qubits) {
        check_width(num_qubits);
        amps_.assign(size_t(1) << nq_, cplx(0, 0));
        amps_[0] = 1.0;
    }

    static StateVector basis(size_t num_qubits, const BitVec& bits) {
        if (bits.size() != num_qubits) throw std::invalid_argument("StateVector::basis: length mismatch");
        StateVector s(num_qubits);
        s.amps_[0] = 0.0;
        s.amps_[bits.to_u64()] = 1.0;
        return s;
    }

    size_t num_qubits() const { return nq_; }
    size_t dim() const { return amps_.size(); }
    const cplx& amp(size_t idx) const { return amps_[idx]; }
    cplx& amp(size_t idx) { return amps_[idx]; }

    double norm() const {
        double s = 0;
        for (const cplx& a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

    /// In-place single-qubit Hadamard.
    void hadamard(size_t q) {
        if (q >= nq_) throw std::out_of_range("hadamard: qubit out of range");
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        size_t bit = size_t(1) << q;
        for (size_t idx = 0; idx < amps_.size(); ++idx) {
            if (idx & bit) continue;
            cplx a0 = amps_[idx];
            cplx a1 = amps_[idx | bit];
            amps_[idx] = (a0 + a1) * inv_sqrt2;
            amps_[idx | bit] = (a0 - a1) * inv_sqrt2;
        }
    }

    void hadamard(const std::vector<uint32_t>& qubits) {
        for (uint32_t q : qubits) hadamard(q);
    }

    BitVec extract(size_t idx, const std::vector<uint32_t>& reg) const {
        BitVec v(reg.size());
        for (size_t i = 0; i < reg.size(); ++i) v.set(i, (idx >> reg[i]) & 1);
        return v;
    }

    void dump(std::ostream& os) const {
        for (size_t i = 0; i < amps_.size(); ++i)
            if (std::norm(amps_[i]) > 1e-24)
                os << i << " " << amps_[i].real() << " " << amps_[i].imag() << "\n";
    }

  private:
    static void check_width(size_t nq) {
        if (nq > kMaxQubits) throw std::invalid_argument("StateVector: qubit cap exceeded");
    }

    size_t nq_ = 0;
    std::vector<cplx> amps_;
};

/// Named registers mapping to disjoint ordered qubit index lists.
class RegisterMap {
  public:
    void add(const std::string& name, std::vector<uint32_t> qubits, size_t num_qubits) {
        for (uint32_t q : qubits) {
            if (q >= num_qubits) throw std::invalid_argument("RegisterMap: qubit out of range");
            if (used_.count(q)) throw std::invalid_argument("RegisterMap: qubit assigned twice");
        }
        for (uint32_t q : qubits) used_.insert({q, name});
        regs_[name] = std::move(qubits);
    }

    const std::vector<uint32_t>& at(const std::string& name) const {
        auto it = regs_.find(name);
        if (it == regs_.end()) throw std::invalid_argument("RegisterMap: no register " + name);
        return it->second;
    }

    bool has(const std::string& name) const { return regs_.count(name) != 0; }
    const std::map<std::string, std::vector<uint32_t>>& all() const { return regs_; }

  private:
    std::map<std::string, std::vector<uint32_t>> regs_;
    std::map<uint32_t, std::string> used_;
};

struct MeasurementOutcome {
    BitVec value;
    double probability = 0;
    StateVector post_state;
};

/// |A_{s,s'}> = |A|^{-1/2} sum_{a in A} (-1)^{<s',a>} |a xor s>.
/// This phase convention makes H-all map it exactly onto the dual coset
/// state |A-perp_{s',s}| (up to global phase).
inline StateVector prepare_coset_state(const gf2::CosetPair& cp) {
    size_t n = cp.space.ambient_dim();
    if (n > kMaxQubits) throw std::invalid_argument("prepare_coset_state: cap exceeded");
    StateVector st(n);
    st.amp(0) = 0.0;
    double scale = 1.0 / std::sqrt(double(size_t(1) << cp.space.dim()));
    BitVec zero(n);
    for (const BitVec& a : gf2::enumerate_coset(cp.space, zero)) {
        double phase = cp.shift_dual.dot(a) ? -1.0 : 1.0;
        st.amp((a ^ cp.shift_primary).to_u64()) = phase * scale;
    }
    return st;
}

/// Tensor product; `a` occupies the low qubit indices.
inline StateVector product(const StateVector& a, const StateVector& b) {
    if (a.num_qubits() + b.num_qubits() > kMaxQubits)
        throw std::invalid_argument("product: qubit cap exceeded");
    StateVector out(a.num_qubits() + b.num_qubits());
    for (size_t ib = 0; ib < b.dim(); ++ib) {
        for (size_t ia = 0; ia < a.dim(); ++ia)
            out.amp((ib << a.num_qubits()) | ia) = a.amp(ia) * b.amp(ib);
    }
    return out;
}

/// Applies H^{tensor n} to each block whose mask bit is 1.
inline StateVector hadamard_blocks(const StateVector& st,
                                   const std::vector<std::vector<uint32_t>>& blocks,
                                   const BitVec& mask) {
    if (mask.size() != blocks.size()) throw std::invalid_argument("hadamard_blocks: register/mask mismatch");
    StateVector out = st;
    for (size_t i = 0; i < blocks.size(); ++i)
        if (mask.get(i)) out.hadamard(blocks[i]);
    return out;
}

/// Basis map |v>|w> -> |v>|w xor f(v)>, extended linearly. The output
/// register spans output_len(f)+1 qubits (value plus defined flag).
/// strict: reject states whose output register is not |0...0>.
inline StateVector apply_classical(const StateVector& st, const ClassicalFn& fn, size_t fn_out_len,
                                   const std::vector<uint32_t>& input_reg,
                                   const std::vector<uint32_t>& output_reg, bool strict = true) {
    if (output_reg.size() != fn_out_len + 1)
        throw std::invalid_argument("apply_classical: output register arity mismatch");
    StateVector out(st.num_qubits());
    out.amp(0) = 0.0;
    for (size_t idx = 0; idx < st.dim(); ++idx) {
        cplx a = st.amp(idx);
        if (std::norm(a) < 1e-30) continue;
        if (strict) {
            for (uint32_t q : output_reg)
                if ((idx >> q) & 1)
                    throw std::invalid_argument("apply_classical: output register not initialized to |0>");
        }
        BitVec v = st.extract(idx, input_reg);
        BitVec enc = encode_output(fn(v), fn_out_len);
        size_t jdx = idx;
        for (size_t i = 0; i < output_reg.size(); ++i)
            if (enc.get(i)) jdx ^= size_t(1) << output_reg[i];
        out.amp(jdx) += a;
    }
    return out;
}

/// Born-rule measurement of a register in the computational basis.
inline MeasurementOutcome measure(const StateVector& st, const std::vector<uint32_t>& reg, Rng& rng) {
    std::map<BitVec, double> probs;
    for (size_t idx = 0; idx < st.dim(); ++idx) {
        double p = std::norm(st.amp(idx));
        if (p > 0) probs[st.extract(idx, reg)] += p;
    }
    double draw = rng.real();
    double acc = 0;
    BitVec chosen;
    double p_chosen = 0;
    for (const auto& [val, p] : probs) {
        acc += p;
        chosen = val;
        p_chosen = p;
        if (draw < acc) break;
    }
    StateVector post(st.num_qubits());
    post.amp(0) = 0.0;
    double renorm = 1.0 / std::sqrt(p_chosen);
    for (size_t idx = 0; idx < st.dim(); ++idx) {
        if (std::norm(st.amp(idx)) == 0) continue;
        if (st.extract(idx, reg) == chosen) post.amp(idx) = st.amp(idx) * renorm;
    }
    return MeasurementOutcome{chosen, p_chosen, std::move(post)};
}

/// Runs `fn` on the input register in superposition against a fresh |0>
/// output register, measures the output, and discards it. Mathematically
/// identical to apply_classical followed by measure of the output register,
/// without materializing the extra qubits.
struct FnMeasurement {
    std::optional<BitVec> value;
    double probability = 0;
    StateVector post_state;
};

inline FnMeasurement measure_function(const StateVector& st, const ClassicalFn& fn, size_t fn_out_len,
                                      const std::vector<uint32_t>& input_reg, Rng& rng) {
    std::map<BitVec, double> probs;  // keyed by encoded output
    std::vector<BitVec> enc_by_idx(st.dim());
    std::vector<bool> live(st.dim(), false);
    std::map<BitVec, BitVec> cache;
    for (size_t idx = 0; idx < st.dim(); ++idx) {
        double p = std::norm(st.amp(idx));
        if (p == 0) continue;
        BitVec v = st.extract(idx, input_reg);
        auto it = cache.find(v);
        if (it == cache.end()) it = cache.emplace(v, encode_output(fn(v), fn_out_len)).first;
        enc_by_idx[idx] = it->second;
        live[idx] = true;
        probs[it->second] += p;
    }
    double draw = rng.real();
    double acc = 0;
    BitVec chosen;
    double p_chosen = 0;
    for (const auto& [val, p] : probs) {
        acc += p;
        chosen = val;
        p_chosen = p;
        if (draw < acc) break;
    }
    StateVector post(st.num_qubits());
    post.amp(0) = 0.0;
    double renorm = 1.0 / std::sqrt(p_chosen);
    for (size_t idx = 0; idx < st.dim(); ++idx)
        if (live[idx] && enc_by_idx[idx] == chosen) post.amp(idx) = st.amp(idx) * renorm;
    return FnMeasurement{decode_output(chosen), p_chosen, std::move(post)};
}

/// |<a|b>|^2.
inline double fidelity(const StateVector& a, const StateVector& b) {
    if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("fidelity: size mismatch");
    cplx ip(0, 0);
    for (size_t i = 0; i < a.dim(); ++i) ip += std::conj(a.amp(i)) * b.amp(i);
    return std::norm(ip);
}

}  // namespace ucl::qsim
