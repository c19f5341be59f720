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
#include <sstream>
#include <vector>

#include "ucl/bits.hpp"
#include "ucl/rng.hpp"

namespace ucl::gf2 {

/// Linear subspace of F_2^n held as a reduced row-echelon basis.
///
/// The RREF basis is canonical: two Subspace values describe the same
/// subspace iff they compare equal bit for bit. Rows are ordered by pivot.
class Subspace {
  public:
    Subspace() = default;
    explicit Subspace(size_t ambient) : ambient_(ambient) {}

    size_t ambient_dim() const { return ambient_; }
    size_t dim() const { return basis_.size(); }
    const std::vector<BitVec>& basis() const { return basis_; }
    const std::vector<size_t>& pivots() const { return pivots_; }

    bool contains(const BitVec& v) const {
        if (v.size() != ambient_) throw std::invalid_argument("Subspace::contains: dimension mismatch");
        return reduce(v).is_zero();
    }

    /// Canonical coset representative: the unique element of v + span
    /// whose pivot coordinates are all zero.
    BitVec reduce(BitVec v) const {
        if (v.size() != ambient_) throw std::invalid_argument("Subspace::reduce: dimension mismatch");
        for (size_t i = 0; i < basis_.size(); ++i)
            if (v.get(pivots_[i])) v ^= basis_[i];
        return v;
    }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
    }

    std::string to_hex() const {
        std::ostringstream os;
        os << ambient_ << ":" << dim() << ":";
        for (const auto& row : basis_) os << row.to_hex();
        return os.str();
    }

    static Subspace from_hex(const std::string& s);

    /// Builds from rows already known to be RREF (internal).
    static Subspace from_rref_rows(size_t ambient, std::vector<BitVec> rows) {
        Subspace sp(ambient);
        sp.basis_ = std::move(rows);
        for (const auto& r : sp.basis_) sp.pivots_.push_back(r.leading());
        return sp;
    }

  private:
    size_t ambient_ = 0;
    std::vector<BitVec> basis_;
    std::vector<size_t> pivots_;
};

/// Gaussian elimination to reduced row-echelon form. Idempotent; the result
/// spans the same space as the input rows.
inline Subspace rref(size_t ambient_dim, std::vector<BitVec> rows) {
    for (const auto& r : rows)
        if (r.size() != ambient_dim) throw std::invalid_argument("rref: dimension mismatch among rows");

    std::vector<BitVec> basis;
    for (BitVec v : rows) {
        for (const auto& b : basis) {
            size_t p = b.leading();
            if (v.get(p)) v ^= b;
        }
        if (!v.is_zero()) basis.push_back(v);
    }
    // Back-substitute so every pivot column is zero outside its own row.
    std::sort(basis.begin(), basis.end(),
              [](const BitVec& a, const BitVec& b) { return a.leading() < b.leading(); });
    for (size_t i = 0; i < basis.size(); ++i) {
        size_t p = basis[i].leading();
        for (size_t j = 0; j < i; ++j)
            if (basis[j].get(p)) basis[j] ^= basis[i];
    }
    return Subspace::from_rref_rows(ambient_dim, std::move(basis));
}

inline Subspace Subspace::from_hex(const std::string& s) {
    size_t c1 = s.find(':');
    size_t c2 = s.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("Subspace::from_hex: malformed");
    size_t ambient = std::stoul(s.substr(0, c1));
    size_t d = std::stoul(s.substr(c1 + 1, c2 - c1 - 1));
    size_t row_hex = 2 * ((ambient + 7) / 8);
    std::vector<BitVec> rows;
    for (size_t i = 0; i < d; ++i)
        rows.push_back(BitVec::from_hex(ambient, s.substr(c2 + 1 + i * row_hex, row_hex)));
    return rref(ambient, rows);
}

/// {w : <w,a> = 0 for all a in the space}. Involution on canonical bases;
/// dim(dual) = n - dim.
inline Subspace dual(const Subspace& a) {
    size_t n = a.ambient_dim();
    std::vector<bool> is_pivot(n, false);
    for (size_t p : a.pivots()) is_pivot[p] = true;

    std::vector<BitVec> rows;
    for (size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        BitVec w(n);
        w.set(f, true);
        for (size_t i = 0; i < a.dim(); ++i)
            if (a.basis()[i].get(f)) w.set(a.pivots()[i], true);
        rows.push_back(w);
    }
    return rref(n, std::move(rows));
}

/// Membership in the affine coset span + shift.
inline bool coset_contains(const Subspace& a, const BitVec& shift, const BitVec& v) {
    if (shift.size() != a.ambient_dim() || v.size() != a.ambient_dim())
        throw std::invalid_argument("coset_contains: dimension mismatch");
    return a.contains(v ^ shift);
}

/// All 2^dim coset elements. Brute-force oracle helper; dim capped at 20.
inline std::vector<BitVec> enumerate_coset(const Subspace& a, const BitVec& shift) {
    if (a.dim() > 20) throw std::invalid_argument("enumerate_coset: dimension cap exceeded");
    if (shift.size() != a.ambient_dim()) throw std::invalid_argument("enumerate_coset: dimension mismatch");
    std::vector<BitVec> out;
    out.reserve(size_t(1) << a.dim());
    for (uint64_t mask = 0; mask < (uint64_t(1) << a.dim()); ++mask) {
        BitVec v = shift;
        for (size_t i = 0; i < a.dim(); ++i)
            if ((mask >> i) & 1) v ^= a.basis()[i];
        out.push_back(v);
    }
    return out;
}

/// Uniformly random dim-dimensional subspace of F_2^n: rejection-sample
/// random dim x n matrices until full rank, then canonicalize.
inline Subspace sample_subspace(size_t n, size_t dim, Rng& rng) {
    if (dim > n) throw std::invalid_argument("sample_subspace: dim > n");
    if (dim == 0) return rref(n, {});
    while (true) {
        std::vector<BitVec> rows;
        rows.reserve(dim);
        for (size_t i = 0; i < dim; ++i) rows.push_back(rng.bitvec(n));
        Subspace s = rref(n, std::move(rows));
        if (s.dim() == dim) return s;
    }
}

/// Subspace A with primary shift s (coset A + s) and dual shift s'
/// (coset A-perp + s'). Shifts are stored canonically reduced so that
/// value equality coincides with equality of the underlying cosets.
struct CosetPair {
    Subspace space;
    BitVec shift_primary;
    BitVec shift_dual;

    friend bool operator==(const CosetPair&, const CosetPair&) = default;

    std::string to_hex() const {
        return space.to_hex() + ":" + shift_primary.to_hex() + ":" + shift_dual.to_hex();
    }

    static CosetPair from_hex(const std::string& s) {
        size_t c3 = s.rfind(':');
        size_t c2 = s.rfind(':', c3 - 1);
        Subspace sp = Subspace::from_hex(s.substr(0, c2));
        size_t n = sp.ambient_dim();
        BitVec sh = BitVec::from_hex(n, s.substr(c2 + 1, c3 - c2 - 1));
        BitVec shd = BitVec::from_hex(n, s.substr(c3 + 1));
        return make_coset_pair(sp, sh, shd);
    }

    static CosetPair make_coset_pair(const Subspace& space, const BitVec& s, const BitVec& s_dual) {
        return CosetPair{space, space.reduce(s), dual(space).reduce(s_dual)};
    }
};

inline CosetPair make_coset_pair(const Subspace& space, const BitVec& s, const BitVec& s_dual) {
    return CosetPair::make_coset_pair(space, s, s_dual);
}

inline CosetPair sample_coset_pair(size_t n, size_t dim, Rng& rng) {
    Subspace a = sample_subspace(n, dim, rng);
    return make_coset_pair(a, rng.bitvec(n), rng.bitvec(n));
}

}  // namespace ucl::gf2
