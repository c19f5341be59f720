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

#include <bit>
#include <cstdint>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucl {

/// Fixed-length vector over GF(2), word-packed.
///
/// Coordinate 0 is the most significant bit in serialized form (hex and
/// "01" strings read left to right starting at coordinate 0).
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(size_t len) : len_(len), words_((len + 63) / 64, 0) {}

    static BitVec from_bits(std::initializer_list<int> bits) {
        BitVec v(bits.size());
        size_t i = 0;
        for (int b : bits) v.set(i++, b != 0);
        return v;
    }

    /// Parses "0101..."; character k is coordinate k.
    static BitVec from_string(const std::string& s) {
        BitVec v(s.size());
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("BitVec: bad bit char");
            v.set(i, s[i] == '1');
        }
        return v;
    }

    /// Coordinate i takes bit i of x (x's LSB is coordinate 0).
    static BitVec from_u64(size_t len, uint64_t x) {
        if (len > 64) throw std::invalid_argument("BitVec::from_u64: len > 64");
        BitVec v(len);
        if (len) {
            v.words_[0] = len == 64 ? x : (x & ((uint64_t(1) << len) - 1));
        }
        return v;
    }

    size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool get(size_t i) const {
        check_index(i);
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    void set(size_t i, bool b) {
        check_index(i);
        uint64_t mask = uint64_t(1) << (i & 63);
        if (b)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void flip(size_t i) { set(i, !get(i)); }

    BitVec& operator^=(const BitVec& o) {
        check_same(o);
        for (size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
        return *this;
    }

    BitVec operator^(const BitVec& o) const {
        BitVec r = *this;
        r ^= o;
        return r;
    }

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.len_ == b.len_ && a.words_ == b.words_;
    }

    friend bool operator<(const BitVec& a, const BitVec& b) {
        if (a.len_ != b.len_) return a.len_ < b.len_;
        return a.words_ < b.words_;
    }

    /// GF(2) inner product (parity of coordinate-wise AND).
    bool dot(const BitVec& o) const {
        check_same(o);
        uint64_t acc = 0;
        for (size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & o.words_[w];
        return std::popcount(acc) & 1;
    }

    bool is_zero() const {
        for (uint64_t w : words_)
            if (w) return false;
        return true;
    }

    size_t popcount() const {
        size_t c = 0;
        for (uint64_t w : words_) c += std::popcount(w);
        return c;
    }

    /// Index of the first set coordinate, or size() if zero.
    size_t leading() const {
        for (size_t w = 0; w < words_.size(); ++w)
            if (words_[w]) return (w << 6) + std::countr_zero(words_[w]);
        return len_;
    }

    BitVec slice(size_t pos, size_t n) const {
        if (pos + n > len_) throw std::out_of_range("BitVec::slice");
        BitVec r(n);
        for (size_t i = 0; i < n; ++i) r.set(i, get(pos + i));
        return r;
    }

    uint64_t to_u64() const {
        if (len_ > 64) throw std::invalid_argument("BitVec::to_u64: len > 64");
        return words_.empty() ? 0 : words_[0];
    }

    std::string to_string01() const {
        std::string s(len_, '0');
        for (size_t i = 0; i < len_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    /// Hex serialization: coordinate 0 is the MSB of the first byte; the
    /// final partial byte, if any, is zero-padded in its low bits.
    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string s;
        size_t nbytes = (len_ + 7) / 8;
        s.reserve(2 * nbytes);
        for (size_t b = 0; b < nbytes; ++b) {
            uint8_t byte = 0;
            for (size_t k = 0; k < 8; ++k) {
                size_t i = 8 * b + k;
                if (i < len_ && get(i)) byte |= uint8_t(0x80 >> k);
            }
            s.push_back(digits[byte >> 4]);
            s.push_back(digits[byte & 15]);
        }
        return s;
    }

    static BitVec from_hex(size_t len, const std::string& hex) {
        size_t nbytes = (len + 7) / 8;
        if (hex.size() != 2 * nbytes) throw std::invalid_argument("BitVec::from_hex: length mismatch");
        BitVec v(len);
        for (size_t i = 0; i < len; ++i) {
            size_t b = i / 8, k = i % 8;
            uint8_t byte = uint8_t(hex_nibble(hex[2 * b]) << 4 | hex_nibble(hex[2 * b + 1]));
            v.set(i, (byte >> (7 - k)) & 1);
        }
        return v;
    }

    /// Packed bytes, same bit order as to_hex.
    std::vector<uint8_t> to_bytes() const {
        std::vector<uint8_t> out((len_ + 7) / 8, 0);
        for (size_t i = 0; i < len_; ++i)
            if (get(i)) out[i / 8] |= uint8_t(0x80 >> (i % 8));
        return out;
    }

    static BitVec from_bytes(size_t len, const std::vector<uint8_t>& bytes) {
        if (bytes.size() < (len + 7) / 8) throw std::invalid_argument("BitVec::from_bytes: short buffer");
        BitVec v(len);
        for (size_t i = 0; i < len; ++i) v.set(i, (bytes[i / 8] >> (7 - i % 8)) & 1);
        return v;
    }

    size_t hash() const {
        size_t h = len_;
        for (uint64_t w : words_) h = h * 0x9e3779b97f4a7c15ULL + w;
        return h;
    }

  private:
    static uint8_t hex_nibble(char c) {
        if (c >= '0' && c <= '9') return uint8_t(c - '0');
        if (c >= 'a' && c <= 'f') return uint8_t(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return uint8_t(c - 'A' + 10);
        throw std::invalid_argument("BitVec: bad hex digit");
    }

    void check_index(size_t i) const {
        if (i >= len_) throw std::out_of_range("BitVec: index out of range");
    }

    void check_same(const BitVec& o) const {
        if (len_ != o.len_) throw std::invalid_argument("BitVec: dimension mismatch");
    }

    size_t len_ = 0;
    std::vector<uint64_t> words_;
};

inline BitVec concat(const BitVec& a, const BitVec& b) {
    BitVec r(a.size() + b.size());
    for (size_t i = 0; i < a.size(); ++i) r.set(i, a.get(i));
    for (size_t i = 0; i < b.size(); ++i) r.set(a.size() + i, b.get(i));
    return r;
}

inline BitVec concat(const BitVec& a, const BitVec& b, const BitVec& c) {
    return concat(concat(a, b), c);
}

/// Undefined-output ("bot") encoding over m+1 wires: value bits followed by
/// a trailing "defined" flag. Undefined = all-ones value with flag 0.
inline BitVec encode_output(const std::optional<BitVec>& y, size_t m) {
    BitVec out(m + 1);
    if (y) {
        if (y->size() != m) throw std::invalid_argument("encode_output: output length mismatch");
        for (size_t i = 0; i < m; ++i) out.set(i, y->get(i));
        out.set(m, true);
    } else {
        for (size_t i = 0; i < m; ++i) out.set(i, true);
    }
    return out;
}

inline std::optional<BitVec> decode_output(const BitVec& enc) {
    if (enc.size() == 0) throw std::invalid_argument("decode_output: empty");
    size_t m = enc.size() - 1;
    if (!enc.get(m)) return std::nullopt;
    return enc.slice(0, m);
}

/// MSB-first bit stream writer used by the circuit byte encoding.
class BitWriter {
  public:
    void put(bool b) { bits_.push_back(b); }

    void put_uint(uint64_t v, size_t nbits) {
        for (size_t i = 0; i < nbits; ++i) put((v >> (nbits - 1 - i)) & 1);
    }

    void put_bitvec(const BitVec& v) {
        for (size_t i = 0; i < v.size(); ++i) put(v.get(i));
    }

    size_t size() const { return bits_.size(); }

    /// Zero-pads to exactly `total_bits`; throws if already longer.
    BitVec finish(size_t total_bits) const {
        if (bits_.size() > total_bits) throw std::length_error("BitWriter: encoding overflow");
        BitVec out(total_bits);
        for (size_t i = 0; i < bits_.size(); ++i) out.set(i, bits_[i]);
        return out;
    }

    BitVec finish() const { return finish(bits_.size()); }

  private:
    std::vector<bool> bits_;
};

class BitReader {
  public:
    explicit BitReader(const BitVec& v) : v_(v) {}

    bool get() {
        if (pos_ >= v_.size()) throw std::out_of_range("BitReader: past end");
        return v_.get(pos_++);
    }

    uint64_t get_uint(size_t nbits) {
        uint64_t r = 0;
        for (size_t i = 0; i < nbits; ++i) r = (r << 1) | uint64_t(get());
        return r;
    }

    BitVec get_bitvec(size_t n) {
        BitVec r(n);
        for (size_t i = 0; i < n; ++i) r.set(i, get());
        return r;
    }

    size_t remaining() const { return v_.size() - pos_; }

  private:
    const BitVec& v_;
    size_t pos_ = 0;
};

}  // namespace ucl

template <>
struct std::hash<ucl::BitVec> {
    size_t operator()(const ucl::BitVec& v) const { return v.hash(); }
};
