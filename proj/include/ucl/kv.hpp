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

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucl::kv {

/// Line-delimited key=value serializer. Values are restricted to
/// characters that never need escaping (hex, digits, names, ':', '.',
/// '_', '-', ','). Emission order is the writer call order, so a fixed
/// writing sequence yields byte-identical output.
class Writer {
  public:
    void put(const std::string& key, const std::string& value) {
        for (char ch : value)
            if (ch == '\n' || ch == '=') throw std::invalid_argument("kv: bad value char");
        out_ += key;
        out_ += '=';
        out_ += value;
        out_ += '\n';
    }

    void put_u64(const std::string& key, uint64_t v) { put(key, std::to_string(v)); }

    void put_bytes(const std::string& key, const std::vector<uint8_t>& bytes) {
        static const char* digits = "0123456789abcdef";
        std::string hex;
        hex.reserve(2 * bytes.size());
        for (uint8_t b : bytes) {
            hex.push_back(digits[b >> 4]);
            hex.push_back(digits[b & 15]);
        }
        put(key, hex);
    }

    const std::string& str() const { return out_; }

    std::vector<uint8_t> bytes() const { return {out_.begin(), out_.end()}; }

  private:
    std::string out_;
};

class Reader {
  public:
    explicit Reader(const std::string& text) { parse(text); }
    explicit Reader(const std::vector<uint8_t>& bytes) { parse(std::string(bytes.begin(), bytes.end())); }

    bool has(const std::string& key) const { return fields_.count(key) != 0; }

    const std::string& get(const std::string& key) const {
        auto it = fields_.find(key);
        if (it == fields_.end()) throw std::invalid_argument("kv: missing key " + key);
        return it->second;
    }

    uint64_t get_u64(const std::string& key) const { return std::stoull(get(key)); }

    std::vector<uint8_t> get_bytes(const std::string& key) const {
        const std::string& hex = get(key);
        if (hex.size() % 2) throw std::invalid_argument("kv: odd hex length");
        std::vector<uint8_t> out(hex.size() / 2);
        for (size_t i = 0; i < out.size(); ++i)
            out[i] = uint8_t(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
        return out;
    }

  private:
    static uint8_t nibble(char c) {
        if (c >= '0' && c <= '9') return uint8_t(c - '0');
        if (c >= 'a' && c <= 'f') return uint8_t(c - 'a' + 10);
        throw std::invalid_argument("kv: bad hex digit");
    }

    void parse(const std::string& text) {
        size_t pos = 0;
        while (pos < text.size()) {
            size_t nl = text.find('\n', pos);
            if (nl == std::string::npos) nl = text.size();
            std::string line = text.substr(pos, nl - pos);
            pos = nl + 1;
            if (line.empty() || line[0] == '#') continue;
            size_t eq = line.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("kv: malformed line");
            fields_[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }

    std::map<std::string, std::string> fields_;
};

}  // namespace ucl::kv
