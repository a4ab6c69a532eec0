/* Copyright 2026 the sdm authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sdm {

#define SDM_VERSION "1.0.0"

/// Base class for all errors thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments, malformed configs, violated preconditions.
class validation_error : public error {
public:
    using error::error;
};

/// Requested an operation a kernel kind does not support.
class unsupported_kernel : public validation_error {
public:
    using validation_error::validation_error;
};

/// Numerical failure at runtime (non-finite values, unstable stencils).
class numeric_error : public error {
public:
    using error::error;
};

/// File and stream failures.
class io_error : public error {
public:
    using error::error;
};

/// Fixed-order pairwise (tree) summation. The reduction order depends only
/// on n, so results are bit-stable across runs and independent of any
/// worker partitioning upstream.
inline double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 32) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_mean(const double* data, std::size_t n) {
    return n == 0 ? 0.0 : pairwise_sum(data, n) / static_cast<double>(n);
}

/// Shortest round-trippable decimal form (17 significant digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// --- little-endian binary I/O -------------------------------------------

inline void write_u8(std::ostream& os, std::uint8_t v) {
    os.put(static_cast<char>(v));
}

inline void write_u32le(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(b, 4);
}

inline void write_u64le(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(b, 8);
}

inline void write_f64le(std::ostream& os, double v) {
    write_u64le(os, std::bit_cast<std::uint64_t>(v));
}

inline std::uint8_t read_u8(std::istream& is) {
    int c = is.get();
    if (c == EOF) throw io_error("unexpected end of stream");
    return static_cast<std::uint8_t>(c);
}

inline std::uint32_t read_u32le(std::istream& is) {
    char b[4];
    if (!is.read(b, 4)) throw io_error("unexpected end of stream");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
}

inline std::uint64_t read_u64le(std::istream& is) {
    char b[8];
    if (!is.read(b, 8)) throw io_error("unexpected end of stream");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
}

inline double read_f64le(std::istream& is) {
    return std::bit_cast<double>(read_u64le(is));
}

// --- flat key=value config text ------------------------------------------

struct KvEntry {
    std::string key;
    std::string value;
    int line = 0;
};

inline std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

/// Parses `key=value` lines. Blank lines and `#` comments are skipped.
/// Duplicate keys are preserved in order (later entries win downstream).
inline std::vector<KvEntry> parse_kv_text(std::string_view text) {
    std::vector<KvEntry> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        ++line_no;
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;

        auto stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string_view::npos)
            throw validation_error("config line " + std::to_string(line_no) +
                                   ": expected key=value, got '" + std::string(stripped) + "'");
        KvEntry e;
        e.key = std::string(trim(stripped.substr(0, eq)));
        e.value = std::string(trim(stripped.substr(eq + 1)));
        e.line = line_no;
        if (e.key.empty())
            throw validation_error("config line " + std::to_string(line_no) + ": empty key");
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace sdm
