// Copyright (c) 2026 The lowlight Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace lowlight {

/// Prints a double with 17 significant digits; enough to reparse the exact
/// bit pattern, which manifests rely on for replay.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Minimal streaming JSON writer with a fixed, caller-controlled field order
/// and byte-stable float formatting. Output files must not depend on library
/// versions or hash orderings, so serialization is hand-rolled; parsing uses
/// a real JSON library.
class JsonWriter {
public:
    explicit JsonWriter(int indent = 2) : indent_(indent) {
        has_elems_.push_back(false);
    }

    void begin_object() { begin_container('{', nullptr); }
    void begin_object(const std::string& key) { begin_container('{', &key); }
    void begin_array() { begin_container('[', nullptr); }
    void begin_array(const std::string& key) { begin_container('[', &key); }
    void end_object() { end_container('}'); }
    void end_array() { end_container(']'); }

    void field(const std::string& key, const std::string& v) {
        write_key(key);
        out_ += quote(v);
    }
    void field(const std::string& key, const char* v) {
        field(key, std::string(v));
    }
    void field(const std::string& key, double v) {
        write_key(key);
        out_ += format_double(v);
    }
    void field(const std::string& key, bool v) {
        write_key(key);
        out_ += v ? "true" : "false";
    }
    void field(const std::string& key, std::int64_t v) {
        write_key(key);
        out_ += std::to_string(v);
    }
    void field(const std::string& key, std::uint64_t v) {
        write_key(key);
        out_ += std::to_string(v);
    }

    /// Bare string element inside an array.
    void value(const std::string& v) {
        prefix();
        out_ += quote(v);
    }

    std::string str() const { return out_ + "\n"; }

private:
    static std::string quote(const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            switch (c) {
            case '"': q += "\\\""; break;
            case '\\': q += "\\\\"; break;
            case '\n': q += "\\n"; break;
            case '\r': q += "\\r"; break;
            case '\t': q += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    q += buf;
                } else {
                    q += c;
                }
            }
        }
        q += '"';
        return q;
    }

    // Comma/newline/indent before a new element at the current depth.
    void prefix() {
        if (has_elems_.back()) out_ += ',';
        has_elems_.back() = true;
        if (depth_ > 0) {
            out_ += '\n';
            out_.append(static_cast<std::size_t>(depth_) * indent_, ' ');
        }
    }

    void write_key(const std::string& key) {
        prefix();
        out_ += quote(key);
        out_ += ": ";
    }

    void begin_container(char c, const std::string* key) {
        if (key)
            write_key(*key);
        else
            prefix();
        out_ += c;
        ++depth_;
        has_elems_.push_back(false);
    }

    void end_container(char c) {
        const bool had_elems = has_elems_.back();
        has_elems_.pop_back();
        --depth_;
        if (had_elems) {
            out_ += '\n';
            out_.append(static_cast<std::size_t>(depth_) * indent_, ' ');
        }
        out_ += c;
    }

    int indent_;
    int depth_ = 0;
    std::vector<bool> has_elems_;
    std::string out_;
};

} // namespace lowlight
