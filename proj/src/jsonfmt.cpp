#include "fixsim/jsonfmt.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fixsim {

std::string fmt_g9(double v) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument("fmt_g9: non-finite value");
    }
    if (v == 0.0) {
        return "0";  // fold -0 into 0
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

void JsonWriter::comma() {
    if (need_comma_) {
        out_ += ',';
    }
    need_comma_ = false;
}

JsonWriter& JsonWriter::begin_object() {
    comma();
    out_ += '{';
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    comma();
    out_ += '[';
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
    comma();
    out_ += '"';
    out_ += json_escape(k);
    out_ += "\":";
    return *this;
}

JsonWriter& JsonWriter::value_str(std::string_view v) {
    comma();
    out_ += '"';
    out_ += json_escape(v);
    out_ += '"';
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value_num(double v) {
    comma();
    out_ += fmt_g9(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value_int(int64_t v) {
    comma();
    out_ += std::to_string(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value_uint(uint64_t v) {
    comma();
    out_ += std::to_string(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value_bool(bool v) {
    comma();
    out_ += v ? "true" : "false";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value_null() {
    comma();
    out_ += "null";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value_vec3(const Vec3& v) {
    begin_array();
    value_num(v.x);
    value_num(v.y);
    value_num(v.z);
    return end_array();
}

JsonWriter& JsonWriter::value_num_array(std::span<const double> vals) {
    begin_array();
    for (double v : vals) {
        value_num(v);
    }
    return end_array();
}

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string to_hex(uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace fixsim
