#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "fixsim/geometry.hpp"

namespace fixsim {

// Canonical float formatting for all dataset files: 9 significant digits,
// shortest form ("%.9g"). Serializing the same values always yields the same
// bytes, which is what the corpus determinism contract is checked against.
std::string fmt_g9(double v);

std::string json_escape(std::string_view s);

// Incremental writer for canonical JSON: caller controls key order, numbers
// go through fmt_g9. No whitespace is emitted.
class JsonWriter {
  public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view k);
    JsonWriter& value_str(std::string_view v);
    JsonWriter& value_num(double v);
    JsonWriter& value_int(int64_t v);
    JsonWriter& value_uint(uint64_t v);
    JsonWriter& value_bool(bool v);
    JsonWriter& value_null();
    JsonWriter& value_vec3(const Vec3& v);
    JsonWriter& value_num_array(std::span<const double> vals);

    const std::string& str() const { return out_; }
    std::string take() { return std::move(out_); }

  private:
    void comma();
    std::string out_;
    bool need_comma_ = false;
};

uint64_t fnv1a64(std::string_view data);
std::string to_hex(uint64_t v);

}  // namespace fixsim
