#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixsim::toml {

// Minimal TOML subset: [table] headers, key = value lines, # comments.
// Values: integers, floats, booleans, basic strings, and flat arrays of
// numbers/strings. Enough for simulator config files; not a general parser.

struct Value {
    enum class Kind { number, boolean, string, array };
    Kind kind = Kind::number;
    double num = 0.0;
    bool boolean = false;
    std::string str;
    std::vector<Value> array;
    int line = 0;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("TOML parse error at line " + std::to_string(line) + ": " + message),
          line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

class Document {
  public:
    static Document parse(const std::string& text);
    static Document parse_file(const std::string& path);

    bool has(const std::string& table, const std::string& key) const;
    // Lookups throw ParseError (carrying the key's line, or 0 when absent and
    // no default applies) on missing keys or kind mismatches.
    double number(const std::string& table, const std::string& key) const;
    double number_or(const std::string& table, const std::string& key, double fallback) const;
    bool boolean_or(const std::string& table, const std::string& key, bool fallback) const;
    std::string string_or(const std::string& table, const std::string& key,
                          const std::string& fallback) const;
    std::vector<double> number_array(const std::string& table, const std::string& key) const;

    // Keys of one table, in file order.
    std::vector<std::string> keys(const std::string& table) const;
    bool has_table(const std::string& table) const;
    std::vector<std::string> table_names() const;

  private:
    const Value* find(const std::string& table, const std::string& key) const;
    // table -> ordered (key, value)
    std::map<std::string, std::vector<std::pair<std::string, Value>>> tables_;
    std::vector<std::string> table_order_;
};

}  // namespace fixsim::toml
