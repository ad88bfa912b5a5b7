#include "fixsim/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fixsim::toml {

namespace {

std::string strip(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Drops an unquoted # comment.
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) {
            in_str = !in_str;
        } else if (line[i] == '#' && !in_str) {
            return line.substr(0, i);
        }
    }
    return line;
}

bool valid_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

class Cursor {
  public:
    Cursor(const std::string& s, int line) : s_(s), line_(line) {}

    void skip_space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool done() { skip_space(); return pos_ >= s_.size(); }
    char peek() { skip_space(); return pos_ < s_.size() ? s_[pos_] : '\0'; }
    char take() { skip_space(); return s_[pos_++]; }

    Value parse_value() {
        skip_space();
        if (pos_ >= s_.size()) {
            throw ParseError(line_, "missing value");
        }
        Value v;
        v.line = line_;
        const char c = s_[pos_];
        if (c == '"') {
            v.kind = Value::Kind::string;
            v.str = parse_string();
        } else if (c == '[') {
            v.kind = Value::Kind::array;
            ++pos_;
            while (peek() != ']') {
                v.array.push_back(parse_value());
                skip_space();
                if (peek() == ',') {
                    ++pos_;
                } else if (peek() != ']') {
                    throw ParseError(line_, "expected ',' or ']' in array");
                }
            }
            ++pos_;  // consume ]
        } else if (s_.compare(pos_, 4, "true") == 0) {
            v.kind = Value::Kind::boolean;
            v.boolean = true;
            pos_ += 4;
        } else if (s_.compare(pos_, 5, "false") == 0) {
            v.kind = Value::Kind::boolean;
            v.boolean = false;
            pos_ += 5;
        } else {
            v.kind = Value::Kind::number;
            v.num = parse_number();
        }
        return v;
    }

  private:
    std::string parse_string() {
        ++pos_;  // opening quote
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
                ++pos_;
                switch (s_[pos_]) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default:
                        throw ParseError(line_, "unsupported escape in string");
                }
                ++pos_;
            } else {
                out += s_[pos_++];
            }
        }
        if (pos_ >= s_.size()) {
            throw ParseError(line_, "unterminated string");
        }
        ++pos_;  // closing quote
        return out;
    }

    double parse_number() {
        const char* start = s_.c_str() + pos_;
        char* end = nullptr;
        const double val = std::strtod(start, &end);
        if (end == start) {
            throw ParseError(line_, "expected a number");
        }
        pos_ += static_cast<size_t>(end - start);
        return val;
    }

    const std::string& s_;
    size_t pos_ = 0;
    int line_;
};

}  // namespace

Document Document::parse(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string raw;
    std::string current_table;
    int line_no = 0;
    doc.table_order_.push_back("");
    doc.tables_[""];

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = strip(strip_comment(raw));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(line_no, "malformed table header");
            }
            current_table = strip(line.substr(1, line.size() - 2));
            if (current_table.empty()) {
                throw ParseError(line_no, "empty table name");
            }
            for (char c : current_table) {
                if (!valid_key_char(c)) {
                    throw ParseError(line_no, "invalid character in table name");
                }
            }
            if (!doc.tables_.count(current_table)) {
                doc.table_order_.push_back(current_table);
                doc.tables_[current_table];
            }
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, "expected 'key = value'");
        }
        const std::string key = strip(line.substr(0, eq));
        if (key.empty()) {
            throw ParseError(line_no, "empty key");
        }
        for (char c : key) {
            if (!valid_key_char(c)) {
                throw ParseError(line_no, "invalid character in key '" + key + "'");
            }
        }
        const std::string value_text = line.substr(eq + 1);
        Cursor cur(value_text, line_no);
        Value v = cur.parse_value();
        if (!cur.done()) {
            throw ParseError(line_no, "trailing characters after value");
        }
        auto& entries = doc.tables_[current_table];
        for (const auto& [k, _] : entries) {
            if (k == key) {
                throw ParseError(line_no, "duplicate key '" + key + "'");
            }
        }
        entries.emplace_back(key, std::move(v));
    }
    return doc;
}

Document Document::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const Value* Document::find(const std::string& table, const std::string& key) const {
    const auto it = tables_.find(table);
    if (it == tables_.end()) {
        return nullptr;
    }
    for (const auto& [k, v] : it->second) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

bool Document::has(const std::string& table, const std::string& key) const {
    return find(table, key) != nullptr;
}

double Document::number(const std::string& table, const std::string& key) const {
    const Value* v = find(table, key);
    if (!v) {
        throw ParseError(0, "missing required key [" + table + "] " + key);
    }
    if (v->kind != Value::Kind::number) {
        throw ParseError(v->line, "key '" + key + "' must be a number");
    }
    return v->num;
}

double Document::number_or(const std::string& table, const std::string& key,
                           double fallback) const {
    const Value* v = find(table, key);
    if (!v) {
        return fallback;
    }
    if (v->kind != Value::Kind::number) {
        throw ParseError(v->line, "key '" + key + "' must be a number");
    }
    return v->num;
}

bool Document::boolean_or(const std::string& table, const std::string& key, bool fallback) const {
    const Value* v = find(table, key);
    if (!v) {
        return fallback;
    }
    if (v->kind != Value::Kind::boolean) {
        throw ParseError(v->line, "key '" + key + "' must be a boolean");
    }
    return v->boolean;
}

std::string Document::string_or(const std::string& table, const std::string& key,
                                const std::string& fallback) const {
    const Value* v = find(table, key);
    if (!v) {
        return fallback;
    }
    if (v->kind != Value::Kind::string) {
        throw ParseError(v->line, "key '" + key + "' must be a string");
    }
    return v->str;
}

std::vector<double> Document::number_array(const std::string& table,
                                           const std::string& key) const {
    const Value* v = find(table, key);
    if (!v) {
        throw ParseError(0, "missing required key [" + table + "] " + key);
    }
    if (v->kind != Value::Kind::array) {
        throw ParseError(v->line, "key '" + key + "' must be an array");
    }
    std::vector<double> out;
    for (const auto& e : v->array) {
        if (e.kind != Value::Kind::number) {
            throw ParseError(v->line, "array '" + key + "' must contain numbers");
        }
        out.push_back(e.num);
    }
    return out;
}

std::vector<std::string> Document::keys(const std::string& table) const {
    std::vector<std::string> out;
    const auto it = tables_.find(table);
    if (it != tables_.end()) {
        for (const auto& [k, _] : it->second) {
            out.push_back(k);
        }
    }
    return out;
}

bool Document::has_table(const std::string& table) const { return tables_.count(table) > 0; }

std::vector<std::string> Document::table_names() const { return table_order_; }

}  // namespace fixsim::toml
