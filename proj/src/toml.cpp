#include "lzeros/toml.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lzeros/errors.hpp"

namespace lzeros {
namespace {

using json = nlohmann::json;

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::vector<std::vector<std::string>> defined_tables_;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("TOML line " + std::to_string(line_) + ": " + msg);
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  char get() {
    if (eof()) fail("unexpected end of input");
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\r' || peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("expected end of line");
    get();
  }

  static bool bare_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  }

  std::string parse_simple_key() {
    skip_ws();
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    const std::size_t start = pos_;
    while (!eof() && bare_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> parse_key() {
    std::vector<std::string> parts{parse_simple_key()};
    skip_ws();
    while (peek() == '.') {
      ++pos_;
      parts.push_back(parse_simple_key());
      skip_ws();
    }
    return parts;
  }

  json& descend(json& base, const std::vector<std::string>& path, std::size_t count) {
    json* cur = &base;
    for (std::size_t i = 0; i < count; ++i) {
      json& next = (*cur)[path[i]];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail("key '" + path[i] + "' is not a table");
      cur = &next;
    }
    return *cur;
  }

  json& open_table() {
    get();  // '['
    if (peek() == '[') fail("arrays of tables are not supported");
    auto path = parse_key();
    skip_ws();
    if (get() != ']') fail("expected ']' after table name");
    for (const auto& d : defined_tables_)
      if (d == path) fail("table defined twice");
    defined_tables_.push_back(path);
    return descend(root_ref(), path, path.size());
  }

  json* root_ = nullptr;
  json& root_ref() { return *root_; }

  void parse_key_value(json& table) {
    auto path = parse_key();
    skip_ws();
    if (get() != '=') fail("expected '=' after key");
    skip_ws();
    json value = parse_value();
    json& parent = descend(table, path, path.size() - 1);
    if (parent.contains(path.back())) fail("duplicate key '" + path.back() + "'");
    parent[path.back()] = std::move(value);
  }

  json parse_value() {
    const char c = peek();
    if (c == '"') {
      if (s_.substr(pos_, 3) == "\"\"\"") fail("multi-line strings are not supported");
      return parse_basic_string();
    }
    if (c == '\'') {
      if (s_.substr(pos_, 3) == "'''") fail("multi-line strings are not supported");
      return parse_literal_string();
    }
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (s_.substr(pos_, 4) == "true" && !bare_char(at(pos_ + 4))) {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false" && !bare_char(at(pos_ + 5))) {
      pos_ += 5;
      return false;
    }
    return parse_number();
  }

  char at(std::size_t i) const { return i < s_.size() ? s_[i] : '\0'; }

  std::string parse_basic_string() {
    get();  // opening quote
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      const char e = get();
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'u':
        case 'U': {
          const int digits = e == 'u' ? 4 : 8;
          if (pos_ + digits > s_.size()) fail("truncated unicode escape");
          unsigned long cp = 0;
          const auto r = std::from_chars(s_.data() + pos_, s_.data() + pos_ + digits, cp, 16);
          if (r.ec != std::errc() || r.ptr != s_.data() + pos_ + digits) fail("bad unicode escape");
          pos_ += digits;
          append_utf8(out, cp);
          break;
        }
        default: fail(std::string("unknown escape '\\") + e + "'");
      }
    }
    return out;
  }

  void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x110000) {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      fail("code point out of range");
    }
  }

  std::string parse_literal_string() {
    get();
    const std::size_t start = pos_;
    while (peek() != '\'') {
      if (eof() || peek() == '\n') fail("unterminated string");
      ++pos_;
    }
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  json parse_array() {
    get();  // '['
    json arr = json::array();
    while (true) {
      skip_array_space();
      if (peek() == ']') {
        get();
        break;
      }
      arr.push_back(parse_value());
      skip_array_space();
      const char c = get();
      if (c == ']') break;
      if (c != ',') fail("expected ',' or ']' in array");
    }
    return arr;
  }

  json parse_inline_table() {
    get();  // '{'
    json table = json::object();
    skip_ws();
    if (peek() == '}') {
      get();
      return table;
    }
    while (true) {
      parse_key_value(table);
      skip_ws();
      const char c = get();
      if (c == '}') break;
      if (c != ',') fail("expected ',' or '}' in inline table");
    }
    return table;
  }

  json parse_number() {
    const std::size_t start = pos_;
    while (!eof() && (bare_char(peek()) || peek() == '+' || peek() == '.')) ++pos_;
    std::string tok(s_.substr(start, pos_ - start));
    if (tok.empty()) fail("expected a value");
    std::string clean;
    for (char c : tok)
      if (c != '_') clean.push_back(c);
    std::string body = clean;
    double sign = 1.0;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
      sign = body[0] == '-' ? -1.0 : 1.0;
      body.erase(0, 1);
    }
    if (body == "inf") return sign * std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      long long v = 0;
      const char* b = clean.data() + (clean[0] == '+' ? 1 : 0);
      const auto r = std::from_chars(b, clean.data() + clean.size(), v);
      if (r.ec != std::errc() || r.ptr != clean.data() + clean.size()) fail("invalid value '" + tok + "'");
      return v;
    }
    double v = 0.0;
    const char* b = clean.data() + (clean[0] == '+' ? 1 : 0);
    const auto r = std::from_chars(b, clean.data() + clean.size(), v);
    if (r.ec != std::errc() || r.ptr != clean.data() + clean.size()) fail("invalid number '" + tok + "'");
    return v;
  }

 public:
  json run() {
    json root = json::object();
    root_ = &root;
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[')
        table = &open_table();
      else
        parse_key_value(*table);
      end_of_line();
    }
    return root;
  }
};

}  // namespace

nlohmann::json parse_toml(std::string_view text) { return Parser(text).run(); }

}  // namespace lzeros
