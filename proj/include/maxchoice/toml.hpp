// Copyright 2026 The Maxchoice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace maxchoice::toml {

// Minimal TOML-flavoured config reader covering what the run configs need:
// comments, [section] headers, key = value pairs, strings, integers, floats,
// booleans, (nested) arrays and single-level inline tables. No dotted keys,
// no dates, no multi-line strings.

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value>;

class Value {
 public:
  Value() = default;
  explicit Value(std::int64_t v) : data_(v) {}
  explicit Value(double v) : data_(v) {}
  explicit Value(bool v) : data_(v) {}
  explicit Value(std::string v) : data_(std::move(v)) {}
  explicit Value(Array v) : data_(std::move(v)) {}
  explicit Value(Table v) : data_(std::move(v)) {}

  bool is_integer() const { return std::holds_alternative<std::int64_t>(data_); }
  bool is_float() const { return std::holds_alternative<double>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_string() const { return std::holds_alternative<std::string>(data_); }
  bool is_array() const { return std::holds_alternative<Array>(data_); }
  bool is_table() const { return std::holds_alternative<Table>(data_); }

  std::int64_t as_integer(const std::string& where) const {
    if (!is_integer()) throw ParseError(where + ": expected an integer");
    return std::get<std::int64_t>(data_);
  }

  double as_number(const std::string& where) const {
    if (is_integer()) return static_cast<double>(std::get<std::int64_t>(data_));
    if (is_float()) return std::get<double>(data_);
    throw ParseError(where + ": expected a number");
  }

  bool as_bool(const std::string& where) const {
    if (!is_bool()) throw ParseError(where + ": expected a boolean");
    return std::get<bool>(data_);
  }

  const std::string& as_string(const std::string& where) const {
    if (!is_string()) throw ParseError(where + ": expected a string");
    return std::get<std::string>(data_);
  }

  const Array& as_array(const std::string& where) const {
    if (!is_array()) throw ParseError(where + ": expected an array");
    return std::get<Array>(data_);
  }

  const Table& as_table(const std::string& where) const {
    if (!is_table()) throw ParseError(where + ": expected a table");
    return std::get<Table>(data_);
  }

  Table& table_ref() { return std::get<Table>(data_); }

 private:
  std::variant<std::monostate, std::int64_t, double, bool, std::string, Array, Table>
      data_;
};

namespace detail {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_space_and_comments(bool cross_newlines) {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        if (!cross_newlines) return;
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  bool at_end() {
    skip_space_and_comments(true);
    return pos_ >= text_.size();
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void advance() { ++pos_; }

  void expect(char c) {
    if (peek() != c)
      throw ParseError("line " + std::to_string(line_) + ": expected '" +
                       std::string(1, c) + "'");
    ++pos_;
  }

  std::string bare_key() {
    std::string key;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        key.push_back(c);
        ++pos_;
      } else {
        break;
      }
    }
    if (key.empty())
      throw ParseError("line " + std::to_string(line_) + ": expected a key");
    return key;
  }

  std::string quoted_string() {
    expect('"');
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\\' && pos_ < text_.size()) {
        const char esc = text_[pos_++];
        switch (esc) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default:
            throw ParseError("line " + std::to_string(line_) +
                             ": unsupported escape");
        }
      } else if (c == '\n') {
        throw ParseError("line " + std::to_string(line_) + ": unterminated string");
      }
      out.push_back(c);
    }
    expect('"');
    return out;
  }

  Value scalar_or_compound() {
    skip_space_and_comments(false);
    const char c = peek();
    if (c == '"') return Value(quoted_string());
    if (c == '[') return array();
    if (c == '{') return inline_table();
    return bare_scalar();
  }

  int line() const { return line_; }

 private:
  Value array() {
    expect('[');
    Array items;
    for (;;) {
      skip_space_and_comments(true);
      if (peek() == ']') {
        advance();
        break;
      }
      items.push_back(scalar_or_compound());
      skip_space_and_comments(true);
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == ']') {
        advance();
        break;
      }
      throw ParseError("line " + std::to_string(line_) +
                       ": expected ',' or ']' in array");
    }
    return Value(std::move(items));
  }

  Value inline_table() {
    expect('{');
    Table table;
    for (;;) {
      skip_space_and_comments(false);
      if (peek() == '}') {
        advance();
        break;
      }
      const std::string key = bare_key();
      skip_space_and_comments(false);
      expect('=');
      Value value = scalar_or_compound();
      if (!table.emplace(key, std::move(value)).second)
        throw ParseError("line " + std::to_string(line_) + ": duplicate key '" +
                         key + "'");
      skip_space_and_comments(false);
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == '}') {
        advance();
        break;
      }
      throw ParseError("line " + std::to_string(line_) +
                       ": expected ',' or '}' in inline table");
    }
    return Value(std::move(table));
  }

  Value bare_scalar() {
    std::string token;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ']' ||
          c == '}' || c == '#')
        break;
      token.push_back(c);
      ++pos_;
    }
    if (token == "true") return Value(true);
    if (token == "false") return Value(false);
    if (token.empty())
      throw ParseError("line " + std::to_string(line_) + ": expected a value");
    const bool looks_float = token.find_first_of(".eE") != std::string::npos ||
                             token == "inf" || token == "-inf";
    try {
      std::size_t used = 0;
      if (looks_float) {
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return Value(v);
      }
      const std::int64_t v = std::stoll(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      return Value(v);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_) + ": bad value '" + token +
                       "'");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace detail

// Parses a whole document into a table of sections; top-level keys land in
// the section "" (rarely used here).
inline Table parse(std::string_view text) {
  detail::Lexer lex(text);
  Table root;
  Table* current = &root;
  while (!lex.at_end()) {
    if (lex.peek() == '[') {
      lex.advance();
      const std::string name = lex.bare_key();
      lex.expect(']');
      auto [it, inserted] = root.emplace(name, Value(Table{}));
      if (!inserted)
        throw ParseError("duplicate section [" + name + "]");
      current = &it->second.table_ref();
    } else {
      const std::string key = lex.bare_key();
      lex.skip_space_and_comments(false);
      lex.expect('=');
      Value value = lex.scalar_or_compound();
      if (!current->emplace(key, std::move(value)).second)
        throw ParseError("duplicate key '" + key + "'");
    }
  }
  return root;
}

}  // namespace maxchoice::toml
