// Copyright 2026 The guoq Authors
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

// Reader and writer for the OpenQASM 2.0 subset used by the benchmark
// corpus: an optional header and qelib include, exactly one qreg, and gate
// statements. Angles are `a*pi/b` style rational multiples of pi (kept exact)
// or decimal literals.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "guoq/circuit.hpp"

namespace guoq {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownGate, OperandOutOfRange, Arity };

  ParseError(Kind kind, int line, int column, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        kind_(kind),
        line_(line),
        column_(column) {}

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

namespace detail {

class QasmReader {
 public:
  QasmReader(std::string_view text, const GateSetDef& set) : text_(text), set_(set) {}

  Circuit parse() {
    skip_space();
    if (peek_word() == "OPENQASM") {
      expect_word("OPENQASM");
      read_number_token();
      expect(';');
    }
    bool have_register = false;
    Circuit circuit;
    while (skip_space(), !at_end()) {
      const int line = line_, col = col_;
      const std::string word = read_identifier();
      if (word == "include") {
        read_string();
        expect(';');
      } else if (word == "qreg") {
        if (have_register) fail(line, col, "only one quantum register is supported");
        register_name_ = read_identifier();
        expect('[');
        const auto n = read_unsigned();
        expect(']');
        expect(';');
        circuit = Circuit(n);
        have_register = true;
      } else {
        if (!have_register) fail(line, col, "gate statement before qreg declaration");
        circuit.append(read_gate(word, line, col, circuit.num_qubits()));
      }
    }
    if (!have_register) fail(line_, col_, "missing qreg declaration");
    return circuit;
  }

  /// A lone angle expression spanning the whole input.
  Angle angle_expression() {
    const Angle a = read_angle();
    skip_space();
    if (!at_end()) fail(line_, col_, "trailing characters after angle");
    return a;
  }

 private:
  Gate read_gate(const std::string& name, int line, int col, std::size_t width) {
    const auto kind = set_.find_qasm(name);
    if (!kind) {
      throw ParseError(ParseError::Kind::UnknownGate, line, col,
                       "gate '" + name + "' is not in gate set " + set_.name());
    }
    std::vector<Angle> params;
    skip_space();
    if (peek() == '(') {
      expect('(');
      params.push_back(read_angle());
      while (skip_space(), peek() == ',') {
        expect(',');
        params.push_back(read_angle());
      }
      expect(')');
    }
    std::vector<Qubit> qubits;
    do {
      skip_space();
      const int ql = line_, qc = col_;
      const std::string reg = read_identifier();
      if (reg != register_name_) fail(ql, qc, "unknown register '" + reg + "'");
      expect('[');
      const auto index = read_unsigned();
      expect(']');
      if (index >= width) {
        throw ParseError(ParseError::Kind::OperandOutOfRange, ql, qc,
                         "qubit index " + std::to_string(index) + " out of range");
      }
      qubits.push_back(static_cast<Qubit>(index));
      skip_space();
    } while (peek() == ',' && (expect(','), true));
    expect(';');
    try {
      return Gate(*kind, qubits, params);
    } catch (const std::invalid_argument& e) {
      throw ParseError(ParseError::Kind::Arity, line, col, e.what());
    }
  }

  // [-] ( INT '*' pi ['/' INT] | pi ['/' INT] | NUMBER ['*' pi] ['/' NUMBER] )
  Angle read_angle() {
    skip_space();
    const int line = line_, col = col_;
    bool negative = false;
    if (peek() == '-' || peek() == '+') {
      negative = peek() == '-';
      advance();
      skip_space();
    }
    std::int64_t num = 1;
    double value = 1.0;
    bool exact = true;
    bool has_pi = false;
    if (peek_word() == "pi") {
      expect_word("pi");
      has_pi = true;
    } else {
      const std::string tok = read_number_token();
      if (tok.empty()) fail(line, col, "expected angle expression");
      const bool is_int = tok.find_first_of(".eE") == std::string::npos;
      if (is_int) {
        num = std::stoll(tok);
        value = static_cast<double>(num);
      } else {
        exact = false;
        value = std::stod(tok);
      }
      skip_space();
      if (peek() == '*') {
        expect('*');
        skip_space();
        expect_word("pi");
        has_pi = true;
      }
    }
    std::int64_t den = 1;
    double den_value = 1.0;
    skip_space();
    if (peek() == '/') {
      expect('/');
      skip_space();
      const std::string tok = read_number_token();
      if (tok.empty()) fail(line_, col_, "expected denominator");
      if (tok.find_first_of(".eE") == std::string::npos) {
        den = std::stoll(tok);
        den_value = static_cast<double>(den);
        if (den == 0) fail(line, col, "division by zero in angle");
      } else {
        exact = false;
        den_value = std::stod(tok);
      }
    }
    if (negative) {
      num = -num;
      value = -value;
    }
    if (has_pi && exact) return Angle::pi_fraction(num, den);
    if (!has_pi && exact && num == 0) return Angle{};
    return Angle::radians(value / den_value * (has_pi ? kPi : 1.0));
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        advance();
      } else if (text_.substr(pos_, 2) == "//") {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view peek_word() const {
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      ++end;
    }
    return text_.substr(pos_, end - pos_);
  }

  std::string read_identifier() {
    skip_space();
    const auto word = peek_word();
    if (word.empty() || std::isdigit(static_cast<unsigned char>(word[0]))) {
      fail(line_, col_, "expected identifier");
    }
    for (std::size_t i = 0; i < word.size(); ++i) advance();
    return std::string(word);
  }

  void expect_word(std::string_view w) {
    skip_space();
    if (peek_word() != w) fail(line_, col_, "expected '" + std::string(w) + "'");
    for (std::size_t i = 0; i < w.size(); ++i) advance();
  }

  void expect(char c) {
    skip_space();
    if (peek() != c) fail(line_, col_, std::string("expected '") + c + "'");
    advance();
  }

  std::string read_number_token() {
    skip_space();
    std::string tok;
    while (!at_end()) {
      const char c = peek();
      const bool exp_sign = (c == '-' || c == '+') && !tok.empty() && (tok.back() == 'e' || tok.back() == 'E');
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || exp_sign) {
        if ((c == 'e' || c == 'E') && tok.empty()) break;
        tok += c;
        advance();
      } else {
        break;
      }
    }
    return tok;
  }

  std::size_t read_unsigned() {
    skip_space();
    const int line = line_, col = col_;
    const std::string tok = read_number_token();
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
      fail(line, col, "expected non-negative integer");
    }
    return static_cast<std::size_t>(std::stoull(tok));
  }

  void read_string() {
    skip_space();
    if (peek() != '"') fail(line_, col_, "expected string literal");
    advance();
    while (!at_end() && peek() != '"') advance();
    if (at_end()) fail(line_, col_, "unterminated string literal");
    advance();
  }

  [[noreturn]] void fail(int line, int col, const std::string& msg) const {
    throw ParseError(ParseError::Kind::Syntax, line, col, msg);
  }

  std::string_view text_;
  const GateSetDef& set_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::string register_name_;
};

}  // namespace detail

/// Parses `text`; every gate must belong to `set`.
inline Circuit parse_qasm(std::string_view text, const GateSetDef& set) {
  return detail::QasmReader(text, set).parse();
}

/// Parses one angle in the file grammar (`-3*pi/4`, `pi`, `0.25`, ...).
inline Angle parse_angle(std::string_view text) {
  static const GateSetDef any_set = GateSetDef::nam();
  return detail::QasmReader(text, any_set).angle_expression();
}

inline Circuit load_qasm(const std::filesystem::path& path, const GateSetDef& set) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_qasm(ss.str(), set);
}

inline std::string emit_qasm(const Circuit& circuit, const GateSetDef& set) {
  circuit.validate(set);
  std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out += "qreg q[" + std::to_string(circuit.num_qubits()) + "];\n";
  for (const auto& g : circuit) {
    out += g.info().qasm_name;
    if (!g.params().empty()) {
      out += "(";
      for (std::size_t i = 0; i < g.params().size(); ++i) {
        if (i) out += ",";
        out += g.param(i).to_qasm();
      }
      out += ")";
    }
    for (std::size_t i = 0; i < g.arity(); ++i) {
      out += (i ? ",q[" : " q[") + std::to_string(g.qubit(i)) + "]";
    }
    out += ";\n";
  }
  return out;
}

}  // namespace guoq
