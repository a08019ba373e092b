#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "basics.hpp"

namespace trl {

// Minimal s-expression reader with source positions, shared by the SMT-LIB
// session, the native-format parser, and the CHC frontend.

struct ParseError : LogicError {
  ParseError(const std::string &msg, long line, long col)
      : LogicError(msg + " at line " + std::to_string(line) + ", column " +
                   std::to_string(col)),
        line(line), col(col) {}
  long line;
  long col;
};

struct Sexp {
  bool is_atom{true};
  std::string atom;
  std::vector<Sexp> kids;
  long line{0};
  long col{0};

  const Sexp &at(std::size_t i) const {
    if (is_atom || i >= kids.size())
      throw ParseError("malformed expression", line, col);
    return kids[i];
  }

  std::string to_string() const {
    if (is_atom) return atom;
    std::string s = "(";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) s += " ";
      s += kids[i].to_string();
    }
    return s + ")";
  }
};

class SexpReader {
 public:
  explicit SexpReader(std::string text) : text_(std::move(text)) {}

  // next top-level expression, or nothing at end of input
  std::optional<Sexp> next() {
    skip_space();
    if (pos_ >= text_.size()) return std::nullopt;
    return read();
  }

  std::vector<Sexp> all() {
    std::vector<Sexp> r;
    while (auto s = next()) r.push_back(std::move(*s));
    return r;
  }

 private:
  Sexp read() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
    Sexp s;
    s.line = line_;
    s.col = col_;
    char c = text_[pos_];
    if (c == '(') {
      advance();
      s.is_atom = false;
      while (true) {
        skip_space();
        if (pos_ >= text_.size())
          throw ParseError("unclosed parenthesis", s.line, s.col);
        if (text_[pos_] == ')') {
          advance();
          return s;
        }
        s.kids.push_back(read());
      }
    }
    if (c == ')') throw ParseError("unexpected ')'", line_, col_);
    if (c == '|') {
      advance();
      while (pos_ < text_.size() && text_[pos_] != '|') {
        s.atom += text_[pos_];
        advance();
      }
      if (pos_ >= text_.size())
        throw ParseError("unclosed quoted symbol", s.line, s.col);
      advance();
      return s;
    }
    if (c == '"') {
      advance();
      s.atom = "\"";
      while (pos_ < text_.size() && text_[pos_] != '"') {
        s.atom += text_[pos_];
        advance();
      }
      if (pos_ >= text_.size())
        throw ParseError("unclosed string literal", s.line, s.col);
      advance();
      s.atom += "\"";
      return s;
    }
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';')
      { s.atom += text_[pos_]; advance(); }
    if (s.atom.empty()) throw ParseError("empty token", line_, col_);
    return s;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string text_;
  std::size_t pos_{0};
  long line_{1};
  long col_{1};
};

}  // namespace trl
