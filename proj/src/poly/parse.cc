#include "rroa/poly/parse.h"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace rroa {
namespace poly {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& names)
      : text_(text), names_(names), nvars_(static_cast<int>(names.size())) {}

  Polynomial Run() {
    SkipSpace();
    if (AtEnd()) Fail("empty polynomial");
    Polynomial p = Expression();
    SkipSpace();
    if (!AtEnd()) Fail(std::string("unexpected '") + text_[pos_] + "'");
    return p;
  }

 private:
  // expression := term (('+'|'-') term)*
  Polynomial Expression() {
    Polynomial acc = Term();
    for (;;) {
      SkipSpace();
      if (Peek('+')) {
        ++pos_;
        acc += Term();
      } else if (Peek('-')) {
        ++pos_;
        acc -= Term();
      } else {
        return acc;
      }
    }
  }

  // term := unary ('*' unary)*
  Polynomial Term() {
    Polynomial acc = Unary();
    for (;;) {
      SkipSpace();
      if (!Peek('*')) return acc;
      ++pos_;
      acc = acc * Unary();
    }
  }

  // unary := ('-'|'+') unary | power
  Polynomial Unary() {
    SkipSpace();
    if (Peek('-')) {
      ++pos_;
      return -Unary();
    }
    if (Peek('+')) {
      ++pos_;
      return Unary();
    }
    return Power();
  }

  // power := primary ('^' integer)?
  Polynomial Power() {
    Polynomial base = Primary();
    SkipSpace();
    if (!Peek('^')) return base;
    ++pos_;
    SkipSpace();
    const std::size_t start = pos_;
    while (!AtEnd() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) Fail("expected non-negative integer exponent");
    int e = 0;
    std::from_chars(text_.data() + start, text_.data() + pos_, e);
    return base.pow(e);
  }

  Polynomial Primary() {
    SkipSpace();
    if (AtEnd()) Fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = Expression();
      SkipSpace();
      if (!Peek(')')) Fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return Identifier();
    Fail(std::string("unexpected '") + c + "'");
  }

  Polynomial Number() {
    const std::size_t start = pos_;
    while (!AtEnd() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                        text_[pos_] == '.')) {
      ++pos_;
    }
    if (!AtEnd() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (!AtEnd() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (AtEnd() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        pos_ = save;
        Fail("malformed exponent in number");
      }
      while (!AtEnd() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    const std::string token(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      pos_ = start;
      Fail("malformed number '" + token + "'");
    }
    return Polynomial::Constant(nvars_, v);
  }

  Polynomial Identifier() {
    const std::size_t start = pos_;
    while (!AtEnd() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                        text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    for (int i = 0; i < nvars_; ++i) {
      if (names_[i] == name) return Polynomial::Variable(nvars_, i);
    }
    pos_ = start;
    Fail("unknown variable '" + std::string(name) + "'");
  }

  void SkipSpace() {
    while (!AtEnd() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool AtEnd() const { return pos_ >= text_.size(); }
  bool Peek(char c) const { return !AtEnd() && text_[pos_] == c; }

  [[noreturn]] void Fail(const std::string& msg) const {
    const int col = static_cast<int>(pos_) + 1;
    throw ParseError("column " + std::to_string(col) + ": " + msg, col);
  }

  std::string_view text_;
  const std::vector<std::string>& names_;
  int nvars_;
  std::size_t pos_{0};
};

}  // namespace

Polynomial ParsePolynomial(std::string_view text,
                           const std::vector<std::string>& names) {
  return Parser(text, names).Run();
}

}  // namespace poly
}  // namespace rroa
