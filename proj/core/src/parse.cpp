#include <cctype>
#include <charconv>
#include <string>

#include "freepick/freepoly.hpp"

namespace freepick {

namespace {

// Recursive descent over
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := '-' unary | '+' unary | power
//   power   := primary ('^' integer)?
//   primary := real ['i'] | 'i' | 'x' integer | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view text, int d) : text_(text), d_(d) {}

  FreePoly parse() {
    skip_space();
    if (pos_ >= text_.size()) fail("empty polynomial");
    FreePoly p = expr();
    skip_space();
    if (pos_ < text_.size()) {
      if (starts_primary()) fail("juxtaposition is not multiplication; expected '*'");
      fail(std::string("unexpected character '") + text_[pos_] + "'");
    }
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool starts_primary() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'x' || c == 'i' || c == '(';
  }

  FreePoly expr() {
    FreePoly acc = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        acc += term();
      } else if (peek('-')) {
        ++pos_;
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  FreePoly term() {
    FreePoly acc = unary();
    while (true) {
      if (peek('*')) {
        ++pos_;
        acc = acc * unary();
      } else {
        if (starts_primary()) fail("juxtaposition is not multiplication; expected '*'");
        return acc;
      }
    }
  }

  FreePoly unary() {
    if (peek('-')) {
      ++pos_;
      return -unary();
    }
    if (peek('+')) {
      ++pos_;
      return unary();
    }
    return power();
  }

  FreePoly power() {
    FreePoly base = primary();
    if (!peek('^')) return base;
    ++pos_;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a nonnegative integer exponent after '^'");
    unsigned long e = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, e);
    if (ec != std::errc() || e > 4096) {
      pos_ = start;
      fail("exponent out of range");
    }
    (void)ptr;
    FreePoly out = FreePoly::one(d_);
    for (unsigned long k = 0; k < e; ++k) out = out * base;
    return out;
  }

  FreePoly primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      FreePoly inner = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == 'x') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a variable index after 'x'");
      int idx = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, idx);
      (void)ptr;
      if (ec != std::errc() || idx < 1 || idx > d_) {
        pos_ = start;
        fail("variable x" + std::string(text_.substr(start, pos_ - start)) + " outside x1..x" +
             std::to_string(d_));
      }
      return FreePoly::variable(d_, idx - 1);
    }
    if (c == 'i') {
      ++pos_;
      return FreePoly::constant(d_, Complex(0.0, 1.0));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const double v = number();
      if (pos_ < text_.size() && text_[pos_] == 'i') {
        ++pos_;
        return FreePoly::constant(d_, Complex(0.0, v));
      }
      return FreePoly::constant(d_, Complex(v, 0.0));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  double number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      const std::size_t exp_start = pos_;
      digits();
      if (exp_start == pos_) pos_ = save;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  std::string_view text_;
  int d_;
  std::size_t pos_ = 0;
};

}  // namespace

FreePoly parse_poly(std::string_view text, int d) {
  if (d < 1) throw DimensionError("parse_poly: d must be positive");
  return Parser(text, d).parse();
}

}  // namespace freepick
