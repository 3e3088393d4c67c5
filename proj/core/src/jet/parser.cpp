// Recursive-descent reader for the expression grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' '-'? integer)?
//   primary := integer | symbol | '(' expr ')'
//   symbol  := [A-Za-z][A-Za-z0-9]* ('_' variable+)?
//
// Rational literals p/q are ordinary divisions of integer literals.

#include <cctype>

#include "chmr/errors.hpp"
#include "chmr/jet/expression.hpp"

namespace chmr::jet {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SpacePtr& space) : text_(text), space_(space) {}

  Expression parse() {
    Expression e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expression expr() {
    Expression e = term();
    for (;;) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }

  Expression term() {
    Expression e = unary();
    for (;;) {
      if (accept('*')) {
        e = e * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Expression d = unary();
        if (d.is_zero()) throw ParseError(at, "division by zero");
        e = e / d;
      } else {
        return e;
      }
    }
  }

  Expression unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (!accept('^')) return base;
    const bool negative = accept('-');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    const int k = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (negative && base.is_zero()) throw ParseError(start, "division by zero");
    return base.pow(negative ? -k : k);
  }

  Expression primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return Expression(space_, Polynomial(Rational(std::string(text_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return symbol();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expression symbol() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    const auto field = space_->find_field(name);
    if (!field) throw DomainError("undeclared symbol '" + std::string(name) + "' at offset " + std::to_string(start));
    JetVar j(*field);
    if (pos_ < text_.size() && text_[pos_] == '_') {
      ++pos_;
      const std::size_t sstart = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (sstart == pos_) fail("expected derivative variables after '_'");
      for (VarId v : space_->split_suffix(*field, text_.substr(sstart, pos_ - sstart), sstart))
        j = j.differentiated(v);
    }
    return Expression::jet(space_, j);
  }

  std::string_view text_;
  const SpacePtr& space_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text, const SpacePtr& space) { return Parser(text, space).parse(); }

}  // namespace chmr::jet
