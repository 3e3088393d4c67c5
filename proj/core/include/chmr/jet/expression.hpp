#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "chmr/jet/polynomial.hpp"
#include "chmr/jet/space.hpp"

namespace chmr::jet {

/// Exact rational function of jet variables in canonical form: gcd(num, den) = 1,
/// den monic and free of extension generators, extension relations eliminated.
///
/// Expressions are immutable values. A pure constant may carry no space; it adopts
/// the space of whatever it is combined with.
class Expression {
 public:
  Expression() = default;
  Expression(const Rational& c);  // NOLINT(google-explicit-constructor)
  Expression(long c) : Expression(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  /// Canonicalizes num/den over `space`.
  Expression(SpacePtr space, Polynomial num, Polynomial den = Polynomial(1));

  static Expression jet(SpacePtr space, JetVar v);
  /// `name` is a symbol, optionally followed by a derivative suffix: symbol(sp, "P", "XX").
  static Expression symbol(const SpacePtr& space, std::string_view name, std::string_view suffix = {});

  const SpacePtr& space() const { return space_; }
  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const;
  std::set<JetVar> jet_vars() const;
  bool contains(JetVar v) const { return num_.contains(v) || den_.contains(v); }

  Expression operator-() const;
  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  Expression& operator+=(const Expression& b) { return *this = *this + b; }
  Expression& operator-=(const Expression& b) { return *this = *this - b; }
  Expression& operator*=(const Expression& b) { return *this = *this * b; }
  Expression pow(int k) const;
  Expression inverse() const;

  /// Structural equality of canonical forms, which is mathematical equality.
  bool operator==(const Expression& o) const { return num_ == o.num_ && den_ == o.den_; }

  std::string to_string() const;

 private:
  static Expression raw(SpacePtr space, Polynomial num, Polynomial den);
  SpacePtr space_;
  Polynomial num_;
  Polynomial den_ = Polynomial(1);
};

std::ostream& operator<<(std::ostream& os, const Expression& e);

/// Total derivative with respect to an independent variable.
Expression differentiate(const Expression& e, VarId v);
Expression differentiate(const Expression& e, std::string_view variable);
/// Repeated total derivative, variables applied left to right: differentiate(e, {x, x, y}).
Expression differentiate(const Expression& e, std::initializer_list<std::string_view> variables);

/// Replaces every occurrence of the listed fields, including inside derivatives,
/// which are expanded by differentiating the replacement.
Expression substitute(const Expression& e, const std::map<FieldId, Expression>& replacements);
Expression substitute(const Expression& e, std::string_view field, const Expression& replacement);

/// Every stored Expression is already canonical; this re-canonicalizes an
/// arbitrary numerator/denominator pair and is otherwise the identity.
Expression normalize(const Expression& e);

/// Ring homomorphism into `target`: each jet variable is sent to image(v).
Expression map_jets(const Expression& e, const SpacePtr& target,
                    const std::function<Expression(JetVar)>& image);

/// Polynomial with extension generators reduced (s^2 -> square).
Polynomial reduce_extensions(const Polynomial& p, const Space& space);

Expression parse_expression(std::string_view text, const SpacePtr& space);

/// Exact value in Q(i) used by the randomized zero-test.
struct GaussianRational {
  Rational re, im;
  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

GaussianRational evaluate_exact(const Polynomial& p, const std::function<GaussianRational(JetVar)>& value);
double evaluate(const Expression& e, const std::function<double(JetVar)>& value);

}  // namespace chmr::jet
