#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "chmr/jet/jet_var.hpp"

namespace chmr::jet {

using Rational = mpq_class;

/// Power product of jet variables, factors sorted by ascending key.
class Monomial {
 public:
  using Factor = std::pair<JetVar, std::uint32_t>;

  Monomial() = default;
  explicit Monomial(JetVar v, std::uint32_t exp = 1);

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  std::uint32_t degree() const;
  std::uint32_t degree_in(JetVar v) const;

  Monomial operator*(const Monomial& other) const;
  /// Exact quotient; the caller checks divides() first.
  Monomial operator/(const Monomial& other) const;
  bool divides(const Monomial& other) const;
  Monomial gcd(const Monomial& other) const;
  Monomial without(JetVar v) const;

  bool operator==(const Monomial&) const = default;

  /// Graded order: higher total degree first, ties broken lexicographically from
  /// the largest variable key downwards.
  static int compare(const Monomial& a, const Monomial& b);

  std::size_t hash() const;

 private:
  friend class Polynomial;
  std::vector<Factor> factors_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

struct Term {
  Monomial monomial;
  Rational coeff;
};

/// Sparse multivariate polynomial over Q in jet variables. Terms are kept sorted
/// with the leading term first and never hold zero coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(const Rational& c);  // NOLINT(google-explicit-constructor)
  Polynomial(long c) : Polynomial(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  explicit Polynomial(JetVar v, std::uint32_t exp = 1);
  Polynomial(Monomial m, Rational c);

  static Polynomial from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].monomial.is_one()); }
  bool is_monomial() const { return terms_.size() == 1; }
  Rational constant_value() const;  // requires is_constant()
  const Term& lead() const { return terms_.front(); }

  std::set<JetVar> variables() const;
  bool contains(JetVar v) const;
  std::uint32_t degree_in(JetVar v) const;
  std::uint32_t total_degree() const;

  /// Coefficients with respect to `v`, keyed by exponent.
  std::map<std::uint32_t, Polynomial> coefficients_in(JetVar v) const;
  Polynomial coefficient_in(JetVar v, std::uint32_t exp) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial scaled(const Rational& c) const;
  Polynomial times_monomial(const Monomial& m, const Rational& c) const;
  Polynomial pow(unsigned e) const;

  bool operator==(const Polynomial& o) const;

  /// Partial derivative with respect to the indeterminate `v`.
  Polynomial partial(JetVar v) const;

  /// Exact division; nullopt if `d` does not divide *this.
  std::optional<Polynomial> divide_exact(const Polynomial& d) const;

  /// Largest monomial dividing every term.
  Monomial monomial_content() const;
  /// Divide by the leading coefficient (zero stays zero).
  Polynomial monic() const;
  Polynomial substitute(JetVar v, const Polynomial& value) const;

  /// Apply `f` to every jet variable, rebuilding in the same ring.
  Polynomial rename(const std::function<JetVar(JetVar)>& f) const;

  std::size_t hash() const;

 private:
  void canonicalize();  // sort + merge + drop zeros
  std::vector<Term> terms_;
};

/// Greatest common divisor, normalized to be monic (1 for coprime inputs).
Polynomial gcd(const Polynomial& a, const Polynomial& b);

/// Pseudo-remainder of a by b with respect to v.
Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, JetVar v);

}  // namespace chmr::jet
