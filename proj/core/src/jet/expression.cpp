#include "chmr/jet/expression.hpp"

#include <cassert>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "chmr/errors.hpp"

namespace chmr::jet {

namespace {

SpacePtr common_space(const Expression& a, const Expression& b) {
  if (!a.space()) return b.space();
  if (!b.space() || a.space() == b.space()) return a.space();
  throw DomainError("expressions belong to different variable spaces");
}

bool has_extension(const Polynomial& p, const Space& space) {
  for (const auto& t : p.terms())
    for (const auto& [v, e] : t.monomial.factors())
      if (space.field(v.field()).kind == FieldKind::kExtension) return true;
  return false;
}

Polynomial negate_generator(const Polynomial& p, JetVar g) {
  std::vector<Term> ts = p.terms();
  for (auto& t : ts)
    if (t.monomial.degree_in(g) % 2 == 1) t.coeff = -t.coeff;
  return Polynomial::from_terms(std::move(ts));
}

}  // namespace

Polynomial reduce_extensions(const Polynomial& p, const Space& space) {
  bool needed = false;
  for (const auto& t : p.terms()) {
    for (const auto& [v, e] : t.monomial.factors())
      if (e >= 2 && space.field(v.field()).kind == FieldKind::kExtension) needed = true;
    if (needed) break;
  }
  if (!needed) return p;
  Polynomial out;
  for (const auto& t : p.terms()) {
    Monomial rest;
    Polynomial factor(1);
    for (const auto& [v, e] : t.monomial.factors()) {
      const auto& sig = space.field(v.field());
      if (sig.kind == FieldKind::kExtension && e >= 2) {
        factor = factor * sig.square.pow(e / 2);
        if (e % 2) rest = rest * Monomial(v);
      } else {
        rest = rest * Monomial(v, e);
      }
    }
    out += factor.times_monomial(rest, t.coeff);
  }
  // the square may itself hold generators (never in practice, but stay closed)
  return out == p ? out : reduce_extensions(out, space);
}

Expression::Expression(const Rational& c) : num_(c) {}

Expression::Expression(SpacePtr space, Polynomial num, Polynomial den) : space_(std::move(space)) {
  if (den.is_zero()) throw DivisionByZero();
  if (space_) {
    num = reduce_extensions(num, *space_);
    den = reduce_extensions(den, *space_);
    // rationalize: multiply through by the conjugate in each generator
    while (has_extension(den, *space_)) {
      JetVar g;
      for (const auto& t : den.terms())
        for (const auto& [v, e] : t.monomial.factors())
          if (space_->field(v.field()).kind == FieldKind::kExtension) g = v;
      const Polynomial conj = negate_generator(den, g);
      num = reduce_extensions(num * conj, *space_);
      den = reduce_extensions(den * conj, *space_);
      if (den.is_zero()) throw DivisionByZero();
    }
  }
  if (num.is_zero()) {
    num_ = {};
    den_ = Polynomial(1);
    return;
  }
  if (!den.is_constant()) {
    const Polynomial g = gcd(num, den);
    if (!g.is_constant()) {
      num = *num.divide_exact(g);
      den = *den.divide_exact(g);
    }
  }
  const Rational lc = den.lead().coeff;
  if (lc != 1) {
    const Rational inv = 1 / lc;
    num = num.scaled(inv);
    den = den.scaled(inv);
  }
  num_ = std::move(num);
  den_ = std::move(den);
}

Expression Expression::raw(SpacePtr space, Polynomial num, Polynomial den) {
  Expression e;
  e.space_ = std::move(space);
  e.num_ = std::move(num);
  e.den_ = std::move(den);
  return e;
}

Expression Expression::jet(SpacePtr space, JetVar v) {
  return raw(std::move(space), Polynomial(v), Polynomial(1));
}

Expression Expression::symbol(const SpacePtr& space, std::string_view name, std::string_view suffix) {
  return jet(space, space->jet(name, suffix));
}

Rational Expression::constant_value() const {
  assert(is_constant());
  return num_.constant_value() / den_.constant_value();
}

std::set<JetVar> Expression::jet_vars() const {
  auto vs = num_.variables();
  auto ds = den_.variables();
  vs.insert(ds.begin(), ds.end());
  return vs;
}

Expression Expression::operator-() const { return raw(space_, -num_, den_); }

Expression operator+(const Expression& a, const Expression& b) {
  if (a.is_zero()) return b.space() || !a.space() ? b : Expression::raw(a.space(), b.num_, b.den_);
  if (b.is_zero()) return a.space() || !b.space() ? a : Expression::raw(b.space(), a.num_, a.den_);
  SpacePtr sp = common_space(a, b);
  if (a.den_ == b.den_) {
    Polynomial num = a.num_ + b.num_;
    if (a.den_.is_constant()) return Expression::raw(sp, std::move(num), a.den_);
    return Expression(sp, std::move(num), a.den_);
  }
  const Polynomial g = gcd(a.den_, b.den_);
  if (g.is_constant()) {
    Polynomial num = a.num_ * b.den_ + b.num_ * a.den_;
    if (num.is_zero()) return Expression(sp, {}, Polynomial(1));
    Polynomial den = a.den_ * b.den_;
    const Rational lc = den.lead().coeff;
    if (lc != 1) {
      num = num.scaled(1 / lc);
      den = den.scaled(1 / lc);
    }
    return Expression::raw(sp, std::move(num), std::move(den));
  }
  const Polynomial da = *a.den_.divide_exact(g), db = *b.den_.divide_exact(g);
  Polynomial num = a.num_ * db + b.num_ * da;
  return Expression(sp, std::move(num), da * b.den_);
}

Expression operator-(const Expression& a, const Expression& b) { return a + (-b); }

Expression operator*(const Expression& a, const Expression& b) {
  SpacePtr sp = common_space(a, b);
  if (a.is_zero() || b.is_zero()) return Expression::raw(sp, {}, Polynomial(1));
  if (a.is_constant()) {
    return Expression::raw(sp, b.num_.scaled(a.constant_value()), b.den_);
  }
  if (b.is_constant()) {
    return Expression::raw(sp, a.num_.scaled(b.constant_value()), a.den_);
  }
  if (sp && has_extension(a.num_, *sp) && has_extension(b.num_, *sp))
    return Expression(sp, a.num_ * b.num_, a.den_ * b.den_);
  // cross-cancel first; the result is then already coprime
  const Polynomial g1 = a.den_.is_constant() ? Polynomial(1) : gcd(b.num_, a.den_);
  const Polynomial g2 = b.den_.is_constant() ? Polynomial(1) : gcd(a.num_, b.den_);
  const Polynomial an = g2.is_constant() ? a.num_ : *a.num_.divide_exact(g2);
  const Polynomial bd = g2.is_constant() ? b.den_ : *b.den_.divide_exact(g2);
  const Polynomial bn = g1.is_constant() ? b.num_ : *b.num_.divide_exact(g1);
  const Polynomial ad = g1.is_constant() ? a.den_ : *a.den_.divide_exact(g1);
  Polynomial num = an * bn;
  Polynomial den = ad * bd;
  const Rational lc = den.lead().coeff;
  if (lc != 1) {
    num = num.scaled(1 / lc);
    den = den.scaled(1 / lc);
  }
  return Expression::raw(sp, std::move(num), std::move(den));
}

Expression Expression::inverse() const {
  if (is_zero()) throw DivisionByZero();
  return Expression(space_, den_, num_);
}

Expression operator/(const Expression& a, const Expression& b) { return a * b.inverse(); }

Expression Expression::pow(int k) const {
  if (k < 0) return inverse().pow(-k);
  if (space_ && has_extension(num_, *space_)) {
    Expression r(1), base = *this;
    unsigned e = static_cast<unsigned>(k);
    while (e) {
      if (e & 1u) r = r * base;
      e >>= 1u;
      if (e) base = base * base;
    }
    return r;
  }
  return raw(space_, num_.pow(static_cast<unsigned>(k)), den_.pow(static_cast<unsigned>(k)));
}

// ------------------------------------------------------------------ printing

namespace {

std::string poly_to_string(const Polynomial& p, const Space* space) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    Rational c = t.coeff;
    const bool negative = sgn(c) < 0;
    if (negative) c = -c;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    bool need_star = false;
    if (t.monomial.is_one() || c != 1) {
      out += c.get_str();
      need_star = true;
    }
    for (const auto& [v, e] : t.monomial.factors()) {
      if (need_star) out += "*";
      out += space ? space->jet_name(v) : ("#" + std::to_string(v.key()));
      if (e > 1) out += "^" + std::to_string(e);
      need_star = true;
    }
  }
  return out;
}

}  // namespace

std::string Expression::to_string() const {
  const Space* sp = space_.get();
  if (den_.is_constant()) return poly_to_string(num_, sp);
  return "(" + poly_to_string(num_, sp) + ")/(" + poly_to_string(den_, sp) + ")";
}

std::ostream& operator<<(std::ostream& os, const Expression& e) { return os << e.to_string(); }

// ---------------------------------------------------------- differentiation

namespace {

// Total derivative of a polynomial; extension generators contribute rational terms.
Expression differentiate_poly(const Polynomial& p, VarId w, const SpacePtr& sp) {
  Polynomial plain;
  Expression ext_part;
  for (JetVar j : p.variables()) {
    const auto& sig = sp->field(j.field());
    switch (sig.kind) {
      case FieldKind::kConstant:
        break;
      case FieldKind::kField:
        if (sig.depends(w)) plain += p.partial(j) * Polynomial(j.differentiated(w));
        break;
      case FieldKind::kExtension: {
        // g^2 = R  =>  g' = g R' / (2 R)
        const Expression dr = differentiate_poly(sig.square, w, sp);
        if (dr.is_zero()) break;
        ext_part += Expression(sp, p.partial(j) * Polynomial(j), Polynomial(1)) * dr /
                    Expression(sp, sig.square.scaled(2), Polynomial(1));
        break;
      }
    }
  }
  Expression result(sp, std::move(plain), Polynomial(1));
  return ext_part.is_zero() ? result : result + ext_part;
}

}  // namespace

Expression differentiate(const Expression& e, VarId v) {
  if (e.is_constant() || !e.space()) return Expression(e.space(), {}, Polynomial(1));
  const SpacePtr& sp = e.space();
  if (v >= sp->variable_count()) throw DomainError("variable index out of range");
  const Expression dn = differentiate_poly(e.numerator(), v, sp);
  if (e.denominator().is_constant()) return dn;
  const Expression dd = differentiate_poly(e.denominator(), v, sp);
  const Polynomial& n = e.numerator();
  const Polynomial& d = e.denominator();
  if (dn.denominator().is_constant() && dd.denominator().is_constant()) {
    Polynomial num = dn.numerator() * d - n * dd.numerator();
    return Expression(sp, std::move(num), d * d);
  }
  const Expression ne(sp, n, Polynomial(1)), de(sp, d, Polynomial(1));
  return (dn * de - ne * dd) / (de * de);
}

Expression differentiate(const Expression& e, std::string_view variable) {
  if (!e.space()) return Expression();
  return differentiate(e, e.space()->variable(variable));
}

Expression differentiate(const Expression& e, std::initializer_list<std::string_view> variables) {
  Expression r = e;
  for (auto v : variables) r = differentiate(r, v);
  return r;
}

Expression normalize(const Expression& e) { return Expression(e.space(), e.numerator(), e.denominator()); }

// ------------------------------------------------------------- homomorphisms

Expression map_jets(const Expression& e, const SpacePtr& target,
                    const std::function<Expression(JetVar)>& image) {
  if (e.is_constant()) return Expression(target, e.numerator(), e.denominator());
  struct Image {
    Expression value;
    std::uint32_t max_degree = 0;
    std::vector<Polynomial> num_pow, den_pow;
  };
  std::unordered_map<JetVar, Image> images;
  auto account = [&](const Polynomial& p) {
    for (const auto& t : p.terms())
      for (const auto& [v, k] : t.monomial.factors()) {
        auto& img = images[v];
        img.max_degree = std::max(img.max_degree, k);
      }
  };
  account(e.numerator());
  account(e.denominator());
  for (auto& [v, img] : images) {
    img.value = image(v);
    if (img.value.space() && img.value.space() != target)
      throw DomainError("jet image lies outside the target space");
    img.num_pow.assign(img.max_degree + 1, Polynomial(1));
    img.den_pow.assign(img.max_degree + 1, Polynomial(1));
    for (std::uint32_t k = 1; k <= img.max_degree; ++k) {
      img.num_pow[k] = img.num_pow[k - 1] * img.value.numerator();
      img.den_pow[k] = img.den_pow[k - 1] * img.value.denominator();
    }
  }
  // Common multiplier prod_v den(v)^maxdeg(v) cancels between numerator and denominator.
  auto lift = [&](const Polynomial& p) {
    Polynomial out;
    for (const auto& t : p.terms()) {
      Polynomial term(t.coeff);
      for (const auto& [v, img] : images) {
        const auto k = t.monomial.degree_in(v);
        term = term * img.num_pow[k];
        if (!img.value.denominator().is_constant()) term = term * img.den_pow[img.max_degree - k];
      }
      out += term;
    }
    return out;
  };
  return Expression(target, lift(e.numerator()), lift(e.denominator()));
}

Expression substitute(const Expression& e, const std::map<FieldId, Expression>& replacements) {
  if (!e.space()) return e;
  const SpacePtr& sp = e.space();
  std::unordered_map<JetVar, Expression> cache;
  std::function<Expression(JetVar)> image = [&](JetVar j) -> Expression {
    auto rep = replacements.find(j.field());
    if (rep == replacements.end()) return Expression::jet(sp, j);
    if (auto it = cache.find(j); it != cache.end()) return it->second;
    Expression value;
    if (j.is_base()) {
      value = rep->second;
    } else {
      VarId w = 0;
      while (j.order(w) == 0) ++w;
      value = differentiate(image(j.integrated(w)), w);
    }
    cache.emplace(j, value);
    return value;
  };
  return map_jets(e, sp, image);
}

Expression substitute(const Expression& e, std::string_view field, const Expression& replacement) {
  return substitute(e, {{e.space()->field_id(field), replacement}});
}

// ---------------------------------------------------------------- evaluation

GaussianRational evaluate_exact(const Polynomial& p, const std::function<GaussianRational(JetVar)>& value) {
  std::unordered_map<JetVar, GaussianRational> vals;
  GaussianRational sum{0, 0};
  for (const auto& t : p.terms()) {
    GaussianRational term{t.coeff, 0};
    for (const auto& [v, k] : t.monomial.factors()) {
      auto it = vals.find(v);
      if (it == vals.end()) it = vals.emplace(v, value(v)).first;
      for (std::uint32_t i = 0; i < k; ++i) term = term * it->second;
    }
    sum = sum + term;
  }
  return sum;
}

double evaluate(const Expression& e, const std::function<double(JetVar)>& value) {
  auto eval = [&](const Polynomial& p) {
    double s = 0;
    for (const auto& t : p.terms()) {
      double term = t.coeff.get_d();
      for (const auto& [v, k] : t.monomial.factors()) {
        const double x = value(v);
        for (std::uint32_t i = 0; i < k; ++i) term *= x;
      }
      s += term;
    }
    return s;
  };
  return eval(e.numerator()) / eval(e.denominator());
}

}  // namespace chmr::jet
