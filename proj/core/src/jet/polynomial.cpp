#include "chmr/jet/polynomial.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_map>

namespace chmr::jet {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(JetVar v, std::uint32_t exp) {
  if (exp > 0) factors_.emplace_back(v, exp);
}

std::uint32_t Monomial::degree() const {
  std::uint32_t d = 0;
  for (const auto& [v, e] : factors_) d += e;
  return d;
}

std::uint32_t Monomial::degree_in(JetVar v) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                             [](const Factor& f, JetVar x) { return f.first < x; });
  return (it != factors_.end() && it->first == v) ? it->second : 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.factors_.empty()) return *this;
  if (factors_.empty()) return other;
  Monomial r;
  r.factors_.reserve(factors_.size() + other.factors_.size());
  auto a = factors_.begin(), ae = factors_.end();
  auto b = other.factors_.begin(), be = other.factors_.end();
  while (a != ae && b != be) {
    if (a->first < b->first) {
      r.factors_.push_back(*a++);
    } else if (b->first < a->first) {
      r.factors_.push_back(*b++);
    } else {
      r.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  r.factors_.insert(r.factors_.end(), a, ae);
  r.factors_.insert(r.factors_.end(), b, be);
  return r;
}

Monomial Monomial::operator/(const Monomial& other) const {
  Monomial r;
  r.factors_.reserve(factors_.size());
  auto b = other.factors_.begin(), be = other.factors_.end();
  for (const auto& f : factors_) {
    if (b != be && b->first == f.first) {
      assert(f.second >= b->second);
      if (f.second > b->second) r.factors_.emplace_back(f.first, f.second - b->second);
      ++b;
    } else {
      r.factors_.push_back(f);
    }
  }
  assert(b == be);
  return r;
}

bool Monomial::divides(const Monomial& other) const {
  auto b = other.factors_.begin(), be = other.factors_.end();
  for (const auto& f : factors_) {
    while (b != be && b->first < f.first) ++b;
    if (b == be || b->first != f.first || b->second < f.second) return false;
  }
  return true;
}

Monomial Monomial::gcd(const Monomial& other) const {
  Monomial r;
  auto a = factors_.begin(), ae = factors_.end();
  auto b = other.factors_.begin(), be = other.factors_.end();
  while (a != ae && b != be) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      r.factors_.emplace_back(a->first, std::min(a->second, b->second));
      ++a;
      ++b;
    }
  }
  return r;
}

Monomial Monomial::without(JetVar v) const {
  Monomial r;
  r.factors_.reserve(factors_.size());
  for (const auto& f : factors_)
    if (f.first != v) r.factors_.push_back(f);
  return r;
}

int Monomial::compare(const Monomial& a, const Monomial& b) {
  const auto da = a.degree(), db = b.degree();
  if (da != db) return da > db ? 1 : -1;
  auto ia = a.factors_.rbegin(), iae = a.factors_.rend();
  auto ib = b.factors_.rbegin(), ibe = b.factors_.rend();
  for (; ia != iae && ib != ibe; ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first > ib->first ? 1 : -1;
    if (ia->second != ib->second) return ia->second > ib->second ? 1 : -1;
  }
  if (ia != iae) return 1;
  if (ib != ibe) return -1;
  return 0;
}

std::size_t Monomial::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (const auto& [v, e] : factors_) {
    h ^= v.key() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= e + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

// -------------------------------------------------------------- Polynomial

namespace {

bool term_before(const Term& a, const Term& b) { return Monomial::compare(a.monomial, b.monomial) > 0; }

}  // namespace

// Inputs may come from mpq_class(p, q), which does not reduce the fraction.
Polynomial::Polynomial(const Rational& c) {
  if (sgn(c) != 0) {
    terms_.push_back({Monomial{}, c});
    terms_.back().coeff.canonicalize();
  }
}

Polynomial::Polynomial(JetVar v, std::uint32_t exp) { terms_.push_back({Monomial(v, exp), Rational(1)}); }

Polynomial::Polynomial(Monomial m, Rational c) {
  if (sgn(c) != 0) {
    c.canonicalize();
    terms_.push_back({std::move(m), std::move(c)});
  }
}

Polynomial Polynomial::from_terms(std::vector<Term> terms) {
  Polynomial p;
  p.terms_ = std::move(terms);
  p.canonicalize();
  return p;
}

void Polynomial::canonicalize() {
  for (auto& t : terms_) t.coeff.canonicalize();
  std::sort(terms_.begin(), terms_.end(), term_before);
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && out.back().monomial == t.monomial) {
      out.back().coeff += t.coeff;
    } else {
      if (!out.empty() && sgn(out.back().coeff) == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && sgn(out.back().coeff) == 0) out.pop_back();
  terms_ = std::move(out);
}

Rational Polynomial::constant_value() const {
  assert(is_constant());
  return terms_.empty() ? Rational(0) : terms_[0].coeff;
}

std::set<JetVar> Polynomial::variables() const {
  std::set<JetVar> vs;
  for (const auto& t : terms_)
    for (const auto& f : t.monomial.factors()) vs.insert(f.first);
  return vs;
}

bool Polynomial::contains(JetVar v) const {
  for (const auto& t : terms_)
    if (t.monomial.degree_in(v) > 0) return true;
  return false;
}

std::uint32_t Polynomial::degree_in(JetVar v) const {
  std::uint32_t d = 0;
  for (const auto& t : terms_) d = std::max(d, t.monomial.degree_in(v));
  return d;
}

std::uint32_t Polynomial::total_degree() const {
  return terms_.empty() ? 0 : terms_.front().monomial.degree();
}

std::map<std::uint32_t, Polynomial> Polynomial::coefficients_in(JetVar v) const {
  std::map<std::uint32_t, std::vector<Term>> buckets;
  for (const auto& t : terms_) {
    const auto e = t.monomial.degree_in(v);
    buckets[e].push_back({e ? t.monomial.without(v) : t.monomial, t.coeff});
  }
  std::map<std::uint32_t, Polynomial> out;
  for (auto& [e, ts] : buckets) out.emplace(e, from_terms(std::move(ts)));
  return out;
}

Polynomial Polynomial::coefficient_in(JetVar v, std::uint32_t exp) const {
  std::vector<Term> ts;
  for (const auto& t : terms_)
    if (t.monomial.degree_in(v) == exp) ts.push_back({t.monomial.without(v), t.coeff});
  return from_terms(std::move(ts));
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

namespace {

std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, bool subtract) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin(), ae = a.end();
  auto ib = b.begin(), be = b.end();
  while (ia != ae && ib != be) {
    const int c = Monomial::compare(ia->monomial, ib->monomial);
    if (c > 0) {
      out.push_back(*ia++);
    } else if (c < 0) {
      out.push_back({ib->monomial, subtract ? Rational(-ib->coeff) : ib->coeff});
      ++ib;
    } else {
      Rational s = subtract ? Rational(ia->coeff - ib->coeff) : Rational(ia->coeff + ib->coeff);
      if (sgn(s) != 0) out.push_back({ia->monomial, std::move(s)});
      ++ia;
      ++ib;
    }
  }
  for (; ia != ae; ++ia) out.push_back(*ia);
  for (; ib != be; ++ib) out.push_back({ib->monomial, subtract ? Rational(-ib->coeff) : ib->coeff});
  return out;
}

}  // namespace

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge(terms_, o.terms_, false);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge(terms_, o.terms_, true);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.is_monomial()) return b.times_monomial(a.terms_[0].monomial, a.terms_[0].coeff);
  if (b.is_monomial()) return a.times_monomial(b.terms_[0].monomial, b.terms_[0].coeff);
  std::unordered_map<Monomial, Rational, MonomialHash> acc;
  acc.reserve(a.size() * b.size());
  Rational prod;
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      prod = ta.coeff * tb.coeff;
      auto [it, inserted] = acc.try_emplace(ta.monomial * tb.monomial, prod);
      if (!inserted) it->second += prod;
    }
  }
  std::vector<Term> ts;
  ts.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (sgn(c) != 0) ts.push_back({m, std::move(c)});
  Polynomial r;
  r.terms_ = std::move(ts);
  std::sort(r.terms_.begin(), r.terms_.end(), term_before);
  return r;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  if (sgn(c) == 0) return {};
  Polynomial r = *this;
  for (auto& t : r.terms_) t.coeff *= c;
  return r;
}

Polynomial Polynomial::times_monomial(const Monomial& m, const Rational& c) const {
  if (sgn(c) == 0) return {};
  Polynomial r;
  r.terms_.reserve(terms_.size());
  // multiplication by a monomial preserves the graded order
  for (const auto& t : terms_) r.terms_.push_back({t.monomial * m, t.coeff * c});
  return r;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial result(1), base = *this;
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return result;
}

bool Polynomial::operator==(const Polynomial& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (!(terms_[i].monomial == o.terms_[i].monomial) || terms_[i].coeff != o.terms_[i].coeff) return false;
  return true;
}

Polynomial Polynomial::partial(JetVar v) const {
  std::vector<Term> ts;
  for (const auto& t : terms_) {
    const auto e = t.monomial.degree_in(v);
    if (e == 0) continue;
    ts.push_back({t.monomial / Monomial(v), t.coeff * e});
  }
  return from_terms(std::move(ts));
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& d) const {
  assert(!d.is_zero());
  if (is_zero()) return Polynomial{};
  if (d.is_monomial()) {
    const auto& [dm, dc] = d.terms_[0];
    Polynomial q;
    q.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
      if (!dm.divides(t.monomial)) return std::nullopt;
      q.terms_.push_back({t.monomial / dm, t.coeff / dc});
    }
    return q;
  }
  Polynomial q, r = *this;
  const Term& ld = d.lead();
  while (!r.is_zero()) {
    const Term& lr = r.lead();
    if (!ld.monomial.divides(lr.monomial)) return std::nullopt;
    if (lr.monomial.degree() < ld.monomial.degree()) return std::nullopt;
    Monomial qm = lr.monomial / ld.monomial;
    Rational qc = lr.coeff / ld.coeff;
    r -= d.times_monomial(qm, qc);
    q.terms_.push_back({std::move(qm), std::move(qc)});
  }
  return q;
}

Monomial Polynomial::monomial_content() const {
  if (terms_.empty()) return {};
  Monomial g = terms_[0].monomial;
  for (std::size_t i = 1; i < terms_.size() && !g.is_one(); ++i) g = g.gcd(terms_[i].monomial);
  return g;
}

Polynomial Polynomial::monic() const {
  if (terms_.empty() || terms_[0].coeff == 1) return *this;
  Rational inv = 1 / terms_[0].coeff;
  return scaled(inv);
}

Polynomial Polynomial::substitute(JetVar v, const Polynomial& value) const {
  auto coeffs = coefficients_in(v);
  if (coeffs.size() == 1 && coeffs.begin()->first == 0) return *this;
  Polynomial result;
  // Horner from the top exponent down
  std::uint32_t prev = coeffs.rbegin()->first;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    result = result * value.pow(prev - it->first) + it->second;
    prev = it->first;
  }
  return result * value.pow(prev);
}

Polynomial Polynomial::rename(const std::function<JetVar(JetVar)>& f) const {
  std::vector<Term> ts;
  ts.reserve(terms_.size());
  for (const auto& t : terms_) {
    Monomial m;
    for (const auto& [v, e] : t.monomial.factors()) m = m * Monomial(f(v), e);
    ts.push_back({std::move(m), t.coeff});
  }
  return from_terms(std::move(ts));
}

std::size_t Polynomial::hash() const {
  std::size_t h = terms_.size();
  for (const auto& t : terms_) h ^= t.monomial.hash() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

// --------------------------------------------------------------------- gcd

Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, JetVar v) {
  const auto db = b.degree_in(v);
  const Polynomial lb = b.coefficient_in(v, db);
  Polynomial r = a;
  while (!r.is_zero()) {
    const auto dr = r.degree_in(v);
    if (dr < db) break;
    const Polynomial lr = r.coefficient_in(v, dr);
    r = lb * r - (lr * b).times_monomial(Monomial(v, dr - db), Rational(1));
  }
  return r;
}

namespace {

Polynomial gcd_impl(const Polynomial& a, const Polynomial& b);

Polynomial content_in(const Polynomial& p, JetVar v) {
  auto coeffs = p.coefficients_in(v);
  Polynomial g;
  for (auto& [e, c] : coeffs) {
    g = g.is_zero() ? c.monic() : gcd_impl(g, c);
    if (g.is_constant()) return Polynomial(1);
  }
  return g;
}

Polynomial primitive_part_in(const Polynomial& p, JetVar v) {
  const Polynomial c = content_in(p, v);
  if (c.is_constant()) return p.monic();
  return p.divide_exact(c)->monic();
}

Polynomial gcd_monomial_with(const Monomial& m, const Polynomial& p) {
  Monomial g = m;
  for (const auto& t : p.terms()) {
    if (g.is_one()) break;
    g = g.gcd(t.monomial);
  }
  return Polynomial(g, Rational(1));
}

// Both arguments nonzero and free of monomial content.
Polynomial gcd_primitive(const Polynomial& a, const Polynomial& b) {
  if (a.is_constant() || b.is_constant()) return Polynomial(1);
  if (a == b) return a.monic();
  if (a.size() <= b.size()) {
    if (b.divide_exact(a)) return a.monic();
  } else if (a.divide_exact(b)) {
    return b.monic();
  }
  const auto va = a.variables(), vb = b.variables();
  // A variable present in only one operand cannot occur in the gcd.
  for (const auto& v : va) {
    if (!vb.count(v)) {
      Polynomial g = b;
      for (auto& [e, c] : a.coefficients_in(v)) {
        g = gcd_impl(c, g);
        if (g.is_constant()) return Polynomial(1);
      }
      return g;
    }
  }
  for (const auto& v : vb) {
    if (!va.count(v)) {
      Polynomial g = a;
      for (auto& [e, c] : b.coefficients_in(v)) {
        g = gcd_impl(c, g);
        if (g.is_constant()) return Polynomial(1);
      }
      return g;
    }
  }
  // main variable: smallest combined degree
  JetVar main = *va.begin();
  std::uint32_t best = ~0u;
  for (const auto& v : va) {
    const auto d = a.degree_in(v) + b.degree_in(v);
    if (d < best) {
      best = d;
      main = v;
    }
  }
  const Polynomial ca = content_in(a, main), cb = content_in(b, main);
  const Polynomial c = gcd_impl(ca, cb);
  Polynomial pa = ca.is_constant() ? a : *a.divide_exact(ca);
  Polynomial pb = cb.is_constant() ? b : *b.divide_exact(cb);
  if (pa.degree_in(main) < pb.degree_in(main)) std::swap(pa, pb);
  pb = pb.monic();
  Polynomial g;
  for (;;) {
    Polynomial r = pseudo_remainder(pa, pb, main);
    if (r.is_zero()) {
      g = pb;
      break;
    }
    if (r.degree_in(main) == 0) {
      g = Polynomial(1);
      break;
    }
    pa = std::move(pb);
    pb = primitive_part_in(r, main);
  }
  return (c * g).monic();
}

Polynomial gcd_impl(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Polynomial(1);
  if (a.is_monomial()) return gcd_monomial_with(a.lead().monomial, b);
  if (b.is_monomial()) return gcd_monomial_with(b.lead().monomial, a);
  const Monomial ma = a.monomial_content(), mb = b.monomial_content();
  const Monomial mg = ma.gcd(mb);
  const Polynomial a1 = ma.is_one() ? a : *a.divide_exact(Polynomial(ma, Rational(1)));
  const Polynomial b1 = mb.is_one() ? b : *b.divide_exact(Polynomial(mb, Rational(1)));
  Polynomial g = gcd_primitive(a1, b1);
  if (!mg.is_one()) g = g.times_monomial(mg, Rational(1));
  return g.monic();
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) { return gcd_impl(a, b); }

}  // namespace chmr::jet
