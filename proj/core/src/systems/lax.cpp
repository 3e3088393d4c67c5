#include <algorithm>
#include <chrono>

#include "chmr/errors.hpp"
#include "chmr/systems/systems.hpp"

namespace chmr::systems {

using jet::Expression;
using jet::JetVar;
using jet::RewriteSystem;
using jet::SpacePtr;

Expression LaxRow::rhs() const {
  if (terms.empty()) return Expression(0);
  const SpacePtr& sp = terms.front().coefficient.space();
  Expression r(0);
  for (const auto& t : terms) r += t.coefficient * Expression::jet(sp, t.wave);
  return r;
}

std::size_t LaxPair::coefficient_count() const {
  std::size_t k = 0;
  for (const auto& row : spatial) k += row.terms.size();
  for (const auto& row : temporal) k += row.terms.size();
  return k;
}

namespace {

template <typename F>
void for_each_term(const LaxPair& lax, F&& f) {
  std::size_t k = 0;
  for (const auto* rows : {&lax.spatial, &lax.temporal})
    for (const auto& row : *rows)
      for (const auto& t : row.terms) f(k++, row, t);
}

}  // namespace

std::string LaxPair::coefficient_label(std::size_t k) const {
  std::string label;
  for_each_term(*this, [&](std::size_t i, const LaxRow& row, const LaxTerm& t) {
    if (i == k) label = space->jet_name(row.lhs) + " <- (" + t.coefficient.to_string() + ")*" + space->jet_name(t.wave);
  });
  if (label.empty()) throw DomainError("Lax coefficient index out of range");
  return label;
}

LaxPair LaxPair::with_flipped_sign(std::size_t k) const {
  if (k >= coefficient_count()) throw DomainError("Lax coefficient index out of range");
  LaxPair out = *this;
  std::size_t i = 0;
  for (auto* rows : {&out.spatial, &out.temporal})
    for (auto& row : *rows)
      for (auto& t : row.terms)
        if (i++ == k) t.coefficient = -t.coefficient;
  return out;
}

LaxPair build_ch_lax(int n) {
  if (n < 1) throw DomainError("component count n must be at least 1, got " + std::to_string(n));
  LaxPair lax;
  lax.kind = LaxPair::Kind::kScalar;
  lax.n = n;
  lax.space = ch_space(n);
  const auto& sp = lax.space;
  auto F = [&](const std::string& name) { return Expression::symbol(sp, name); };
  const Expression lam = F("lam"), U = F("U");
  Expression C(0);
  for (int i = 1; i <= n; ++i) C += lam.pow(n - i) * F("Om" + std::to_string(i));
  const Expression quarter(jet::Rational(1, 4));

  const JetVar phi = sp->jet("Phi");
  lax.waves = {phi.field()};
  lax.spatial.push_back({sp->jet("Phi", "XX"), {{-quarter * lam * U, phi}, {quarter, phi}}});
  lax.temporal.push_back({sp->jet("Phi", "T"),
                          {{lam.pow(n), sp->jet("Phi", "Y")},
                           {lam * C / 2, sp->jet("Phi", "X")},
                           {-quarter * lam * jet::differentiate(C, "X"), phi}}});
  lax.spectral = spectral_conditions(sp, hierarchy_ranking(*sp, {"Delta"}), n, "T", "Y");
  lax.definitions.emplace_back("U", F("P").pow(2));
  return lax;
}

LaxPair build_mch_lax(int n) {
  if (n < 1) throw DomainError("component count n must be at least 1, got " + std::to_string(n));
  LaxPair lax;
  lax.kind = LaxPair::Kind::kMatrix;
  lax.n = n;
  lax.space = mch_space(n);
  const auto& sp = lax.space;
  auto F = [&](const std::string& name) { return Expression::symbol(sp, name); };
  const Expression lam = F("lam"), u = F("u"), Is = F("I") * F("s");
  Expression a(0), b(0);
  for (int i = 1; i <= n; ++i) {
    a += lam.pow(n - i) * F("om" + std::to_string(i));
    b += lam.pow(n - i) * F("v" + std::to_string(i));
  }
  const Expression bx = jet::differentiate(b, "x"), bxx = jet::differentiate(bx, "x");
  const Expression half(jet::Rational(1, 2));

  const JetVar f = sp->jet("phi"), g = sp->jet("phih");
  lax.waves = {f.field(), g.field()};
  lax.spatial.push_back({sp->jet("phi", "x"), {{-half, f}, {half * Is * u, g}}});
  lax.spatial.push_back({sp->jet("phih", "x"), {{half * Is * u, f}, {half, g}}});
  lax.temporal.push_back({sp->jet("phi", "t"),
                          {{lam.pow(n), sp->jet("phi", "y")},
                           {lam * a, sp->jet("phi", "x")},
                           {half * Is * bxx, g},
                           {-half * Is * bx, g}}});
  lax.temporal.push_back({sp->jet("phih", "t"),
                          {{lam.pow(n), sp->jet("phih", "y")},
                           {lam * a, sp->jet("phih", "x")},
                           {half * Is * bxx, f},
                           {half * Is * bx, f}}});
  lax.spectral = spectral_conditions(sp, hierarchy_ranking(*sp, {"delta"}), n, "t", "y");
  return lax;
}

namespace {

Expression apply_definitions(Expression e, const LaxPair& lax) {
  for (const auto& [name, repl] : lax.definitions) e = jet::substitute(e, name, repl);
  return e;
}

/// Differentiates e by the orders of `by` relative to its base field.
Expression differentiate_by(const Expression& e, JetVar by) {
  Expression r = e;
  for (jet::VarId v = 0; v < jet::JetVar::kMaxVars; ++v)
    for (unsigned k = 0; k < by.order(v); ++k) r = jet::differentiate(r, v);
  return r;
}

std::string monomial_label(const jet::Space& sp, const jet::Monomial& m) {
  if (m.is_one()) return "1";
  std::string s;
  for (const auto& [v, k] : m.factors()) {
    if (!s.empty()) s += "*";
    s += sp.jet_name(v);
    if (k > 1) s += "^" + std::to_string(k);
  }
  return s;
}

}  // namespace

Report check_lax_compatibility(const LaxPair& lax, const EquationSystem& sys, std::size_t max_steps) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.task = lax.kind == LaxPair::Kind::kScalar ? "lax-ch" : "lax-mch";
  rep.n = lax.n;
  if (lax.space->to_catalog_text() != sys.space->to_catalog_text())
    throw DomainError("Lax pair and system are declared over different catalogs");
  for (const auto& r : sys.orientation.rules()) rep.add_hypothesis(sys.name + ": " + r.provenance);
  for (const auto& r : lax.spectral.rules()) rep.add_hypothesis(r.provenance);
  for (const auto& [name, repl] : lax.definitions) rep.add_hypothesis(name + " = " + repl.to_string());
  for (const auto& a : sys.assumptions) rep.add_assumption(a);

  // Rewrite everything over the system's space so expressions combine.
  const SpacePtr& sp = sys.space;
  auto rehome = [&](const Expression& e) {
    return jet::map_jets(e, sp, [&](JetVar j) { return Expression::jet(sp, j); });
  };

  RewriteSystem rs(sp, sys.orientation.ranking());
  rs.append(sys.orientation);
  for (const auto& r : lax.spectral.rules()) rs.add({r.lhs, rehome(r.rhs), r.provenance});
  std::vector<std::pair<JetVar, Expression>> spatial, temporal;
  for (const auto& row : lax.temporal) {
    temporal.emplace_back(row.lhs, rehome(apply_definitions(row.rhs(), lax)));
    rs.add({row.lhs, temporal.back().second, "wave " + sp->jet_name(row.lhs)});
  }
  for (const auto& row : lax.spatial) {
    spatial.emplace_back(row.lhs, rehome(apply_definitions(row.rhs(), lax)));
    rs.add({row.lhs, spatial.back().second, "wave " + sp->jet_name(row.lhs)});
  }
  for (const auto& r : rs.rules())
    for (const auto& a : division_assumptions(r.rhs)) rep.add_assumption(a);

  std::vector<JetVar> extensions;
  for (jet::FieldId f = 0; f < sp->field_count(); ++f)
    if (sp->field(f).kind == jet::FieldKind::kExtension) extensions.emplace_back(f);

  // Wave jets below the order of each spatial row: the basis the coefficients split over.
  std::vector<JetVar> basis;
  for (const auto& [slhs, srhs] : spatial)
    for (jet::VarId v = 0; v < sp->variable_count(); ++v)
      for (unsigned k = 0; k < slhs.order(v); ++k) basis.push_back(slhs.base().differentiated(v, k));

  jet::Reducer reducer(rs, max_steps);
  try {
    for (const auto& [slhs, srhs] : spatial) {
      const auto trow = std::find_if(temporal.begin(), temporal.end(),
                                     [&](const auto& t) { return t.first.field() == slhs.field(); });
      if (trow == temporal.end()) throw DomainError("no temporal row for " + sp->jet_name(slhs));
      const JetVar tlhs = trow->first;
      const Expression cross = differentiate_by(srhs, tlhs) - differentiate_by(trow->second, slhs);
      const Expression reduced = reducer.reduce(cross);
      const std::string comp = "(" + sp->jet_name(slhs) + ")_" + sp->jet_name(tlhs).substr(sp->jet_name(tlhs).find('_') + 1);
      auto coefficients = jet::linear_coefficients(reduced, lax.waves);
      // Every wave jet the linear problem leaves irreducible gets a line, zero or not.
      for (JetVar b : basis) coefficients.try_emplace(b, Expression(0));
      for (const auto& [wave, coeff] : coefficients) {
        const std::string wname = wave == jet::kNoJet ? "free part" : sp->jet_name(wave);
        if (coeff.is_zero()) {
          rep.residuals.push_back(ResidualOutcome::of(comp + " coefficient of " + wname, true, "0"));
          continue;
        }
        if (wave != jet::kNoJet) {
          for (JetVar w : coeff.jet_vars())
            if (std::find(lax.waves.begin(), lax.waves.end(), w.field()) != lax.waves.end())
              throw DomainError("wave derivative " + sp->jet_name(w) + " is not expressible via the linear problem");
        }
        // split further by powers of the extension generators
        std::vector<std::pair<jet::Monomial, jet::Polynomial>> parts{{jet::Monomial{}, coeff.numerator()}};
        for (JetVar g : extensions) {
          std::vector<std::pair<jet::Monomial, jet::Polynomial>> next;
          for (const auto& [mono, poly] : parts)
            for (const auto& [k, c] : poly.coefficients_in(g))
              next.emplace_back(k ? mono * jet::Monomial(g, k) : mono, c);
          parts = std::move(next);
        }
        for (const auto& [mono, poly] : parts) {
          const Expression part(sp, poly, coeff.denominator());
          std::string label = comp + " coefficient of " + wname;
          if (!extensions.empty()) label += " at " + monomial_label(*sp, mono);
          rep.residuals.push_back(ResidualOutcome::of(label, part.is_zero(), part.to_string()));
        }
      }
    }
  } catch (const BudgetExhausted&) {
    rep.budget_exhausted = true;
  }
  rep.steps = reducer.steps();
  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace chmr::systems
