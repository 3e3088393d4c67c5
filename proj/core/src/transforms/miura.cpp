#include <chrono>

#include "chmr/errors.hpp"
#include "chmr/transforms/transforms.hpp"

namespace chmr::transforms {

using jet::Expression;
using jet::JetVar;
using jet::RewriteSystem;
using jet::SpacePtr;
using jet::VarId;

namespace {

Expression D(const Expression& e, const jet::Space& sp, int i, int times = 1) {
  Expression r = e;
  for (int k = 0; k < times; ++k) r = jet::differentiate(r, sp.variable("z" + std::to_string(i)));
  return r;
}

}  // namespace

std::vector<Expression> cbs_potential_from_mcbs(const SpacePtr& sp, const Expression& x, int n) {
  const Expression x0 = D(x, *sp, 0);
  if (x0.is_zero()) throw DivisionByZero("x_z0 vanishes identically; the Miura map needs it invertible");
  std::vector<Expression> out;
  out.push_back((D(x0, *sp, 0) - x0 * x0 / 2) / 4);
  for (int i = 1; i <= n; ++i) {
    const Expression mi = D(x, *sp, i + 1) / x0 + D(D(x, *sp, i), *sp, 0, 2) / x0;
    out.push_back((D(x0, *sp, i) - mi) / 4);
  }
  return out;
}

std::vector<Expression> cbs_potential_from_x_form(const SpacePtr& sp, const Expression& X, int n) {
  const Expression X0 = D(X, *sp, 0);
  const Expression W = D(X0, *sp, 0) / X0 + X0;
  std::vector<Expression> out;
  out.push_back((D(W, *sp, 0) - W * W / 2) / 4);
  for (int i = 1; i <= n; ++i) out.push_back(-D(X, *sp, i + 1) / (4 * X0));
  return out;
}

Expression cbs_in_terms_of(const SpacePtr& sp, const std::vector<Expression>& m, int i) {
  const Expression residual = systems::cbs_residual(sp, "M", i);
  const jet::FieldId M = sp->field_id("M");
  const VarId z0 = sp->variable("z0");
  return jet::map_jets(residual, sp, [&](JetVar j) -> Expression {
    if (j.field() != M) return Expression::jet(sp, j);
    if (j.order(z0) >= 1) {
      Expression r = m.at(0);
      const JetVar rest = j.integrated(z0);
      for (VarId v = 0; v < sp->variable_count(); ++v)
        for (unsigned k = 0; k < rest.order(v); ++k) r = jet::differentiate(r, v);
      return r;
    }
    for (int k = 1; k < static_cast<int>(m.size()); ++k)
      if (j == JetVar(M).differentiated(sp->variable("z" + std::to_string(k)))) return m[k];
    throw DomainError("CBS residual needs " + sp->jet_name(j) + ", which the potential does not provide");
  });
}

Report verify_miura(int n, std::size_t max_steps) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.task = "miura";
  rep.n = n;
  const SpacePtr sp = systems::z_space(n, {"X", "x", "M"});
  const Expression X = Expression::symbol(sp, "X"), x = Expression::symbol(sp, "x");
  const Expression X0 = D(X, *sp, 0), x0 = D(x, *sp, 0);
  const Expression W = D(X0, *sp, 0) / X0 + X0;

  jet::Ranking ranking;
  ranking.then_fields(*sp, {"X", "x"});
  // x-form and mCBS, oriented on X_z0z0z0zi and x_z0z0z0zi
  RewriteSystem xform(sp, ranking), mcbs(sp, ranking);
  for (int i = 1; i <= n; ++i) {
    const std::string lead = "z0z0z0z" + std::to_string(i);
    xform.add(jet::orient(systems::x_form_residual(sp, "X", i), sp->jet("X", lead), xform, "X-form " + std::to_string(i)));
    mcbs.add(jet::orient(systems::mcbs_residual(sp, "x", i), sp->jet("x", lead), mcbs, "mCBS " + std::to_string(i)));
  }
  // the link between the two potentials
  RewriteSystem link(sp, ranking);
  link.add({sp->jet("x", "z0"), W, "x_z0 = X_z0z0/X_z0 + X_z0"});
  for (int i = 1; i <= n; ++i) {
    const Expression rel = D(X, *sp, i + 1) / X0 + D(x0, *sp, i) - D(D(x, *sp, i), *sp, 0, 2) / x0 - D(x, *sp, i + 1) / x0;
    link.add(jet::orient(rel, sp->jet("x", "z" + std::to_string(i + 1)), link,
                         "4M_" + std::to_string(i) + " = x_z0z" + std::to_string(i) + " - m_" + std::to_string(i)));
  }
  for (const auto& r : link.rules()) rep.add_hypothesis("link: " + sp->jet_name(r.lhs) + " -> " + r.rhs.to_string());
  rep.add_hypothesis("4M = x_z0 - m");
  rep.add_assumption("x_z0 != 0");
  rep.add_assumption("X_z0 != 0");

  std::size_t steps = 0;
  auto reduce = [&](const Expression& e, const RewriteSystem& rs) {
    jet::Reducer r(rs, max_steps);
    Expression out = r.reduce(e);
    steps += r.steps();
    return out;
  };
  RewriteSystem link_and_xform = link;
  link_and_xform.append(xform);

  try {
    const auto from_x = cbs_potential_from_x_form(sp, X, n);
    const auto from_m = cbs_potential_from_mcbs(sp, x, n);

    // 4 M_0 computed both ways agrees once x_z0 is the link value
    const Expression m0_gap = reduce(4 * from_x[0] - 4 * from_m[0], link);
    rep.residuals.push_back(ResidualOutcome::of("x_z0 = X_z0z0/X_z0 + X_z0 solves 4M_0 = x_z0z0 - m_0",
                                                m0_gap.is_zero(), m0_gap.to_string()));
    for (int i = 1; i <= n; ++i) {
      const std::string s = std::to_string(i);
      const Expression mi_gap = reduce(4 * from_x[i] - 4 * from_m[i], link);
      rep.residuals.push_back(ResidualOutcome::of("4M_" + s + " agrees under the link", mi_gap.is_zero(), mi_gap.to_string()));

      const Expression mcbs_under_link = reduce(systems::mcbs_residual(sp, "x", i), link_and_xform);
      rep.residuals.push_back(ResidualOutcome::of("mCBS " + s + " follows from the X-form under the link",
                                                  mcbs_under_link.is_zero(), mcbs_under_link.to_string()));

      const Expression cbs_m = reduce(cbs_in_terms_of(sp, from_m, i), mcbs);
      rep.residuals.push_back(ResidualOutcome::of("CBS " + s + " with 4M = x_z0 - m, modulo mCBS", cbs_m.is_zero(),
                                                  cbs_m.to_string()));

      const Expression cbs_x = reduce(cbs_in_terms_of(sp, from_x, i), xform);
      rep.residuals.push_back(ResidualOutcome::of("CBS " + s + " with M from the X-form, modulo the X-form",
                                                  cbs_x.is_zero(), cbs_x.to_string()));
    }
  } catch (const BudgetExhausted&) {
    rep.budget_exhausted = true;
  }
  rep.steps = steps;
  rep.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace chmr::transforms
