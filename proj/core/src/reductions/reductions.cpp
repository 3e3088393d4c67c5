#include "chmr/reductions/reductions.hpp"

#include <chrono>

#include "chmr/errors.hpp"
#include "chmr/systems/systems.hpp"
#include "chmr/transforms/transforms.hpp"

namespace chmr::reductions {

using jet::Expression;
using jet::JetVar;
using jet::SpacePtr;
using jet::VarId;

namespace {

Expression D(const Expression& e, std::string_view v, int times = 1) {
  Expression r = e;
  for (int k = 0; k < times; ++k) r = jet::differentiate(r, v);
  return r;
}

/// Jets linear in `var` with no other derivative go to `slope`, every other
/// derivative in it to 0; the result is then carried over to `target`.
Expression linear_in(const Expression& e, const SpacePtr& target, const std::string& var, const Expression& slope) {
  const SpacePtr& from = e.space();
  const VarId v = from->variable(var);
  const Expression s = jet::map_jets(e, from, [&](JetVar j) -> Expression {
    if (j.order(v) == 0) return Expression::jet(from, j);
    if (j.order(v) == 1 && j.integrated(v).is_base()) return slope;
    return Expression(0);
  });
  return specialize(s, target, {});
}

class Collector {
 public:
  explicit Collector(Report& rep) : rep_(rep) {}
  void zero(const std::string& label, const Expression& gap) {
    rep_.residuals.push_back(ResidualOutcome::of(label, gap.is_zero(), gap.to_string()));
  }
  void nonzero(const std::string& label, const Expression& e) {
    auto o = ResidualOutcome::of(label, e.is_zero(), e.to_string());
    o.expect_zero = false;
    rep_.residuals.push_back(o);
  }

 private:
  Report& rep_;
};

}  // namespace

Expression specialize(const Expression& e, const SpacePtr& target, const VariableIdentification& vars) {
  if (!e.space()) return Expression(target, e.numerator());
  const jet::Space& from = *e.space();
  return jet::map_jets(e, target, [&](JetVar j) -> Expression {
    const auto f = target->find_field(from.field(j.field()).name);
    if (!f) throw DomainError("specialization target has no field " + from.field(j.field()).name);
    JetVar r(*f);
    for (VarId v = 0; v < from.variable_count(); ++v) {
      if (!j.order(v)) continue;
      const std::string& name = from.variable_name(v);
      const auto it = vars.find(name);
      const std::optional<std::string> to = it == vars.end() ? std::optional<std::string>(name) : it->second;
      if (!to) return Expression(0);
      const VarId w = target->variable(*to);
      if (!target->field(*f).depends(w)) return Expression(0);
      r = r.differentiated(w, j.order(v));
    }
    return Expression::jet(target, r);
  });
}

SpacePtr dym_space() {
  return jet::parse_catalog(
      "var X, T\nconst k1\nfield U(X, T)\nfield P(X, T)\nfield Om1(X, T)\nfield Delta(X, T)\nnonzero P\nnonzero U\n");
}

SpacePtr qiao_space() {
  return jet::parse_catalog(
      "var x, t\nconst k2\nfield u(x, t)\nfield v1(x, t)\nfield om1(x, t)\nfield delta(x, t)\nnonzero u\n");
}

SpacePtr ch_line_space() {
  return jet::parse_catalog(
      "var X, Y\nfield U(X, Y)\nfield P(X, Y)\nfield Om1(X, Y)\nfield Delta(X, Y)\nnonzero P\nnonzero U\n");
}

SpacePtr mch_line_space() {
  return jet::parse_catalog(
      "var x, y\nfield u(x, y)\nfield v1(x, y)\nfield om1(x, y)\nfield delta(x, y)\nnonzero u\n");
}

Expression dym_residual(const SpacePtr& sp, const Expression& k) {
  const Expression r = 1 / Expression::symbol(sp, "P");
  return Expression::symbol(sp, "U", "T") - k * (D(r, "X", 3) - D(r, "X"));
}

Expression qiao_residual(const SpacePtr& sp, const Expression& k) {
  const Expression w = 1 / (2 * Expression::symbol(sp, "u").pow(2));
  return Expression::symbol(sp, "u", "t") - k * D(D(w, "x", 2) - w, "x");
}

Expression ch_residual(const SpacePtr& sp) {
  const Expression U = Expression::symbol(sp, "U"), Om = Expression::symbol(sp, "Om1");
  return D(U, "Y") + U * D(Om, "X") + Om * D(U, "X") / 2;
}

Expression potential_kdv_residual(const SpacePtr& sp, const std::string& field) {
  const Expression M0 = D(Expression::symbol(sp, field), "z0");
  return D(D(Expression::symbol(sp, field), "z2") + D(M0, "z0", 2) + 6 * M0 * M0, "z0");
}

Expression potential_mkdv_residual(const SpacePtr& sp, const std::string& field) {
  const Expression x0 = D(Expression::symbol(sp, field), "z0");
  return D(Expression::symbol(sp, field), "z2") + D(x0, "z0", 2) - x0.pow(3) / 2;
}

Expression akns_residual(const SpacePtr& sp, const std::string& field) {
  const Expression M = Expression::symbol(sp, field);
  const Expression M0 = D(M, "z0"), M1 = D(M, "z1");
  return D(D(M0, "z0", 2), "z1") + 4 * M1 * D(M0, "z0") + 8 * M0 * D(M0, "z1");
}

Expression modified_akns_residual(const SpacePtr& sp, const std::string& field) {
  const Expression x0 = D(Expression::symbol(sp, field), "z0");
  return D((D(D(x0, "z0"), "z1") - 1) / x0, "z0") - D(x0 * x0 / 2, "z1");
}

Report reduce_case1(std::size_t max_steps) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.task = "reduction-y-independent";
  rep.n = 1;
  Collector c(rep);
  rep.add_assumption("first component only, no dependence on Y and y");
  rep.add_assumption("additive integration constants set to zero");
  rep.add_assumption("P > 0, so sqrt(U) = P");

  // CH side
  const SpacePtr ds = dym_space();
  const auto ch = systems::build_ch_system(1);
  const VariableIdentification no_y{{"Y", std::nullopt}};
  auto chs = [&](const std::string& label) { return specialize(ch.equation(label).residual, ds, no_y); };
  const Expression P = Expression::symbol(ds, "P"), k1 = Expression::symbol(ds, "k1");
  const jet::FieldId Om1 = ds->field_id("Om1"), U = ds->field_id("U");
  const Expression om1_value = k1 / P;
  rep.add_hypothesis("CH(2+1) n = 1 with d/dY = 0");
  c.zero("(P Om1 - k1)_X = 2 (P_Y + (P Om1)_X/2) at P_Y = 0", D(P * Expression::symbol(ds, "Om1") - k1, "X") - 2 * chs("P_Y"));
  c.zero("Om1 = k1/P solves (P Om1)_X = 0", jet::substitute(chs("P_Y"), {{Om1, om1_value}}));
  c.zero("U_T = k1[(1/sqrt(U))_XXX - (1/sqrt(U))_X] with Om1 = k1/P",
         jet::substitute(chs("P_T"), {{Om1, om1_value}}) - jet::substitute(dym_residual(ds, k1), {{U, P * P}}));

  // mCH side
  const SpacePtr qs = qiao_space();
  const auto mch = systems::build_mch_system(1);
  auto mchs = [&](const std::string& label) {
    return specialize(mch.equation(label).residual, qs, {{"y", std::nullopt}});
  };
  const Expression u = Expression::symbol(qs, "u"), k2 = Expression::symbol(qs, "k2");
  const jet::FieldId om1 = qs->field_id("om1"), v1 = qs->field_id("v1");
  const Expression om1_m = k2 / u, v1_m = k2 / (2 * u * u);
  rep.add_hypothesis("mCH(2+1) n = 1 with d/dy = 0");
  c.zero("(u om1 - k2)_x = u_y + (u om1)_x at u_y = 0", D(u * Expression::symbol(qs, "om1") - k2, "x") - mchs("u_y"));
  c.zero("om1 = k2/u solves (u om1)_x = 0", jet::substitute(mchs("u_y"), {{om1, om1_m}}));
  c.zero("om1_x/u = (k2/(2u^2))_x with om1 = k2/u", D(om1_m, "x") / u - D(v1_m, "x"));
  c.zero("v1 = k2/(2u^2) solves om1_x = u v1_x", jet::substitute(mchs("om1"), {{om1, om1_m}, {v1, v1_m}}));
  c.zero("u_t = k2[(1/(2u^2))_xx - 1/(2u^2)]_x with v1 = k2/(2u^2)",
         jet::substitute(mchs("u_t"), {{v1, v1_m}}) - qiao_residual(qs, k2));

  // Qiao pulled back through x = X - ln P, t = T lands on Dym
  {
    const SpacePtr dq = jet::parse_catalog("var X, T\nfield P(X, T)\nnonzero P\n");
    const Expression Pd = Expression::symbol(dq, "P");
    const Expression ud = Pd * Pd / (Pd - D(Pd, "X"));
    const Expression dym = D(Pd, "T") - (D(1 / Pd, "X", 3) - D(1 / Pd, "X")) / Pd;
    jet::RewriteSystem rules(dq, jet::Ranking::eliminating_variables(*dq, {"T"}));
    rules.add(jet::orient(dym, dq->jet("P", "T"), rules, "Dym, k1 = 2"));
    const Expression pt = rules.rules().front().rhs;
    transforms::ChainRuleMap pull(qs, dq);
    pull.set_derivation(qs->variable("x"), {{dq->variable("X"), ud / Pd}});
    pull.set_derivation(qs->variable("t"), {{dq->variable("T"), Expression(1)}, {dq->variable("X"), pt * ud / (Pd * Pd)}});
    pull.set_image(qs->jet("u"), ud);
    pull.target_rules() = rules;
    rep.add_hypothesis("dx = (1 - P_X/P) dX - P_T/P dT, t = T");
    c.zero("Qiao (k2 = 1) through x = X - ln P, 1/u = (1/P)(1 - P_X/P) vanishes modulo Dym (k1 = 2)",
           pull.push(qiao_residual(qs, Expression(1)), max_steps));
  }

  // k1 = 2 k2 from the field dictionary
  {
    const SpacePtr ks = jet::parse_catalog("var X, T\nconst k1\nconst k2\nfield P(X, T)\nnonzero P\n");
    const Expression Pk = Expression::symbol(ks, "P"), K1 = Expression::symbol(ks, "k1"), K2 = Expression::symbol(ks, "k2");
    const Expression inv_u = D(1 / Pk, "X") + 1 / Pk;
    const Expression Om = K1 / Pk, om = K2 * inv_u;
    const Expression unit = (Pk - D(Pk, "X")) / (Pk * Pk);
    const Expression gap = om - (D(Om, "X") + Om) / 2;
    const jet::FieldId kf = ks->field_id("k1");
    rep.add_hypothesis("1/u = (1/P)_X + 1/P");
    rep.add_hypothesis("om1 = (Om1_X + Om1)/2");
    rep.add_hypothesis("dx = (1 - P_X/P) dX + (om1 - Om1 (1 - P_X/P)/2) dY + ...");
    c.zero("om1 - (Om1_X + Om1)/2 = (k2 - k1/2)(P - P_X)/P^2", gap - (K2 - K1 / 2) * unit);
    c.nonzero("om1 - (Om1_X + Om1)/2 does not vanish for free k1, k2", gap);
    c.zero("k1 = 2 k2 gives om1 = (Om1_X + Om1)/2", jet::substitute(gap, {{kf, 2 * K2}}));
    const Expression dy = om - Om / 2 * (1 - D(Pk, "X") / Pk);
    c.zero("dY coefficient of dx = (k2 - k1/2)(P - P_X)/P^2", dy - (K2 - K1 / 2) * unit);
    c.zero("k1 = 2 k2 makes the dY coefficient of dx vanish", jet::substitute(dy, {{kf, 2 * K2}}));
  }

  // potential KdV and mKdV in z-space
  {
    const SpacePtr z = systems::z_space(1, {"X"});
    const auto map = transforms::ch_chain_rule(1, z);
    const Expression Zx = Expression::symbol(z, "X");
    c.zero("Om1 = 2/P gives X_z1 = X_z0",
           map.push(jet::parse_expression("Om1 - 2/P", map.source()), max_steps) - 2 * (D(Zx, "z1") - D(Zx, "z0")));
    const SpacePtr zm = systems::z_space(1, {"x", "v1"});
    const auto mmap = transforms::mch_chain_rule(1, zm);
    const Expression Zm = Expression::symbol(zm, "x");
    c.zero("om1 = 1/u gives x_z1 = x_z0",
           mmap.push(jet::parse_expression("om1 - 1/u", mmap.source()), max_steps) - (D(Zm, "z1") - D(Zm, "z0")));

    const SpacePtr zf = systems::z_space(1, {"X", "x", "M"});
    const SpacePtr kdv = jet::parse_catalog(
        "var z0, z2\nfield X(z0, z2)\nfield x(z0, z2)\nfield M(z0, z2)\nnonzero X_z0\nnonzero x_z0\n");
    const VariableIdentification z1_is_z0{{"z1", "z0"}};
    rep.add_hypothesis("z1 acts as z0 (X_z1 = X_z0, x_z1 = x_z0)");
    c.zero("CBS at z1 = z0 is (M_z2 + M_z0z0z0 + 6 M_z0^2)_z0",
           specialize(systems::cbs_residual(zf, "M", 1), kdv, z1_is_z0) - potential_kdv_residual(kdv, "M"));
    c.zero("mCBS at z1 = z0 is ((x_z2 + x_z0z0z0 - x_z0^3/2)/x_z0)_z0",
           specialize(systems::mcbs_residual(zf, "x", 1), kdv, z1_is_z0) -
               D(potential_mkdv_residual(kdv, "x") / D(Expression::symbol(kdv, "x"), "z0"), "z0"));
    const auto m = transforms::cbs_potential_from_x_form(zf, Expression::symbol(zf, "X"), 1);
    c.zero("X-form at z1 = z0 is 4(M_z1 - M_z0)_z0",
           specialize(systems::x_form_residual(zf, "X", 1), kdv, z1_is_z0) -
               4 * D(specialize(m[1] - m[0], kdv, z1_is_z0), "z0"));
  }

  rep.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

Report reduce_case2(std::size_t max_steps) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.task = "reduction-t-equals-x";
  rep.n = 1;
  Collector c(rep);
  rep.add_assumption("first component only, T = X and t = x");
  rep.add_assumption("additive integration constants set to zero");

  const SpacePtr ls = ch_line_space();
  const auto ch = systems::build_ch_system(1);
  auto chs = [&](const std::string& label) { return specialize(ch.equation(label).residual, ls, {{"T", "X"}}); };
  const Expression P = Expression::symbol(ls, "P"), Om = Expression::symbol(ls, "Om1");
  rep.add_hypothesis("CH(2+1) n = 1 with T identified with X");
  c.zero("(Delta - P)_X = -(P_T - Delta_X) at T = X", D(Expression::symbol(ls, "Delta") - P, "X") + chs("Delta"));
  c.zero("(P^2 - Om1_XX + Om1)_X = 2 P P_T - Om1_XXX + Om1_X at T = X", D(P * P - D(Om, "X", 2) + Om, "X") - chs("P_T"));
  c.zero("U_Y + U Om1_X + Om1 U_X/2 = 2P (P_Y + (P Om1)_X/2) with U = P^2",
         jet::substitute(ch_residual(ls), "U", P * P) - 2 * P * chs("P_Y"));

  const SpacePtr ms = mch_line_space();
  const auto mch = systems::build_mch_system(1);
  auto mchs = [&](const std::string& label) { return specialize(mch.equation(label).residual, ms, {{"t", "x"}}); };
  const Expression u = Expression::symbol(ms, "u"), v = Expression::symbol(ms, "v1"), om = Expression::symbol(ms, "om1");
  rep.add_hypothesis("mCH(2+1) n = 1 with t identified with x");
  c.zero("(delta - u)_x = -(u_t - delta_x) at t = x", D(Expression::symbol(ms, "delta") - u, "x") + mchs("delta"));
  c.zero("(u - v1_xx + v1)_x = u_t - v1_xxx + v1_x at t = x", D(u - D(v, "x", 2) + v, "x") - mchs("u_t"));
  c.zero("u_y + (u om1)_x = 0 is kept", mchs("u_y") - (D(u, "y") + D(u * om, "x")));
  c.zero("om1_x - u v1_x = 0 is kept", mchs("om1") - (D(om, "x") - u * D(v, "x")));

  {
    const SpacePtr z = systems::z_space(1, {"X"});
    const auto map = transforms::ch_chain_rule(1, z);
    const Expression X0 = Expression::symbol(z, "X", "z0"), X2 = Expression::symbol(z, "X", "z2");
    c.zero("Delta = P gives X_z2 = -1",
           map.push(jet::parse_expression("Delta - P", map.source()), max_steps) * X0 + X2 + 1);
    const SpacePtr zm = systems::z_space(1, {"x", "v1"});
    const auto mmap = transforms::mch_chain_rule(1, zm);
    const Expression x0 = Expression::symbol(zm, "x", "z0"), x2 = Expression::symbol(zm, "x", "z2");
    c.zero("delta = u gives x_z2 = -1",
           mmap.push(jet::parse_expression("delta - u", mmap.source()), max_steps) * x0 + x2 + 1);

    const SpacePtr zf = systems::z_space(1, {"X", "x", "M"});
    const SpacePtr ak = jet::parse_catalog(
        "var z0, z1, z2\nfield X(z0, z1, z2)\nfield x(z0, z1, z2)\nfield M(z0, z1)\nnonzero X_z0\nnonzero x_z0\n");
    rep.add_hypothesis("X_z2 = x_z2 = -1");
    const auto m = transforms::cbs_potential_from_x_form(zf, Expression::symbol(zf, "X"), 1);
    for (std::size_t k = 0; k < m.size(); ++k) {
      const std::string name = k == 0 ? "M_z0" : "M_z1";
      const Expression dz2 = linear_in(D(m[k], "z2"), ak, "z2", Expression(-1));
      c.zero(name + " from the X-form has no z2 dependence at X_z2 = -1", dz2);
    }
    c.zero("CBS with M free of z2 is M_z0z0z0z1 + 4 M_z1 M_z0z0 + 8 M_z0 M_z0z1",
           specialize(systems::cbs_residual(zf, "M", 1), ak, {}) - akns_residual(ak, "M"));
    c.zero("mCBS at x_z2 = -1 is ((x_z1z0z0 - 1)/x_z0)_z0 - (x_z0^2/2)_z1",
           linear_in(systems::mcbs_residual(zf, "x", 1), ak, "z2", Expression(-1)) - modified_akns_residual(ak, "x"));
  }

  rep.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace chmr::reductions
