#include "chmr/systems/systems.hpp"

#include <chrono>
#include <map>
#include <sstream>

#include "chmr/errors.hpp"

namespace chmr::systems {

using jet::Expression;
using jet::JetVar;
using jet::RewriteSystem;
using jet::SpacePtr;

namespace {

void require_components(int n) {
  if (n < 1) throw DomainError("component count n must be at least 1, got " + std::to_string(n));
}

Expression D(const Expression& e, std::string_view v, int times = 1) {
  Expression r = e;
  for (int k = 0; k < times; ++k) r = jet::differentiate(r, v);
  return r;
}

std::string idx(const std::string& base, int i) { return base + std::to_string(i); }

std::string zvar(int i) { return "z" + std::to_string(i); }

}  // namespace

const Equation& EquationSystem::equation(std::string_view label) const {
  for (const auto& e : equations)
    if (e.label == label) return e;
  throw DomainError("system " + name + " has no equation labelled " + std::string(label));
}

std::string EquationSystem::to_text() const {
  std::ostringstream os;
  os << space->to_catalog_text();
  for (const auto& e : equations) os << "eq " << e.label << ": " << e.residual.to_string() << "\n";
  return os.str();
}

EquationSystem parse_system(std::string_view text, std::string name) {
  std::string catalog;
  std::vector<std::pair<std::string, std::string>> eqs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    if (line.starts_with("eq ")) {
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) throw ParseError(pos, "equation line without ':'");
      eqs.emplace_back(std::string(line.substr(3, colon - 3)), std::string(line.substr(colon + 1)));
    } else {
      catalog.append(line).push_back('\n');
    }
    pos = end + 1;
  }
  EquationSystem sys;
  sys.name = std::move(name);
  sys.space = jet::parse_catalog(catalog);
  for (auto& [label, body] : eqs) sys.equations.push_back({label, jet::parse_expression(body, sys.space)});
  return sys;
}

SpacePtr ch_space(int n) {
  require_components(n);
  std::ostringstream os;
  os << "var X, Y, T\nfield lam(Y, T)\nfield U(X, Y, T)\nfield P(X, Y, T)\n";
  for (int i = 1; i <= n; ++i) os << "field Om" << i << "(X, Y, T)\n";
  os << "field Delta(X, Y, T)\nfield Phi(X, Y, T)\nnonzero P\nnonzero U\nnonzero lam\n";
  return jet::parse_catalog(os.str());
}

SpacePtr mch_space(int n) {
  require_components(n);
  std::ostringstream os;
  os << "var x, y, t\nfield lam(y, t)\next s : s^2 = lam\next I : I^2 = -1\nfield u(x, y, t)\n";
  for (int i = 1; i <= n; ++i) os << "field v" << i << "(x, y, t)\n";
  for (int i = 1; i <= n; ++i) os << "field om" << i << "(x, y, t)\n";
  os << "field delta(x, y, t)\nfield phi(x, y, t)\nfield phih(x, y, t)\nnonzero u\nnonzero lam\n";
  return jet::parse_catalog(os.str());
}

jet::Ranking hierarchy_ranking(const jet::Space& space, const std::vector<std::string>& dominant_fields) {
  auto r = jet::Ranking::eliminating_variables(space, {space.variable_name(2), space.variable_name(1)});
  if (!dominant_fields.empty()) r.then_fields(space, dominant_fields);
  return r;
}

RewriteSystem spectral_conditions(const SpacePtr& space, const jet::Ranking& ranking, int n,
                                  const std::string& time, const std::string& evolution) {
  RewriteSystem rs(space, ranking);
  const Expression lam = Expression::symbol(space, "lam");
  rs.add({space->jet("lam", time), lam.pow(n) * Expression::symbol(space, "lam", evolution),
          "lam_" + time + " = lam^n lam_" + evolution});
  return rs;
}

EquationSystem build_ch_system(int n) {
  require_components(n);
  EquationSystem sys;
  sys.name = "CH(2+1)";
  sys.space = ch_space(n);
  const auto& sp = sys.space;
  auto F = [&](const std::string& name) { return Expression::symbol(sp, name); };
  const Expression P = F("P"), Delta = F("Delta");
  const Expression half(jet::Rational(1, 2));

  sys.equations.push_back({"P_Y", D(P, "Y") + half * D(P * F("Om1"), "X")});
  for (int i = 1; i < n; ++i) {
    const Expression Om = F(idx("Om", i)), Next = F(idx("Om", i + 1));
    sys.equations.push_back({idx("Om", i), D(Om, "X", 3) - D(Om, "X") + P * D(P * Next, "X")});
  }
  const Expression Omn = F(idx("Om", n));
  sys.equations.push_back({"P_T", 2 * P * D(P, "T") - (D(Omn, "X", 3) - D(Omn, "X"))});
  sys.equations.push_back({"Delta", D(P, "T") - D(Delta, "X")});

  RewriteSystem rs(sp, hierarchy_ranking(*sp, {"Delta"}));
  for (int i = 1; i < n; ++i)
    rs.add(jet::orient(sys.equation(idx("Om", i)).residual, sp->jet(idx("Om", i), "XXX"), rs, idx("Om", i)));
  rs.add(jet::orient(sys.equation("P_Y").residual, sp->jet("P", "Y"), rs, "P_Y"));
  rs.add(jet::orient(sys.equation("P_T").residual, sp->jet("P", "T"), rs, "P_T"));
  rs.add(jet::orient(sys.equation("Delta").residual, sp->jet("Delta", "X"), rs, "Delta"));
  sys.orientation = std::move(rs);
  return sys;
}

EquationSystem build_mch_system(int n) {
  require_components(n);
  EquationSystem sys;
  sys.name = "mCH(2+1)";
  sys.space = mch_space(n);
  const auto& sp = sys.space;
  auto F = [&](const std::string& name) { return Expression::symbol(sp, name); };
  const Expression u = F("u"), delta = F("delta");

  sys.equations.push_back({"u_y", D(u, "y") + D(u * F("om1"), "x")});
  for (int i = 1; i < n; ++i) {
    const Expression v = F(idx("v", i));
    sys.equations.push_back({idx("v", i), D(v, "x", 3) - D(v, "x") + D(u * F(idx("om", i + 1)), "x")});
  }
  for (int i = 1; i <= n; ++i)
    sys.equations.push_back({idx("om", i), D(F(idx("om", i)), "x") - u * D(F(idx("v", i)), "x")});
  const Expression vn = F(idx("v", n));
  sys.equations.push_back({"delta", D(u, "t") - D(delta, "x")});
  sys.equations.push_back({"u_t", D(u, "t") - (D(vn, "x", 3) - D(vn, "x"))});
  sys.assumptions.push_back("om" + std::to_string(n) + "_x = u v" + std::to_string(n) +
                            "_x imposed for the last component as well");

  RewriteSystem rs(sp, hierarchy_ranking(*sp, {"delta"}));
  for (int i = 1; i <= n; ++i)
    rs.add(jet::orient(sys.equation(idx("om", i)).residual, sp->jet(idx("om", i), "x"), rs, idx("om", i)));
  for (int i = 1; i < n; ++i)
    rs.add(jet::orient(sys.equation(idx("v", i)).residual, sp->jet(idx("v", i), "xxx"), rs, idx("v", i)));
  rs.add(jet::orient(sys.equation("u_y").residual, sp->jet("u", "y"), rs, "u_y"));
  rs.add(jet::orient(sys.equation("u_t").residual, sp->jet("u", "t"), rs, "u_t"));
  rs.add(jet::orient(sys.equation("delta").residual, sp->jet("delta", "x"), rs, "delta"));
  sys.orientation = std::move(rs);
  return sys;
}

SpacePtr z_space(int n, const std::vector<std::string>& fields) {
  require_components(n);
  auto sp = std::make_shared<jet::Space>();
  std::vector<std::string> vars;
  for (int i = 0; i <= n + 1; ++i) {
    vars.push_back(zvar(i));
    sp->add_variable(vars.back());
  }
  for (const auto& f : fields) sp->add_field(f, vars);
  sp->mark_invertible(sp->jet(fields.front(), "z0"));
  return sp;
}

Expression x_form_residual(const SpacePtr& sp, const std::string& field, int i) {
  const Expression X = Expression::symbol(sp, field);
  const Expression X0 = D(X, "z0");
  const Expression W = D(X0, "z0") / X0 + X0;
  return -D(D(X, zvar(i + 1)) / X0, "z0") - D(D(W, "z0") - W * W / 2, zvar(i));
}

Expression mcbs_residual(const SpacePtr& sp, const std::string& field, int i) {
  const Expression x = Expression::symbol(sp, field);
  const Expression x0 = D(x, "z0");
  return D(D(x, zvar(i + 1)) / x0 + D(D(x, zvar(i)), "z0", 2) / x0, "z0") - D(x0 * x0 / 2, zvar(i));
}

Expression cbs_residual(const SpacePtr& sp, const std::string& field, int i) {
  const Expression M = Expression::symbol(sp, field);
  const Expression M0 = D(M, "z0"), Mi = D(M, zvar(i));
  return D(M0, zvar(i + 1)) + D(D(M0, "z0", 2), zvar(i)) + 4 * Mi * D(M0, "z0") + 8 * M0 * D(M0, zvar(i));
}

CbsFamily build_cbs_family(int n) {
  require_components(n);
  CbsFamily fam;
  fam.space = z_space(n, {"X", "M"});
  const auto& sp = fam.space;
  const Expression X = Expression::symbol(sp, "X"), M = Expression::symbol(sp, "M");
  const Expression X0 = D(X, "z0");
  const Expression W = D(X0, "z0") / X0 + X0;

  fam.x_form.name = "X-form";
  fam.x_form.space = sp;
  fam.x_form.orientation = RewriteSystem(sp, jet::Ranking::orderly());
  for (int i = 1; i <= n; ++i) {
    const std::string label = idx("X", i);
    fam.x_form.equations.push_back({label, x_form_residual(sp, "X", i)});
    const JetVar lead = sp->jet("X", "z0z0z0" + zvar(i));
    fam.x_form.orientation.add(jet::orient(fam.x_form.equations.back().residual, lead,
                                           RewriteSystem(sp, jet::Ranking::orderly()), label));
  }

  fam.m_definitions.name = "M-definitions";
  fam.m_definitions.space = sp;
  jet::Ranking mrank;
  mrank.then_fields(*sp, {"M"});
  fam.m_definitions.orientation = RewriteSystem(sp, mrank);
  fam.m_definitions.equations.push_back({"M_0", 4 * D(M, "z0") - (D(W, "z0") - W * W / 2)});
  for (int i = 1; i <= n; ++i)
    fam.m_definitions.equations.push_back({idx("M_", i), 4 * D(M, zvar(i)) + D(X, zvar(i + 1)) / X0});
  for (const auto& eq : fam.m_definitions.equations) {
    const std::string var = eq.label == "M_0" ? "z0" : zvar(std::stoi(eq.label.substr(2)));
    fam.m_definitions.orientation.add(
        jet::orient(eq.residual, sp->jet("M", var), RewriteSystem(sp, mrank), eq.label));
  }

  fam.cbs.name = "CBS";
  fam.cbs.space = sp;
  for (int i = 1; i <= n; ++i) fam.cbs.equations.push_back({idx("CBS", i), cbs_residual(sp, "M", i)});
  return fam;
}

McbsFamily build_mcbs_family(int n) {
  require_components(n);
  McbsFamily fam;
  fam.space = z_space(n, {"x", "m"});
  const auto& sp = fam.space;
  const Expression x = Expression::symbol(sp, "x"), m = Expression::symbol(sp, "m");
  const Expression x0 = D(x, "z0");

  fam.x_form.name = "mCBS";
  fam.x_form.space = sp;
  fam.x_form.orientation = RewriteSystem(sp, jet::Ranking::orderly());
  for (int i = 1; i <= n; ++i) {
    const std::string label = idx("x", i);
    fam.x_form.equations.push_back({label, mcbs_residual(sp, "x", i)});
    fam.x_form.orientation.add(jet::orient(fam.x_form.equations.back().residual,
                                           sp->jet("x", "z0z0z0" + zvar(i)),
                                           RewriteSystem(sp, jet::Ranking::orderly()), label));
  }

  fam.m_definitions.name = "m-definitions";
  fam.m_definitions.space = sp;
  jet::Ranking mrank;
  mrank.then_fields(*sp, {"m"});
  fam.m_definitions.orientation = RewriteSystem(sp, mrank);
  fam.m_definitions.equations.push_back({"m_0", D(m, "z0") - x0 * x0 / 2});
  for (int i = 1; i <= n; ++i)
    fam.m_definitions.equations.push_back(
        {idx("m_", i), D(m, zvar(i)) - D(x, zvar(i + 1)) / x0 - D(D(x, zvar(i)), "z0", 2) / x0});
  for (const auto& eq : fam.m_definitions.equations) {
    const std::string var = eq.label == "m_0" ? "z0" : zvar(std::stoi(eq.label.substr(2)));
    fam.m_definitions.orientation.add(
        jet::orient(eq.residual, sp->jet("m", var), RewriteSystem(sp, mrank), eq.label));
  }
  return fam;
}

std::vector<std::string> division_assumptions(const Expression& e) {
  std::vector<std::string> out;
  if (!e.space()) return out;
  const jet::Polynomial& den = e.denominator();
  if (den.is_constant()) return out;
  const jet::Monomial content = den.monomial_content();
  for (const auto& [v, k] : content.factors())
    if (!e.space()->is_invertible(v)) out.push_back(e.space()->jet_name(v) + " != 0");
  jet::Polynomial rest = *den.divide_exact(jet::Polynomial(content, jet::Rational(1)));
  if (!rest.is_constant()) out.push_back(Expression(e.space(), rest).to_string() + " != 0");
  return out;
}

namespace {

void smoke(Report& rep, const EquationSystem& sys, std::size_t expected,
           const std::map<jet::FieldId, jet::Expression>& constants, const std::string& point) {
  const long gap = static_cast<long>(sys.equations.size()) - static_cast<long>(expected);
  rep.residuals.push_back(ResidualOutcome::of(sys.name + " residual count - " + std::to_string(expected), gap == 0,
                                              std::to_string(gap)));
  for (const auto& eq : sys.equations) {
    const jet::Expression r = jet::substitute(eq.residual, constants);
    rep.residuals.push_back(ResidualOutcome::of(sys.name + " " + eq.label + " at " + point, r.is_zero(), r.to_string()));
  }
  for (const auto& a : sys.assumptions) rep.add_assumption(a);
}

}  // namespace

Report verify_hierarchies(int n) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.task = "hierarchies";
  rep.n = n;
  const EquationSystem ch = build_ch_system(n);
  std::map<jet::FieldId, jet::Expression> c{{ch.space->field_id("P"), jet::Expression(3)},
                                            {ch.space->field_id("Delta"), jet::Expression(7)}};
  for (int i = 1; i <= n; ++i) c[ch.space->field_id("Om" + std::to_string(i))] = jet::Expression(0);
  smoke(rep, ch, static_cast<std::size_t>(n) + 2, c, "P = 3, Delta = 7, Om_i = 0");

  const EquationSystem mch = build_mch_system(n);
  std::map<jet::FieldId, jet::Expression> m{{mch.space->field_id("u"), jet::Expression(2)},
                                            {mch.space->field_id("delta"), jet::Expression(-5)}};
  for (int i = 1; i <= n; ++i) {
    m[mch.space->field_id("om" + std::to_string(i))] = jet::Expression(0);
    m[mch.space->field_id("v" + std::to_string(i))] = jet::Expression(0);
  }
  smoke(rep, mch, 2 * static_cast<std::size_t>(n) + 2, m, "u = 2, delta = -5, om_i = v_i = 0");
  rep.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace chmr::systems
