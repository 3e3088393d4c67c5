#include <chrono>
#include <unordered_map>

#include "chmr/errors.hpp"
#include "chmr/transforms/transforms.hpp"

namespace chmr::transforms {

using jet::Expression;
using jet::JetVar;
using jet::RewriteSystem;
using jet::SpacePtr;
using jet::VarId;

namespace {

std::string zvar(int i) { return "z" + std::to_string(i); }

JetVar rehome_jet(JetVar j, const jet::Space& from, const jet::Space& to) {
  JetVar r(to.field_id(from.field(j.field()).name));
  for (VarId v = 0; v < from.variable_count(); ++v)
    if (j.order(v)) r = r.differentiated(to.variable(from.variable_name(v)), j.order(v));
  return r;
}

}  // namespace

Expression rehome(const Expression& e, const SpacePtr& target) {
  if (!e.space() || e.space() == target) return e.space() ? e : Expression(target, e.numerator());
  const jet::Space& from = *e.space();
  return jet::map_jets(e, target, [&](JetVar j) { return Expression::jet(target, rehome_jet(j, from, *target)); });
}

RewriteSystem rehome(const RewriteSystem& rs, const SpacePtr& target) {
  RewriteSystem out(target, rs.ranking());
  for (const auto& r : rs.rules())
    out.add({rehome_jet(r.lhs, *rs.space(), *target), rehome(r.rhs, target), r.provenance});
  return out;
}

ChainRuleMap::ChainRuleMap(SpacePtr source, SpacePtr target)
    : source_(std::move(source)), target_(std::move(target)), derivation_(source_->variable_count()),
      target_rules_(target_, jet::Ranking::orderly()) {}

void ChainRuleMap::set_derivation(VarId source_var, std::vector<Term> terms) {
  derivation_.at(source_var) = std::move(terms);
}

void ChainRuleMap::set_image(JetVar source_jet, Expression image) {
  image = rehome(image, target_);
  for (auto& [j, img] : dictionary_)
    if (j == source_jet) {
      img = std::move(image);
      return;
    }
  dictionary_.emplace_back(source_jet, std::move(image));
}

Expression ChainRuleMap::derive(const Expression& e, VarId source_var) const {
  const auto& terms = derivation_.at(source_var);
  if (terms.empty())
    throw DomainError("no pushed derivative for " + source_->variable_name(source_var));
  Expression r(0);
  for (const auto& t : terms) r += t.coefficient * jet::differentiate(e, t.target_var);
  return r;
}

Expression ChainRuleMap::push(const Expression& e, std::size_t max_steps) const {
  jet::Reducer reducer(target_rules_, max_steps);
  std::unordered_map<JetVar, Expression> memo;
  std::function<Expression(JetVar)> image = [&](JetVar j) -> Expression {
    if (auto it = memo.find(j); it != memo.end()) return it->second;
    Expression r;
    bool found = false;
    for (const auto& [k, img] : dictionary_) {
      if (!j.is_derivative_of(k)) continue;
      if (j == k) {
        r = img;
        found = true;
        break;
      }
      VarId w = 0;
      bool usable = true;
      for (VarId v = 0; v < source_->variable_count(); ++v)
        if (j.order(v) > k.order(v)) {
          if (derivation_[v].empty()) usable = false;
          w = v;
        }
      if (!usable) continue;
      r = derive(image(j.integrated(w)), w);
      found = true;
      break;
    }
    if (!found) {
      const auto& sig = source_->field(j.field());
      const auto same = target_->find_field(sig.name);
      if (sig.kind == jet::FieldKind::kField || !same || !j.is_base())
        throw DomainError("no image for " + source_->jet_name(j));
      r = Expression::jet(target_, JetVar(*same));
    }
    if (!target_rules_.rules().empty()) r = reducer.reduce(r);
    return memo.emplace(j, r).first->second;
  };
  Expression out = jet::map_jets(e, target_, image);
  if (!target_rules_.rules().empty()) out = reducer.reduce(out);
  return out;
}

std::vector<std::string> ChainRuleMap::describe() const {
  std::vector<std::string> out;
  for (VarId v = 0; v < derivation_.size(); ++v) {
    if (derivation_[v].empty()) continue;
    std::string s = "D_" + source_->variable_name(v) + " -> ";
    bool first = true;
    for (const auto& t : derivation_[v]) {
      if (!first) s += " + ";
      first = false;
      s += "(" + t.coefficient.to_string() + ")*d_" + target_->variable_name(t.target_var);
    }
    out.push_back(s);
  }
  for (const auto& [j, img] : dictionary_) out.push_back(source_->jet_name(j) + " -> " + img.to_string());
  for (const auto& r : target_rules_.rules()) out.push_back(target_->jet_name(r.lhs) + " -> " + r.rhs.to_string());
  return out;
}

ChainRuleMap derive_chain_rule(const ExactOneForm& form, const SpacePtr& target, const ReciprocalSpec& spec) {
  const SpacePtr& src = form.source;
  if (form.coefficients.size() != spec.time_targets.size() + 1 || spec.solve_for.size() != form.coefficients.size())
    throw DomainError("one-form and reciprocal specification disagree in size");

  // Bridge space: the target plus the solved-for source fields as functions of z.
  std::string catalog = target->to_catalog_text();
  std::string deps;
  for (VarId v = 0; v < target->variable_count(); ++v) deps += (v ? ", " : "") + target->variable_name(v);
  for (const auto& f : spec.solve_for) catalog += "field " + f + "(" + deps + ")\n";
  const SpacePtr bridge = jet::parse_catalog(catalog);
  auto to_bridge = [&](const Expression& e) {
    return jet::map_jets(e, bridge, [&](JetVar j) {
      const auto& name = src->field(j.field()).name;
      if (!j.is_base()) throw DomainError("one-form coefficient holds the derivative " + src->jet_name(j));
      return Expression::symbol(bridge, name);
    });
  };

  const Expression pot = Expression::symbol(bridge, spec.potential);
  const Expression p0 = jet::differentiate(pot, "z0");
  std::vector<Expression> relations;
  const Expression a = to_bridge(form.coefficients[0].second);
  relations.push_back(a * p0 - 1);
  for (std::size_t k = 0; k < spec.time_targets.size(); ++k)
    relations.push_back(to_bridge(form.coefficients[k + 1].second) +
                        a * jet::differentiate(pot, spec.time_targets[k]));

  std::map<jet::FieldId, Expression> solved;
  for (std::size_t k = 0; k < relations.size(); ++k) {
    const Expression rel = jet::substitute(relations[k], solved);
    const JetVar f = bridge->jet(spec.solve_for[k]);
    if (rel.denominator().contains(f) || rel.numerator().degree_in(f) != 1)
      throw DomainError("one-form coefficient is not linear in " + spec.solve_for[k]);
    const Expression lin(bridge, rel.numerator().coefficient_in(f, 1));
    const Expression rest(bridge, rel.numerator().coefficient_in(f, 0));
    solved[f.field()] = -rest / lin;
  }

  ChainRuleMap map(src, target);
  const Expression tp = Expression::symbol(target, spec.potential);
  const Expression tp0 = jet::differentiate(tp, "z0");
  const VarId z0 = target->variable("z0");
  map.set_derivation(src->variable(form.coefficients[0].first), {{z0, 1 / tp0}});
  for (std::size_t k = 0; k < spec.time_targets.size(); ++k) {
    const VarId zk = target->variable(spec.time_targets[k]);
    map.set_derivation(src->variable(form.coefficients[k + 1].first),
                       {{zk, Expression(1)}, {z0, -jet::differentiate(tp, zk) / tp0}});
  }
  for (const auto& f : spec.solve_for) {
    const Expression img = solved.at(bridge->field_id(f));
    for (JetVar j : img.jet_vars())
      if (!target->find_field(bridge->field(j.field()).name) ||
          std::find(spec.solve_for.begin(), spec.solve_for.end(), bridge->field(j.field()).name) != spec.solve_for.end())
        throw DomainError("solved image of " + f + " still holds source fields");
    map.set_image(src->jet(f), rehome(img, target));
  }
  for (const auto& [f, img] : spec.extra_images) map.set_image(src->jet(f), img);
  return map;
}

ExactOneForm ch_one_form(int n) {
  ExactOneForm form;
  form.source = systems::ch_space(n);
  const auto& sp = form.source;
  const Expression P = Expression::symbol(sp, "P");
  form.coefficients = {{"X", P},
                       {"Y", -P * Expression::symbol(sp, "Om1") / 2},
                       {"T", Expression::symbol(sp, "Delta")}};
  return form;
}

ExactOneForm mch_one_form(int n) {
  ExactOneForm form;
  form.source = systems::mch_space(n);
  const auto& sp = form.source;
  const Expression u = Expression::symbol(sp, "u");
  form.coefficients = {{"x", u}, {"y", -u * Expression::symbol(sp, "om1")}, {"t", Expression::symbol(sp, "delta")}};
  return form;
}

ChainRuleMap ch_chain_rule(int n, const SpacePtr& target) {
  ReciprocalSpec spec;
  spec.potential = "X";
  spec.time_targets = {"z1", zvar(n + 1)};
  spec.solve_for = {"P", "Om1", "Delta"};
  const Expression X = Expression::symbol(target, "X");
  for (int i = 2; i <= n; ++i)
    spec.extra_images.emplace_back("Om" + std::to_string(i), 2 * jet::differentiate(X, zvar(i)));
  spec.extra_images.emplace_back("U", jet::differentiate(X, "z0").pow(-2));
  return derive_chain_rule(ch_one_form(n), target, spec);
}

ChainRuleMap ch_inverse_chain_rule(int n, const SpacePtr& zspace) {
  const SpacePtr sp = systems::ch_space(n);
  auto F = [&](const std::string& name) { return Expression::symbol(sp, name); };
  const Expression P = F("P");
  std::vector<Expression> xz{1 / P};
  for (int i = 1; i <= n; ++i) xz.push_back(F("Om" + std::to_string(i)) / 2);
  xz.push_back(-F("Delta") / P);

  ChainRuleMap map(zspace, sp);
  const VarId X = sp->variable("X");
  for (int k = 0; k <= n + 1; ++k) {
    std::vector<ChainRuleMap::Term> terms{{X, xz[k]}};
    if (k == 1) terms.push_back({sp->variable("Y"), Expression(1)});
    if (k == n + 1) terms.push_back({sp->variable("T"), Expression(1)});
    map.set_derivation(zspace->variable(zvar(k)), std::move(terms));
  }
  // Mixed jets X_z0zi (2 <= i <= n) must come from Om_i: d_zi (1/P) only
  // agrees with D_z0 (Om_i/2) when (P Om_i)_X = 0, so those images go first.
  for (int k = 2; k <= n; ++k) map.set_image(zspace->jet("X", zvar(k)), xz[k]);
  for (int k : {0, 1, n + 1}) map.set_image(zspace->jet("X", zvar(k)), xz[k]);
  return map;
}

ChainRuleMap mch_chain_rule(int n, const SpacePtr& target) {
  ReciprocalSpec spec;
  spec.potential = "x";
  spec.time_targets = {"z1", zvar(n + 1)};
  spec.solve_for = {"u", "om1", "delta"};
  const Expression x = Expression::symbol(target, "x");
  for (int i = 2; i <= n; ++i) spec.extra_images.emplace_back("om" + std::to_string(i), jet::differentiate(x, zvar(i)));
  for (int i = 1; i <= n; ++i) {
    const std::string v = "v" + std::to_string(i);
    spec.extra_images.emplace_back(v, Expression::symbol(target, v));
  }
  ChainRuleMap map = derive_chain_rule(mch_one_form(n), target, spec);

  // om_x = u v_x fixes the z0-derivative of each v.
  std::vector<std::string> block{"x"};
  for (int i = 1; i <= n; ++i) block.push_back("v" + std::to_string(i));
  jet::Ranking ranking;
  ranking.then_fields(*target, block);
  RewriteSystem rules(target, ranking);
  const auto sys = systems::build_mch_system(n);
  for (int i = 1; i <= n; ++i) {
    const std::string v = "v" + std::to_string(i);
    const Expression pushed = map.push(rehome(sys.equation("om" + std::to_string(i)).residual, map.source()));
    rules.add(jet::orient(pushed, target->jet(v, "z0"), rules, "om" + std::to_string(i) + "_x = u " + v + "_x"));
  }
  map.target_rules() = std::move(rules);
  return map;
}

std::optional<Expression> unit_ratio(const Expression& a, const Expression& b) {
  if (a.is_zero() || b.is_zero()) return std::nullopt;
  const Expression r = a / b;
  if (r.numerator().size() != 1 || r.denominator().size() != 1) return std::nullopt;
  return r;
}

std::vector<ResidualOutcome> check_one_form_closed(const ExactOneForm& form, const systems::EquationSystem& source,
                                                   const ChainRuleMap& map, Report& rep) {
  std::vector<ResidualOutcome> out;
  const SpacePtr& sp = source.space;
  std::vector<Expression> coeffs;
  for (const auto& [v, c] : form.coefficients) coeffs.push_back(rehome(c, sp));
  jet::Reducer reducer(source.orientation);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    for (std::size_t j = i + 1; j < coeffs.size(); ++j) {
      const std::string vi = form.coefficients[i].first, vj = form.coefficients[j].first;
      const Expression cross = jet::differentiate(coeffs[i], vj) - jet::differentiate(coeffs[j], vi);
      const Expression reduced = reducer.reduce(cross);
      auto o = ResidualOutcome::of("one-form closed in d" + vi + " d" + vj, reduced.is_zero(), reduced.to_string());
      if (i != 0) {
        // both coefficients carry time derivatives the system leaves free
        o.label += " (source coordinates)";
        o.informational = true;
      }
      out.push_back(o);
      const Expression pushed = map.push(rehome(cross, map.source()));
      out.push_back(ResidualOutcome::of("one-form closed in d" + vi + " d" + vj + " (reciprocal coordinates)",
                                        pushed.is_zero(), pushed.to_string()));
    }
  rep.steps += reducer.steps();
  return out;
}

Report verify_reciprocal(const systems::EquationSystem& source, const ChainRuleMap& map,
                         const systems::EquationSystem& target, JetVar unit_jet, std::string task,
                         std::size_t max_steps) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.task = std::move(task);
  for (const auto& line : map.describe()) rep.add_hypothesis("map: " + line);
  for (const auto& eq : target.equations) rep.add_hypothesis(target.name + ": " + eq.label);
  for (const auto& a : source.assumptions) rep.add_assumption(a);
  for (const auto& [j, img] : map.dictionary())
    for (const auto& a : systems::division_assumptions(img)) rep.add_assumption(a);

  jet::Reducer reducer(target.orientation, max_steps);
  try {
    for (const auto& eq : source.equations) {
      const Expression pushed = map.push(rehome(eq.residual, map.source()), max_steps);
      const Expression reduced = reducer.reduce(pushed);
      ResidualOutcome o = ResidualOutcome::of(eq.label, reduced.is_zero(), reduced.to_string());
      if (pushed.is_zero()) {
        o.label += " -> identity";
        o.unit_factor = "identity";
      } else {
        for (const auto& t : target.equations) {
          const auto ratio = unit_ratio(pushed, rehome(t.residual, map.target()));
          if (!ratio) continue;
          o.label += " -> " + t.label;
          o.unit_factor = ratio->to_string();
          for (JetVar j : ratio->jet_vars())
            if (j != unit_jet) {
              o.reduced_to_zero = false;
              o.remainder_text = "unit factor " + ratio->to_string() + " is not a power of " +
                                 map.target()->jet_name(unit_jet);
            }
          break;
        }
        if (!o.unit_factor) o.label += " -> consequence";
      }
      rep.residuals.push_back(std::move(o));
    }
  } catch (const BudgetExhausted&) {
    rep.budget_exhausted = true;
  }
  rep.steps += reducer.steps();
  rep.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

Report verify_reciprocal_ch(int n, std::size_t max_steps) {
  const auto fam = systems::build_cbs_family(n);
  const SpacePtr zsp = systems::z_space(n, {"X"});
  systems::EquationSystem target = fam.x_form;
  target.space = zsp;
  target.orientation = rehome(fam.x_form.orientation, zsp);
  for (auto& eq : target.equations) eq.residual = rehome(eq.residual, zsp);
  const ChainRuleMap map = ch_chain_rule(n, zsp);
  const auto src = systems::build_ch_system(n);
  Report rep = verify_reciprocal(src, map, target, zsp->jet("X", "z0"), "reciprocal-ch", max_steps);
  rep.n = n;
  for (auto& o : check_one_form_closed(ch_one_form(n), src, map, rep)) rep.residuals.push_back(std::move(o));
  return rep;
}

Report verify_reciprocal_mch(int n, std::size_t max_steps) {
  const auto fam = systems::build_mcbs_family(n);
  std::vector<std::string> fields{"x"};
  for (int i = 1; i <= n; ++i) fields.push_back("v" + std::to_string(i));
  const SpacePtr zsp = systems::z_space(n, fields);
  systems::EquationSystem target = fam.x_form;
  target.space = zsp;
  target.orientation = rehome(fam.x_form.orientation, zsp);
  for (auto& eq : target.equations) eq.residual = rehome(eq.residual, zsp);
  const ChainRuleMap map = mch_chain_rule(n, zsp);
  const auto src = systems::build_mch_system(n);
  Report rep = verify_reciprocal(src, map, target, zsp->jet("x", "z0"), "reciprocal-mch", max_steps);
  rep.n = n;
  for (auto& o : check_one_form_closed(mch_one_form(n), src, map, rep)) rep.residuals.push_back(std::move(o));
  return rep;
}

}  // namespace chmr::transforms
