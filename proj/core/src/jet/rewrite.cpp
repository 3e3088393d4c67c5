#include "chmr/jet/rewrite.hpp"

#include <algorithm>

#include "chmr/errors.hpp"

namespace chmr::jet {

Ranking Ranking::eliminating_variables(const Space& space, const std::vector<std::string>& variables) {
  Ranking r;
  for (const auto& name : variables) {
    Block b;
    b.var_weight.assign(space.variable_count(), 0);
    b.var_weight[space.variable(name)] = 1;
    r.blocks_.push_back(std::move(b));
  }
  return r;
}

Ranking& Ranking::then_fields(const Space& space, const std::vector<std::string>& fields_low_to_high) {
  Block b;
  b.field_weight.assign(space.field_count(), 0);
  int w = 1;
  for (const auto& name : fields_low_to_high) b.field_weight[space.field_id(name)] = w++;
  blocks_.push_back(std::move(b));
  return *this;
}

int Ranking::score(const Block& b, JetVar j) const {
  int s = 0;
  if (j.field() < b.field_weight.size()) s += b.field_weight[j.field()];
  for (std::size_t v = 0; v < b.var_weight.size(); ++v) s += b.var_weight[v] * static_cast<int>(j.order(static_cast<VarId>(v)));
  return s;
}

std::strong_ordering Ranking::compare(JetVar a, JetVar b) const {
  for (const auto& blk : blocks_) {
    const int sa = score(blk, a), sb = score(blk, b);
    if (sa != sb) return sa <=> sb;
  }
  if (a.total_order() != b.total_order()) return a.total_order() <=> b.total_order();
  if (a.field() != b.field()) return a.field() <=> b.field();
  for (VarId v = JetVar::kMaxVars; v-- > 0;)
    if (a.order(v) != b.order(v)) return a.order(v) <=> b.order(v);
  return std::strong_ordering::equal;
}

void RewriteSystem::add(RewriteRule rule) {
  if (rule.rhs.space() && rule.rhs.space() != space_)
    throw DomainError("rewrite rule rhs lives in a different space");
  for (JetVar j : rule.rhs.jet_vars()) {
    if (space_->field(j.field()).kind != FieldKind::kField) continue;
    if (j.is_derivative_of(rule.lhs))
      throw DomainError("rule for " + space_->jet_name(rule.lhs) + " has its own derivative " +
                        space_->jet_name(j) + " on the right");
    if (!ranking_.less(j, rule.lhs))
      throw DomainError("rule for " + space_->jet_name(rule.lhs) + " violates the ranking: right side holds " +
                        space_->jet_name(j));
  }
  rules_.push_back(std::move(rule));
}

void RewriteSystem::append(const RewriteSystem& other) {
  for (const auto& r : other.rules()) add(r);
}

std::optional<std::size_t> RewriteSystem::rule_for(JetVar j) const {
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (j.is_derivative_of(rules_[i].lhs)) return i;
  return std::nullopt;
}

Reducer::Reducer(const RewriteSystem& rs, std::size_t max_steps) : rs_(rs), max_steps_(max_steps) {}

const Expression& Reducer::normal_form(JetVar j) {
  if (auto it = memo_.find(j); it != memo_.end()) return it->second;
  const auto idx = rs_.rule_for(j);
  Expression nf;
  if (!idx) {
    nf = Expression::jet(rs_.space(), j);
  } else {
    if (++steps_ > max_steps_) throw BudgetExhausted(steps_);
    const JetVar lhs = rs_.rules()[*idx].lhs;
    if (j == lhs) {
      nf = reduce(rs_.rules()[*idx].rhs);
    } else {
      VarId w = 0;
      while (j.order(w) <= lhs.order(w)) ++w;
      const Expression lower = normal_form(j.integrated(w));
      nf = reduce(differentiate(lower, w));
    }
  }
  return memo_.emplace(j, std::move(nf)).first->second;
}

Expression Reducer::reduce(const Expression& e) {
  bool any = false;
  for (JetVar j : e.jet_vars())
    if (rs_.rule_for(j)) {
      any = true;
      break;
    }
  if (!any) return e;
  return map_jets(e, rs_.space(), [&](JetVar j) -> Expression {
    if (!rs_.rule_for(j)) return Expression::jet(rs_.space(), j);
    return normal_form(j);
  });
}

Expression reduce_modulo(const Expression& e, const RewriteSystem& rs, std::size_t max_steps) {
  Reducer r(rs, max_steps);
  return r.reduce(e);
}

RewriteRule orient(const Expression& residual, JetVar lhs, const RewriteSystem& previous, std::string provenance) {
  const SpacePtr& sp = previous.space();
  if (residual.denominator().contains(lhs))
    throw DomainError("cannot orient on " + sp->jet_name(lhs) + ": it occurs in a denominator");
  const Polynomial& num = residual.numerator();
  if (num.degree_in(lhs) != 1) throw DomainError("cannot orient on " + sp->jet_name(lhs) + ": not linear");
  const Polynomial a = num.coefficient_in(lhs, 1);
  const Polynomial b = num.coefficient_in(lhs, 0);
  Expression rhs = Expression(sp, -b, Polynomial(1)) / Expression(sp, a, Polynomial(1));
  if (!previous.rules().empty()) rhs = reduce_modulo(rhs, previous);
  return {lhs, rhs, std::move(provenance)};
}

std::map<JetVar, Expression> linear_coefficients(const Expression& e, const std::vector<FieldId>& fields) {
  std::map<JetVar, std::vector<Term>> buckets;
  for (const auto& t : e.numerator().terms()) {
    std::optional<JetVar> hit;
    Monomial rest;
    for (const auto& [v, k] : t.monomial.factors()) {
      if (std::find(fields.begin(), fields.end(), v.field()) != fields.end()) {
        if (hit || k != 1) throw DomainError("expression is not linear in the requested fields");
        hit = v;
      } else {
        rest = rest * Monomial(v, k);
      }
    }
    buckets[hit.value_or(kNoJet)].push_back({rest, t.coeff});
  }
  std::map<JetVar, Expression> out;
  for (auto& [j, ts] : buckets) {
    out.emplace(j, Expression(e.space(), Polynomial::from_terms(std::move(ts)), e.denominator()));
  }
  return out;
}

std::optional<JetVar> leading_jet(const Expression& e, const Ranking& ranking) {
  std::optional<JetVar> best;
  for (JetVar j : e.jet_vars())
    if (!best || ranking.less(*best, j)) best = j;
  return best;
}

}  // namespace chmr::jet
