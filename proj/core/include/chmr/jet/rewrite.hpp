#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chmr/jet/expression.hpp"

namespace chmr::jet {

/// Total order on jet variables. Optional weight blocks are compared first
/// (each block scores a jet as field_weight[field] + sum var_weight[v] * order(v)),
/// then the orderly tail: total derivative order, field index, orders by
/// variable index with the last declared variable most significant. Nonnegative weights keep it a ranking: well-founded and
/// compatible with differentiation.
class Ranking {
 public:
  struct Block {
    std::vector<int> var_weight;
    std::vector<int> field_weight;
  };

  Ranking() = default;
  static Ranking orderly() { return {}; }
  /// Derivatives in the listed variables dominate, in the listed order.
  static Ranking eliminating_variables(const Space& space, const std::vector<std::string>& variables);
  /// Adds a block in which the listed fields (in increasing weight) dominate all others.
  Ranking& then_fields(const Space& space, const std::vector<std::string>& fields_low_to_high);

  std::strong_ordering compare(JetVar a, JetVar b) const;
  bool less(JetVar a, JetVar b) const { return compare(a, b) < 0; }

  const std::vector<Block>& blocks() const { return blocks_; }

 private:
  int score(const Block& b, JetVar j) const;
  std::vector<Block> blocks_;
};

struct RewriteRule {
  JetVar lhs;
  Expression rhs;
  std::string provenance;
};

/// Oriented rules over one space. Each rule implicitly stands for all of its
/// prolongations (derivatives of both sides).
class RewriteSystem {
 public:
  RewriteSystem() = default;
  RewriteSystem(SpacePtr space, Ranking ranking) : space_(std::move(space)), ranking_(std::move(ranking)) {}

  const SpacePtr& space() const { return space_; }
  const Ranking& ranking() const { return ranking_; }
  const std::vector<RewriteRule>& rules() const { return rules_; }

  /// Validates the ranking invariant (every rhs jet strictly below lhs) before adding.
  void add(RewriteRule rule);
  void append(const RewriteSystem& other);

  /// Index of the first rule whose lhs `j` is a derivative of.
  std::optional<std::size_t> rule_for(JetVar j) const;

 private:
  SpacePtr space_;
  Ranking ranking_;
  std::vector<RewriteRule> rules_;
};

/// Reduction modulo a rewrite system, memoizing normal forms of jet variables.
/// A reducer holds mutable caches and is not shared between threads.
class Reducer {
 public:
  static constexpr std::size_t kDefaultBudget = 100000;

  explicit Reducer(const RewriteSystem& rs, std::size_t max_steps = kDefaultBudget);

  Expression reduce(const Expression& e);
  const Expression& normal_form(JetVar j);
  std::size_t steps() const { return steps_; }
  bool is_reducible(JetVar j) const { return rs_.rule_for(j).has_value(); }

 private:
  const RewriteSystem& rs_;
  std::size_t max_steps_;
  std::size_t steps_ = 0;
  std::unordered_map<JetVar, Expression> memo_;
};

Expression reduce_modulo(const Expression& e, const RewriteSystem& rs,
                         std::size_t max_steps = Reducer::kDefaultBudget);

/// Solves `residual` = 0 for `lhs`, which must occur linearly in the numerator
/// and not at all in the denominator. The solved right side is reduced modulo
/// `previous` before the rule is returned.
RewriteRule orient(const Expression& residual, JetVar lhs, const RewriteSystem& previous,
                   std::string provenance = {});

/// Coefficients of an expression that is linear in the listed fields' jets.
/// The key kNoJet collects any part free of them.
std::map<JetVar, Expression> linear_coefficients(const Expression& e, const std::vector<FieldId>& fields);

/// Highest-ranked jet variable of e, if any.
std::optional<JetVar> leading_jet(const Expression& e, const Ranking& ranking);

}  // namespace chmr::jet
