#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chmr/jet/rewrite.hpp"
#include "chmr/report.hpp"
#include "chmr/systems/systems.hpp"

namespace chmr::transforms {

/// dz0 = sum coefficient_k d(old_k) over the source space.
struct ExactOneForm {
  jet::SpacePtr source;
  std::vector<std::pair<std::string, jet::Expression>> coefficients;  // old variable -> coefficient
};

jet::RewriteSystem rehome(const jet::RewriteSystem& rs, const jet::SpacePtr& target);
jet::Expression rehome(const jet::Expression& e, const jet::SpacePtr& target);

/// Ring map from one jet space to another that intertwines total derivatives:
/// D_old = sum_k c_k d/dz_k, and selected source jets have explicit images.
class ChainRuleMap {
 public:
  struct Term {
    jet::VarId target_var;
    jet::Expression coefficient;
  };

  ChainRuleMap() = default;
  ChainRuleMap(jet::SpacePtr source, jet::SpacePtr target);

  const jet::SpacePtr& source() const { return source_; }
  const jet::SpacePtr& target() const { return target_; }

  void set_derivation(jet::VarId source_var, std::vector<Term> terms);
  const std::vector<Term>& derivation(jet::VarId source_var) const { return derivation_.at(source_var); }
  /// Image of a source jet; jets above it are reached by the derivations.
  void set_image(jet::JetVar source_jet, jet::Expression image);
  const std::vector<std::pair<jet::JetVar, jet::Expression>>& dictionary() const { return dictionary_; }
  std::vector<std::pair<jet::JetVar, jet::Expression>>& dictionary() { return dictionary_; }

  /// Rules applied to every pushed expression (e.g. v_z0 -> x_z0 x_z1z0).
  jet::RewriteSystem& target_rules() { return target_rules_; }
  const jet::RewriteSystem& target_rules() const { return target_rules_; }

  /// Applies the pushed derivation D_old to a target expression.
  jet::Expression derive(const jet::Expression& target_expr, jet::VarId source_var) const;
  jet::Expression push(const jet::Expression& e, std::size_t max_steps = jet::Reducer::kDefaultBudget) const;

  /// Human-readable derivative rewrites and dictionary.
  std::vector<std::string> describe() const;

 private:
  jet::SpacePtr source_, target_;
  std::vector<std::vector<Term>> derivation_;
  std::vector<std::pair<jet::JetVar, jet::Expression>> dictionary_;
  jet::RewriteSystem target_rules_;
};

/// How a one-form turns into a chain rule in z-space.
struct ReciprocalSpec {
  std::string potential;                  // target field playing the old first variable (X or x)
  std::vector<std::string> time_targets;  // target variable for each later old variable (z1, z(n+1))
  std::vector<std::string> solve_for;     // source field solved from each one-form coefficient
  /// Further images for source fields (e.g. Om2 -> 2 X_z2).
  std::vector<std::pair<std::string, jet::Expression>> extra_images;
};

/// Derives D_old -> combination of d/dz from the one-form dz0 = a dX + b dY + c dT:
/// X_0 = 1/a, X_k = -coefficient_k / a, and solves those relations for the listed fields.
ChainRuleMap derive_chain_rule(const ExactOneForm& form, const jet::SpacePtr& target, const ReciprocalSpec& spec);

ExactOneForm ch_one_form(int n);
ExactOneForm mch_one_form(int n);
ChainRuleMap ch_chain_rule(int n, const jet::SpacePtr& target);
/// Inverse of ch_chain_rule: z-space jets of X back to CH fields,
/// d_zk -> X_zk D_X (+ D_Y or D_T), X_z0 -> 1/P, X_zi -> Om_i/2, X_z(n+1) -> -Delta/P.
ChainRuleMap ch_inverse_chain_rule(int n, const jet::SpacePtr& zspace);
/// The v fields stay fields of the target, tied to x by v_z0 -> x_z0 x_(i)z0.
ChainRuleMap mch_chain_rule(int n, const jet::SpacePtr& target);

/// Cross-derivatives of the one-form coefficients: pairs involving the first
/// old variable modulo the source system, every pair in reciprocal coordinates.
std::vector<ResidualOutcome> check_one_form_closed(const ExactOneForm& form, const systems::EquationSystem& source,
                                                   const ChainRuleMap& map, Report& rep);

/// Pushes every residual of `source` through `map` and reduces modulo `target`.
/// Unit factors must be constants times powers of `unit_jet`.
Report verify_reciprocal(const systems::EquationSystem& source, const ChainRuleMap& map,
                         const systems::EquationSystem& target, jet::JetVar unit_jet, std::string task,
                         std::size_t max_steps = jet::Reducer::kDefaultBudget);

Report verify_reciprocal_ch(int n, std::size_t max_steps = jet::Reducer::kDefaultBudget);
Report verify_reciprocal_mch(int n, std::size_t max_steps = jet::Reducer::kDefaultBudget);

/// Derivatives M_0, M_1..M_n of the CBS potential 4M = x_0 - m, for a given
/// expression x in z-space. Throws DivisionByZero when x_0 vanishes.
std::vector<jet::Expression> cbs_potential_from_mcbs(const jet::SpacePtr& space, const jet::Expression& x, int n);
/// M_0, M_1..M_n from the X-form definitions.
std::vector<jet::Expression> cbs_potential_from_x_form(const jet::SpacePtr& space, const jet::Expression& X, int n);
/// CBS residual i with M given through its first derivatives: jets with a z0
/// derivative come from M_0, the rest from M_i.
jet::Expression cbs_in_terms_of(const jet::SpacePtr& space, const std::vector<jet::Expression>& m_derivs, int i);

Report verify_miura(int n, std::size_t max_steps = jet::Reducer::kDefaultBudget);

/// Hypothesis set for the composite dictionary in z-space with fields X and x:
/// x_z0 -> X_z0z0/X_z0 + X_z0, the solved x_z(i+1) relations, and the X-form.
struct CompositeContext {
  int n = 1;
  jet::SpacePtr zspace;
  ChainRuleMap ch;   // CH fields -> z-space, Om_i -> 2 X_i
  ChainRuleMap mch;  // mCH fields -> z-space, v_i -> (x_(i+1) + x_(i)z0z0)/x_z0
  jet::RewriteSystem hypotheses;
  /// CH space extended by the mCH fields om1 and delta, as functions of (X, Y, T).
  jet::SpacePtr xspace;
  jet::RewriteSystem ch_rules;  // CH system over xspace
};
CompositeContext build_composite_context(int n);

/// Checks an identity between an mCH-side and a CH-side expression after pushing both into z-space.
ResidualOutcome check_cross_identity(const CompositeContext& ctx, const std::string& label,
                                     const jet::Expression& mch_side, const jet::Expression& ch_side,
                                     std::size_t max_steps, std::size_t* steps = nullptr);

Report verify_composite_dictionary(int n, std::size_t max_steps = jet::Reducer::kDefaultBudget);

struct Hypothesis {
  jet::Expression residual;
  jet::JetVar lead;
  std::string label;
};

/// Orients the hypotheses in order on their leads and reduces the goal.
Report check_derivation(const std::vector<Hypothesis>& hypotheses, const jet::Expression& goal,
                        const jet::Ranking& ranking, std::string task,
                        std::size_t max_steps = jet::Reducer::kDefaultBudget);

/// Ratio a/b if it is a constant times a monomial in jets, else nullopt.
std::optional<jet::Expression> unit_ratio(const jet::Expression& a, const jet::Expression& b);

}  // namespace chmr::transforms
