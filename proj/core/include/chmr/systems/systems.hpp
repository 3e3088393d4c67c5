#pragma once

#include <string>
#include <vector>

#include "chmr/jet/rewrite.hpp"
#include "chmr/report.hpp"

namespace chmr::systems {

struct Equation {
  std::string label;
  jet::Expression residual;
};

/// Named residuals over one space, optionally oriented into a rewrite system.
struct EquationSystem {
  std::string name;
  jet::SpacePtr space;
  std::vector<Equation> equations;
  jet::RewriteSystem orientation;
  std::vector<std::string> assumptions;

  const Equation& equation(std::string_view label) const;
  /// Catalog followed by one "eq <label>: <residual>" line per equation.
  std::string to_text() const;
};

/// Reads the format written by EquationSystem::to_text (no orientation).
EquationSystem parse_system(std::string_view text, std::string name = {});

/// Fields P, Om1..Omn, Delta over (X, Y, T) together with U, lam and the wave Phi.
jet::SpacePtr ch_space(int n);
/// Fields u, v1..vn, om1..omn, delta over (x, y, t) with lam, s = sqrt(lam), I = sqrt(-1),
/// and the wave components phi, phih.
jet::SpacePtr mch_space(int n);

/// Ranking under which both hierarchies orient: T-derivatives, then Y-derivatives,
/// then the listed fields, then the orderly tail.
jet::Ranking hierarchy_ranking(const jet::Space& space, const std::vector<std::string>& dominant_fields);

EquationSystem build_ch_system(int n);
EquationSystem build_mch_system(int n);

/// Residual counts (n + 2 for CH, 2n + 2 for mCH) and constant-solution smoke tests.
Report verify_hierarchies(int n);

/// The spectral condition lam_T -> lam^n lam_Y (or in y, t for mCH) over `space`.
jet::RewriteSystem spectral_conditions(const jet::SpacePtr& space, const jet::Ranking& ranking, int n,
                                       const std::string& time, const std::string& evolution);

/// The CBS family in z0..z(n+1): the X-form, the definitions of M, and the CBS equations.
struct CbsFamily {
  jet::SpacePtr space;
  EquationSystem x_form;
  EquationSystem m_definitions;  // residuals 4 M_i - (...) and 4 M_0 - (...)
  EquationSystem cbs;
};
CbsFamily build_cbs_family(int n);

/// The mCBS family: the x-form and the definitions of m.
struct McbsFamily {
  jet::SpacePtr space;
  EquationSystem x_form;
  EquationSystem m_definitions;
};
McbsFamily build_mcbs_family(int n);

/// z-space holding the listed fields, each depending on z0..z(n+1), with the
/// z0-derivative of the first one invertible.
jet::SpacePtr z_space(int n, const std::vector<std::string>& fields);

/// CBS residual of component i in a field M of z-space.
jet::Expression cbs_residual(const jet::SpacePtr& space, const std::string& field, int i);
/// X-form residual of component i: -(X_{i+1}/X_0)_0 - (W_0 - W^2/2)_i with W = X_00/X_0 + X_0.
jet::Expression x_form_residual(const jet::SpacePtr& space, const std::string& field, int i);
/// mCBS residual of component i: (x_{i+1}/x_0 + x_{i00}/x_0)_0 - (x_0^2/2)_i.
jet::Expression mcbs_residual(const jet::SpacePtr& space, const std::string& field, int i);

/// Linear problem. Each row gives one wave jet (lhs) as a signed sum of
/// coefficient * wave-jet terms, so single coefficients can be mutated.
struct LaxTerm {
  jet::Expression coefficient;
  jet::JetVar wave;
};
struct LaxRow {
  jet::JetVar lhs;
  std::vector<LaxTerm> terms;
  jet::Expression rhs() const;
};
struct LaxPair {
  enum class Kind { kScalar, kMatrix };
  Kind kind = Kind::kScalar;
  int n = 1;
  jet::SpacePtr space;
  std::vector<LaxRow> spatial;
  std::vector<LaxRow> temporal;
  jet::RewriteSystem spectral;
  std::vector<jet::FieldId> waves;
  /// Definitional substitutions applied to coefficients before the check (U -> P^2).
  std::vector<std::pair<std::string, jet::Expression>> definitions;

  std::size_t coefficient_count() const;
  /// Copy with the sign of the k-th stored coefficient flipped (spatial rows first).
  LaxPair with_flipped_sign(std::size_t k) const;
  std::string coefficient_label(std::size_t k) const;
};

LaxPair build_ch_lax(int n);
LaxPair build_mch_lax(int n);

/// Cross-derivative of the linear problem, reduced modulo the system, the
/// spectral conditions and the problem itself, split into wave coefficients.
Report check_lax_compatibility(const LaxPair& lax, const EquationSystem& sys,
                               std::size_t max_steps = jet::Reducer::kDefaultBudget);

/// Denominator factors of e that are not products of declared-invertible jets.
std::vector<std::string> division_assumptions(const jet::Expression& e);

}  // namespace chmr::systems
