#pragma once

#include <map>
#include <optional>
#include <string>

#include "chmr/jet/rewrite.hpp"
#include "chmr/report.hpp"

namespace chmr::reductions {

/// Source variable -> target variable; std::nullopt makes derivatives in it vanish.
using VariableIdentification = std::map<std::string, std::optional<std::string>>;

/// Rewrites e over `target`: fields keep their names, derivative orders are
/// moved to the identified variables, and jets differentiated in a dropped variable become 0.
jet::Expression specialize(const jet::Expression& e, const jet::SpacePtr& target, const VariableIdentification& vars);

/// (X, T) with P, U, Om1, Delta and the constant k1.
jet::SpacePtr dym_space();
/// (x, t) with u, v1, om1, delta and the constant k2.
jet::SpacePtr qiao_space();
/// (X, Y) with P, U, Om1, Delta.
jet::SpacePtr ch_line_space();
/// (x, y) with u, v1, om1, delta.
jet::SpacePtr mch_line_space();

/// U_T - k[(1/P)_XXX - (1/P)_X] with U = P^2 = sqrt(U)^2.
jet::Expression dym_residual(const jet::SpacePtr& space, const jet::Expression& k);
/// u_t - k[(1/(2u^2))_xx - 1/(2u^2)]_x.
jet::Expression qiao_residual(const jet::SpacePtr& space, const jet::Expression& k);
/// U_Y + U Om1_X + Om1 U_X / 2.
jet::Expression ch_residual(const jet::SpacePtr& space);
/// (M_z2 + M_z0z0z0 + 6 M_z0^2)_z0 over (z0, z2).
jet::Expression potential_kdv_residual(const jet::SpacePtr& space, const std::string& field);
/// x_z2 + x_z0z0z0 - x_z0^3/2 over (z0, z2).
jet::Expression potential_mkdv_residual(const jet::SpacePtr& space, const std::string& field);
/// M_z0z0z0z1 + 4 M_z1 M_z0z0 + 8 M_z0 M_z0z1 over (z0, z1).
jet::Expression akns_residual(const jet::SpacePtr& space, const std::string& field);
/// ((x_z1z0z0 - 1)/x_z0)_z0 - (x_z0^2/2)_z1 over (z0, z1).
jet::Expression modified_akns_residual(const jet::SpacePtr& space, const std::string& field);

/// Y-independent first component: Dym, Qiao, k1 = 2 k2, potential KdV and mKdV.
Report reduce_case1(std::size_t max_steps = jet::Reducer::kDefaultBudget);
/// First component with T = X: CH, modified CH, AKNS and modified AKNS.
Report reduce_case2(std::size_t max_steps = jet::Reducer::kDefaultBudget);

}  // namespace chmr::reductions
