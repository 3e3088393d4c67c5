#include <gtest/gtest.h>

#include "chmr/errors.hpp"
#include "chmr/reductions/reductions.hpp"
#include "chmr/systems/systems.hpp"

namespace chmr::reductions {
namespace {

using jet::Expression;
using jet::SpacePtr;

Expression E(const SpacePtr& sp, std::string_view text) { return jet::parse_expression(text, sp); }

std::string failures(const Report& rep) {
  std::string s;
  for (const auto& o : rep.residuals)
    if (!o.ok()) s += o.label + ": " + o.remainder_text + "\n";
  return s;
}

TEST(Specialize, DroppedVariableKillsDerivatives) {
  const auto ch = systems::build_ch_system(1);
  const SpacePtr ds = dym_space();
  EXPECT_TRUE(specialize(E(ch.space, "P_Y + P_XY"), ds, {{"Y", std::nullopt}}).is_zero());
  EXPECT_EQ(specialize(E(ch.space, "P_XT*Om1"), ds, {{"Y", std::nullopt}}), E(ds, "P_XT*Om1"));
}

TEST(Specialize, IdentifiedVariablesAddOrders) {
  const auto ch = systems::build_ch_system(1);
  const SpacePtr ls = ch_line_space();
  EXPECT_EQ(specialize(E(ch.space, "P_XT + Delta_T"), ls, {{"T", "X"}}), E(ls, "P_XX + Delta_X"));
}

TEST(Specialize, MissingFieldIsRejected) {
  const auto ch = systems::build_ch_system(1);
  EXPECT_THROW(specialize(E(ch.space, "Phi"), dym_space(), {}), DomainError);
}

TEST(CaseOne, AllIdentificationsHold) {
  const Report rep = reduce_case1();
  EXPECT_TRUE(rep.passed()) << failures(rep);
  EXPECT_GE(rep.residuals.size(), 15u);
}

TEST(CaseOne, DymResidualWithKOneEqualTwo) {
  const SpacePtr ds = dym_space();
  const Expression r = dym_residual(ds, Expression(2));
  // (1/P)_X = -P_X/P^2 expanded by hand
  const Expression inv_x = E(ds, "-P_X/P^2");
  const Expression expected = E(ds, "U_T") - 2 * (jet::differentiate(inv_x, {"X", "X"}) - inv_x);
  EXPECT_EQ(r, expected);
  // U = 4, P = 2 constant state
  std::map<jet::FieldId, Expression> c{{ds->field_id("U"), Expression(4)}, {ds->field_id("P"), Expression(2)}};
  EXPECT_TRUE(jet::substitute(r, c).is_zero());
}

TEST(CaseOne, QiaoResidualWithKTwoEqualOne) {
  const SpacePtr qs = qiao_space();
  const Expression r = qiao_residual(qs, Expression(1));
  const Expression w = E(qs, "1/(2*u^2)");
  EXPECT_EQ(r, E(qs, "u_t") - jet::differentiate(w, {"x", "x", "x"}) + jet::differentiate(w, "x"));
  EXPECT_TRUE(jet::substitute(r, "u", Expression(1)).is_zero());
}

TEST(CaseOne, VFromOmegaMatchesDifferentiatedOracle) {
  const SpacePtr qs = qiao_space();
  // om1_x = u v1_x with om1 = k2/u gives v1_x = -k2 u_x/u^3
  EXPECT_EQ(jet::differentiate(E(qs, "k2/(2*u^2)"), "x"), E(qs, "-k2*u_x/u^3"));
  const auto mch = systems::build_mch_system(1);
  const Expression om = specialize(mch.equation("om1").residual, qs, {{"y", std::nullopt}});
  const auto bad = jet::substitute(om, {{qs->field_id("om1"), E(qs, "k2/u")}, {qs->field_id("v1"), E(qs, "k2/u^2")}});
  EXPECT_FALSE(bad.is_zero()) << "a wrong v1 must leave a remainder";
}

TEST(CaseOne, KRelationIsForced) {
  const Report rep = reduce_case1();
  bool forced = false;
  for (const auto& o : rep.residuals)
    if (o.label == "om1 - (Om1_X + Om1)/2 does not vanish for free k1, k2") {
      forced = true;
      EXPECT_FALSE(o.reduced_to_zero);
      EXPECT_FALSE(o.expect_zero);
    }
  EXPECT_TRUE(forced);
}

TEST(CaseOne, PotentialEquationsAsPrinted) {
  const SpacePtr kdv = jet::parse_catalog("var z0, z2\nfield M(z0, z2)\nfield x(z0, z2)\nnonzero x_z0\n");
  EXPECT_EQ(potential_kdv_residual(kdv, "M"), E(kdv, "M_z0z2 + M_z0z0z0z0 + 12*M_z0*M_z0z0"));
  EXPECT_EQ(potential_mkdv_residual(kdv, "x"), E(kdv, "x_z2 + x_z0z0z0 - 1/2*x_z0^3"));
}

TEST(CaseTwo, AllIdentificationsHold) {
  const Report rep = reduce_case2();
  EXPECT_TRUE(rep.passed()) << failures(rep);
  EXPECT_GE(rep.residuals.size(), 12u);
}

TEST(CaseTwo, CamassaHolmAsPrinted) {
  const SpacePtr ls = ch_line_space();
  EXPECT_EQ(ch_residual(ls), E(ls, "U_Y + U*Om1_X + 1/2*Om1*U_X"));
}

TEST(CaseTwo, AknsAsPrinted) {
  const SpacePtr ak = jet::parse_catalog("var z0, z1\nfield M(z0, z1)\nfield x(z0, z1)\nnonzero x_z0\n");
  EXPECT_EQ(akns_residual(ak, "M"), E(ak, "M_z0z0z0z1 + 4*M_z1*M_z0z0 + 8*M_z0*M_z0z1"));
  EXPECT_TRUE(jet::substitute(akns_residual(ak, "M"), "M", Expression(3)).is_zero());
  EXPECT_EQ(modified_akns_residual(ak, "x"),
            E(ak, "x_z0z0z0z1/x_z0 - (x_z0z0z1 - 1)*x_z0z0/x_z0^2 - x_z0*x_z0z1"));
}

TEST(CaseTwo, SignFlippedCamassaHolmIsRejected) {
  const auto ch = systems::build_ch_system(1);
  const SpacePtr ls = ch_line_space();
  const Expression P = E(ls, "P");
  const Expression py = specialize(ch.equation("P_Y").residual, ls, {{"T", "X"}});
  const Expression flipped = E(ls, "U_Y + U*Om1_X - 1/2*Om1*U_X");
  EXPECT_FALSE((jet::substitute(flipped, "U", P * P) - 2 * P * py).is_zero());
}

}  // namespace
}  // namespace chmr::reductions
