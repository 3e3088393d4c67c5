#include <gtest/gtest.h>

#include "chmr/errors.hpp"
#include "chmr/systems/systems.hpp"

namespace chmr::systems {
namespace {

using jet::Expression;

Expression E(const jet::SpacePtr& sp, std::string_view text) { return jet::parse_expression(text, sp); }

jet::Rational value_at(const Expression& e, const std::function<jet::Rational(jet::JetVar)>& v) {
  auto g = [&](jet::JetVar j) { return jet::GaussianRational{v(j), 0}; };
  return jet::evaluate_exact(e.numerator(), g).re / jet::evaluate_exact(e.denominator(), g).re;
}

TEST(ChSystem, ResidualCounts) {
  EXPECT_EQ(build_ch_system(1).equations.size(), 3u);
  EXPECT_EQ(build_ch_system(2).equations.size(), 4u);
  EXPECT_EQ(build_ch_system(3).equations.size(), 5u);
}

TEST(ChSystem, MiddleEquationCouplesNeighbours) {
  const auto sys = build_ch_system(2);
  const auto& mid = sys.equation("Om1").residual;
  EXPECT_EQ(mid, E(sys.space, "Om1_XXX - Om1_X + P*(P_X*Om2 + P*Om2_X)"));
}

TEST(ChSystem, ConstantSolution) {
  for (int n = 1; n <= 3; ++n) {
    const auto sys = build_ch_system(n);
    std::map<jet::FieldId, Expression> c{{sys.space->field_id("P"), Expression(3)},
                                         {sys.space->field_id("Delta"), Expression(7)}};
    for (int i = 1; i <= n; ++i) c[sys.space->field_id("Om" + std::to_string(i))] = Expression(0);
    for (const auto& eq : sys.equations) {
      EXPECT_FALSE(eq.residual.is_zero()) << eq.label;
      EXPECT_TRUE(jet::substitute(eq.residual, c).is_zero()) << eq.label;
    }
  }
}

TEST(MchSystem, ResidualCounts) {
  EXPECT_EQ(build_mch_system(1).equations.size(), 4u);
  EXPECT_EQ(build_mch_system(2).equations.size(), 6u);
  EXPECT_EQ(build_mch_system(3).equations.size(), 8u);
}

TEST(MchSystem, ConstantSolution) {
  for (int n = 1; n <= 3; ++n) {
    const auto sys = build_mch_system(n);
    std::map<jet::FieldId, Expression> c{{sys.space->field_id("u"), Expression(2)},
                                         {sys.space->field_id("delta"), Expression(-5)}};
    for (int i = 1; i <= n; ++i) {
      c[sys.space->field_id("om" + std::to_string(i))] = Expression(0);
      c[sys.space->field_id("v" + std::to_string(i))] = Expression(0);
    }
    for (const auto& eq : sys.equations) {
      EXPECT_FALSE(eq.residual.is_zero()) << eq.label;
      EXPECT_TRUE(jet::substitute(eq.residual, c).is_zero()) << eq.label;
    }
  }
}

TEST(Systems, RejectNonPositiveComponentCount) {
  EXPECT_THROW(build_ch_system(0), DomainError);
  EXPECT_THROW(build_mch_system(-1), DomainError);
  EXPECT_THROW(build_cbs_family(0), DomainError);
  EXPECT_THROW(build_mcbs_family(0), DomainError);
  EXPECT_THROW(build_ch_lax(0), DomainError);
  EXPECT_THROW(build_mch_lax(0), DomainError);
}

TEST(Systems, OrientationIsSound) {
  for (int n = 1; n <= 3; ++n) {
    for (const auto& sys : {build_ch_system(n), build_mch_system(n)}) {
      for (const auto& eq : sys.equations)
        EXPECT_TRUE(jet::reduce_modulo(eq.residual, sys.orientation).is_zero()) << sys.name << " " << eq.label;
      for (const auto& rule : sys.orientation.rules())
        EXPECT_FALSE(rule.rhs.contains(rule.lhs));
    }
    const auto cbs = build_cbs_family(n);
    for (const auto& eq : cbs.x_form.equations)
      EXPECT_TRUE(jet::reduce_modulo(eq.residual, cbs.x_form.orientation).is_zero()) << eq.label;
    const auto mcbs = build_mcbs_family(n);
    for (const auto& eq : mcbs.x_form.equations)
      EXPECT_TRUE(jet::reduce_modulo(eq.residual, mcbs.x_form.orientation).is_zero()) << eq.label;
  }
}

TEST(Systems, OrientationLeaders) {
  const auto ch = build_ch_system(2);
  std::vector<std::string> leaders;
  for (const auto& r : ch.orientation.rules()) leaders.push_back(ch.space->jet_name(r.lhs));
  EXPECT_EQ(leaders, (std::vector<std::string>{"Om1_XXX", "P_Y", "P_T", "Delta_X"}));
  const auto mch = build_mch_system(2);
  leaders.clear();
  for (const auto& r : mch.orientation.rules()) leaders.push_back(mch.space->jet_name(r.lhs));
  EXPECT_EQ(leaders, (std::vector<std::string>{"om1_x", "om2_x", "v1_xxx", "u_y", "u_t", "delta_x"}));
}

TEST(Systems, PYRuleExpandsConservedFlux) {
  const auto sys = build_ch_system(1);
  EXPECT_EQ(jet::reduce_modulo(E(sys.space, "P_Y"), sys.orientation), E(sys.space, "-(P_X*Om1 + P*Om1_X)/2"));
}

TEST(Systems, TextRoundTrip) {
  const auto sys = build_ch_system(2);
  const auto back = parse_system(sys.to_text(), sys.name);
  ASSERT_EQ(back.equations.size(), sys.equations.size());
  for (std::size_t i = 0; i < sys.equations.size(); ++i) {
    EXPECT_EQ(back.equations[i].label, sys.equations[i].label);
    EXPECT_EQ(back.equations[i].residual.to_string(), sys.equations[i].residual.to_string());
  }
  EXPECT_EQ(back.space->to_catalog_text(), sys.space->to_catalog_text());
}

TEST(CbsFamily, FirstComponentResidual) {
  const auto fam = build_cbs_family(1);
  EXPECT_EQ(fam.cbs.equations.front().residual,
            E(fam.space, "M_z0z2 + M_z0z0z0z1 + 4*M_z1*M_z0z0 + 8*M_z0*M_z0z1"));
}

TEST(CbsFamily, ConstantPotentialSolves) {
  for (int n = 1; n <= 3; ++n) {
    const auto fam = build_cbs_family(n);
    for (const auto& eq : fam.cbs.equations)
      EXPECT_TRUE(jet::substitute(eq.residual, "M", Expression(4)).is_zero());
  }
}

TEST(McbsFamily, FirstComponentResidual) {
  const auto fam = build_mcbs_family(1);
  const auto expected = jet::differentiate(E(fam.space, "x_z2/x_z0 + x_z1z0z0/x_z0"), "z0") -
                        jet::differentiate(E(fam.space, "x_z0^2/2"), "z1");
  EXPECT_EQ(fam.x_form.equations.front().residual, expected);
}

TEST(McbsFamily, LinearProfileSolves) {
  const auto fam = build_mcbs_family(2);
  const auto& sp = fam.space;
  for (const auto& eq : fam.x_form.equations) {
    // x = 3 z0: only x_z0 is nonzero
    const auto r = value_at(eq.residual, [&](jet::JetVar j) {
      return j == sp->jet("x", "z0") ? jet::Rational(3) : jet::Rational(0);
    });
    EXPECT_EQ(r, 0) << eq.label;
  }
}

TEST(McbsFamily, PotentialCrossDerivativesGiveTheEquation) {
  for (int n = 1; n <= 3; ++n) {
    const auto fam = build_mcbs_family(n);
    const auto& rules = fam.m_definitions.orientation.rules();
    for (int i = 1; i <= n; ++i) {
      const auto z = "z" + std::to_string(i);
      const auto cross = jet::differentiate(rules[0].rhs, z) - jet::differentiate(rules[i].rhs, "z0");
      EXPECT_EQ(cross, -fam.x_form.equations[i - 1].residual);
    }
  }
}

TEST(Lax, ScalarCoefficientForOneComponent) {
  const auto lax = build_ch_lax(1);
  EXPECT_EQ(lax.temporal.front().terms[1].coefficient, E(lax.space, "lam*Om1/2"));
  EXPECT_EQ(lax.coefficient_count(), 5u);
}

TEST(Lax, MatrixSumsForTwoComponents) {
  const auto lax = build_mch_lax(2);
  EXPECT_EQ(lax.temporal.front().terms[1].coefficient, E(lax.space, "lam*(lam*om1 + om2)"));
  EXPECT_EQ(lax.coefficient_count(), 12u);
}

TEST(Lax, SpectralConditionReducesItself) {
  const auto lax = build_mch_lax(2);
  EXPECT_TRUE(jet::reduce_modulo(E(lax.space, "lam_t - lam^2*lam_y"), lax.spectral).is_zero());
}

class LaxCompatibility : public ::testing::TestWithParam<int> {};

TEST_P(LaxCompatibility, ScalarPairIsCompatible) {
  const int n = GetParam();
  const auto rep = check_lax_compatibility(build_ch_lax(n), build_ch_system(n));
  EXPECT_TRUE(rep.passed());
  for (const auto& r : rep.residuals) EXPECT_TRUE(r.reduced_to_zero) << r.label << ": " << r.remainder_text;
}

TEST_P(LaxCompatibility, MatrixPairIsCompatible) {
  const int n = GetParam();
  const auto rep = check_lax_compatibility(build_mch_lax(n), build_mch_system(n));
  EXPECT_TRUE(rep.passed());
  for (const auto& r : rep.residuals) EXPECT_TRUE(r.reduced_to_zero) << r.label << ": " << r.remainder_text;
}

INSTANTIATE_TEST_SUITE_P(Components, LaxCompatibility, ::testing::Values(1, 2, 3));

TEST(LaxMutation, CorruptedPotentialIsCaught) {
  auto lax = build_ch_lax(1);
  lax.spatial.front().terms[1].coefficient = -lax.spatial.front().terms[1].coefficient;  // (lam U + 1)/4
  EXPECT_FALSE(check_lax_compatibility(lax, build_ch_system(1)).passed());
}

TEST(LaxMutation, EverySingleSignFlipIsCaught) {
  for (int n = 1; n <= 2; ++n) {
    const auto ch = build_ch_lax(n);
    const auto chs = build_ch_system(n);
    for (std::size_t k = 0; k < ch.coefficient_count(); ++k)
      EXPECT_FALSE(check_lax_compatibility(ch.with_flipped_sign(k), chs).passed()) << ch.coefficient_label(k);
    const auto mch = build_mch_lax(n);
    const auto mchs = build_mch_system(n);
    for (std::size_t k = 0; k < mch.coefficient_count(); ++k)
      EXPECT_FALSE(check_lax_compatibility(mch.with_flipped_sign(k), mchs).passed()) << mch.coefficient_label(k);
  }
}

}  // namespace
}  // namespace chmr::systems
