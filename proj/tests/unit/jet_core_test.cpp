#include <gtest/gtest.h>

#include <random>

#include "chmr/errors.hpp"
#include "chmr/jet/expression.hpp"
#include "chmr/jet/properties.hpp"
#include "chmr/jet/rewrite.hpp"

namespace chmr::jet {
namespace {

SpacePtr ch_space() {
  return parse_catalog(R"(
var X, Y, T
field lam(Y, T)
ext s : s^2 = lam
field U(X, Y, T)
field P(X, Y, T)
field Om1(X, Y, T)
field Phi(X, Y, T)
nonzero P
nonzero U
nonzero lam
)");
}

SpacePtr z_space() {
  return parse_catalog(R"(
var z0, z1, z2
field X(z0, z1, z2)
nonzero X_z0
)");
}

Expression E(const SpacePtr& sp, std::string_view text) { return parse_expression(text, sp); }

TEST(Parse, AcceptsProductOfFieldAndDerivative) {
  auto sp = ch_space();
  const auto e = E(sp, "U_T - 2*P*P_T");
  EXPECT_EQ(e.numerator().size(), 2u);
  EXPECT_TRUE(e.denominator().is_constant());
}

TEST(Parse, ThirdMinusFirstDerivativeHasTwoMonomials) {
  auto sp = ch_space();
  const auto e = E(sp, "Om1_XXX - Om1_X");
  EXPECT_EQ(e.numerator().size(), 2u);
  EXPECT_EQ(e.jet_vars().size(), 2u);
}

TEST(Parse, DanglingUnderscoreReportsOffset) {
  auto sp = ch_space();
  try {
    E(sp, "P_");
    FAIL() << "expected a parse error";
  } catch (const ParseError& err) {
    EXPECT_EQ(err.offset(), 2u);
  }
}

TEST(Parse, UndeclaredSymbolIsRejected) {
  auto sp = ch_space();
  EXPECT_THROW(E(sp, "Q + 1"), DomainError);
}

TEST(Parse, DerivativeInForeignVariableIsRejected) {
  auto sp = ch_space();
  EXPECT_THROW(E(sp, "lam_X"), DomainError);
}

TEST(Parse, RationalLiteralsAndNegativePowers) {
  auto sp = ch_space();
  EXPECT_EQ(E(sp, "3/4*P^-2*P^2"), Expression(Rational(3, 4)));
  EXPECT_EQ(E(sp, "(P+1)^2 - P^2 - 2*P"), Expression(1));
}

TEST(Parse, MultiCharacterVariables) {
  auto sp = z_space();
  const JetVar j = sp->jet("X", "z0z0z1");
  EXPECT_EQ(j.order(sp->variable("z0")), 2u);
  EXPECT_EQ(j.order(sp->variable("z1")), 1u);
  EXPECT_EQ(sp->jet_name(j), "X_z0z0z1");
}

TEST(Differentiate, ProductRule) {
  auto sp = ch_space();
  EXPECT_EQ(differentiate(E(sp, "P^2"), "X"), E(sp, "2*P*P_X"));
}

TEST(Differentiate, SpectralParameterIsConstantInX) {
  auto sp = ch_space();
  EXPECT_TRUE(differentiate(E(sp, "lam"), "X").is_zero());
  EXPECT_EQ(differentiate(E(sp, "lam"), "T"), E(sp, "lam_T"));
}

TEST(Differentiate, QuotientRule) {
  auto sp = z_space();
  EXPECT_EQ(differentiate(E(sp, "1/X_z0"), "z0"), E(sp, "-X_z0z0/X_z0^2"));
}

TEST(Differentiate, SquareRootGenerator) {
  auto sp = ch_space();
  // s^2 = lam, so 2 s s_T = lam_T
  EXPECT_EQ(differentiate(E(sp, "s"), "T"), E(sp, "s*lam_T/(2*lam)"));
  EXPECT_TRUE(differentiate(E(sp, "s"), "X").is_zero());
}

TEST(Substitute, DefinitionOfU) {
  auto sp = ch_space();
  EXPECT_EQ(substitute(E(sp, "U_T"), "U", E(sp, "P^2")), E(sp, "2*P*P_T"));
}

TEST(Substitute, ChainRuleImageMatchesHandExpansion) {
  auto sp = z_space();
  // with P = 1/X_0 and d/dX = (1/X_0) d/dz0, P_X becomes -X_00/X_0^3
  const auto P = E(sp, "1/X_z0");
  const auto PX = differentiate(P, "z0") / E(sp, "X_z0");
  EXPECT_EQ(PX, E(sp, "-X_z0z0/X_z0^3"));
}

TEST(Substitute, IdentityLeavesExpressionAlone) {
  auto sp = ch_space();
  const auto e = E(sp, "U_XX*P + U/P_Y");
  EXPECT_EQ(substitute(e, "U", E(sp, "U")), e);
}

TEST(Normalize, CancelsCommonFactor) {
  auto sp = ch_space();
  EXPECT_TRUE(normalize(E(sp, "(U*U_X)/U - U_X")).is_zero());
}

TEST(Normalize, EliminatesSquareRootRelation) {
  auto sp = ch_space();
  EXPECT_TRUE(E(sp, "s^2*Phi - lam*Phi").is_zero());
}

TEST(Normalize, ImaginaryUnit) {
  auto sp = parse_catalog("var x\next I : I^2 = -1\n");
  EXPECT_TRUE(E(sp, "I^2 + 1").is_zero());
  EXPECT_EQ(E(sp, "1/I"), E(sp, "-I"));
}

TEST(Normalize, RationalizesGeneratorDenominators) {
  auto sp = ch_space();
  const auto e = E(sp, "1/(1+s)");
  EXPECT_FALSE(e.denominator().contains(sp->jet("s")));
  EXPECT_EQ(e * E(sp, "1+s"), Expression(1));
}

TEST(Normalize, Idempotent) {
  auto sp = ch_space();
  const auto e = E(sp, "(P_X*U + 3)/(2*P^2 - 4*U)");
  EXPECT_EQ(normalize(normalize(e)), normalize(e));
  EXPECT_TRUE((e - e).is_zero());
}

TEST(Normalize, DenominatorIsMonic) {
  auto sp = ch_space();
  const auto e = E(sp, "1/(3*P + 6*U)");
  EXPECT_EQ(e.denominator().lead().coeff, Rational(1));
}

TEST(Reduce, SpectralConditionPowers) {
  auto sp = ch_space();
  RewriteSystem rs(sp, Ranking::orderly());
  rs.add({sp->jet("lam", "T"), E(sp, "lam^2*lam_Y"), "spectral"});
  EXPECT_EQ(reduce_modulo(E(sp, "lam_T*lam"), rs), E(sp, "lam^3*lam_Y"));
}

TEST(Reduce, ProlongsRulesThroughDerivatives) {
  auto sp = ch_space();
  EXPECT_THROW(E(sp, "(P*Om1)_X"), ParseError);  // suffixes only apply to symbols
  RewriteSystem rs(sp, Ranking::eliminating_variables(*sp, {"T", "Y"}));
  rs.add({sp->jet("P", "Y"), E(sp, "-(P_X*Om1 + P*Om1_X)/2")});
  EXPECT_EQ(reduce_modulo(E(sp, "P_Y"), rs), E(sp, "-(P_X*Om1 + P*Om1_X)/2"));
  EXPECT_EQ(reduce_modulo(E(sp, "P_XY"), rs), E(sp, "-(P_XX*Om1 + 2*P_X*Om1_X + P*Om1_XX)/2"));
}

TEST(Reduce, NoRuleApplies) {
  auto sp = ch_space();
  RewriteSystem rs(sp, Ranking::orderly());
  rs.add({sp->jet("lam", "T"), E(sp, "lam*lam_Y")});
  const auto e = E(sp, "U_XX/P + lam_Y");
  EXPECT_EQ(reduce_modulo(e, rs), e);
}

TEST(Reduce, RejectsRulesAgainstTheRanking) {
  auto sp = ch_space();
  RewriteSystem rs(sp, Ranking::orderly());
  EXPECT_THROW(rs.add({sp->jet("P", "T"), E(sp, "P_XXX")}), DomainError);
  EXPECT_THROW(rs.add({sp->jet("P", "X"), E(sp, "P_XX")}), DomainError);
}

TEST(Reduce, BudgetIsReported) {
  auto sp = ch_space();
  RewriteSystem rs(sp, Ranking::orderly());
  rs.add({sp->jet("lam", "T"), E(sp, "lam*lam_Y")});
  EXPECT_THROW(reduce_modulo(E(sp, "lam_TTTT"), rs, 2), BudgetExhausted);
}

TEST(Orient, SolvesLinearLeader) {
  auto sp = ch_space();
  RewriteSystem empty(sp, Ranking::orderly());
  const auto rule = orient(E(sp, "P*lam_T - P*lam^2*lam_Y"), sp->jet("lam", "T"), empty);
  EXPECT_EQ(rule.rhs, E(sp, "lam^2*lam_Y"));
}

// Property checks over random rational functions in a three-variable jet space.

TEST(Properties, Leibniz) {
  RandomExpressions gen(7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = gen.rational(), b = gen.rational();
    const VarId v = static_cast<VarId>(gen.pick(0, 2));
    EXPECT_EQ(differentiate(a * b, v), differentiate(a, v) * b + a * differentiate(b, v));
  }
}

TEST(Properties, DerivativesCommute) {
  RandomExpressions gen(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto e = gen.rational();
    const VarId v1 = static_cast<VarId>(gen.pick(0, 2)), v2 = static_cast<VarId>(gen.pick(0, 2));
    EXPECT_EQ(differentiate(differentiate(e, v1), v2), differentiate(differentiate(e, v2), v1));
  }
}

TEST(Properties, PrintParseRoundTrip) {
  RandomExpressions gen(13);
  for (int trial = 0; trial < 60; ++trial) {
    const auto e = gen.rational();
    EXPECT_EQ(parse_expression(e.to_string(), gen.space()), e) << e.to_string();
  }
}

bool vanishes_at(const Expression& e, RandomExpressions& gen, int points) {
  bool all_zero = true;
  for (int taken = 0; taken < points;)
    if (const auto v = sample_at_random_point(e, gen)) {
      ++taken;
      all_zero = all_zero && sgn(*v) == 0;
    }
  return all_zero;
}

TEST(Properties, ZeroTestAgreesWithRandomEvaluation) {
  RandomExpressions gen(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = gen.rational(), b = gen.rational();
    const Expression zero = (a + b) * (a - b) - (a * a - b * b);
    EXPECT_TRUE(zero.is_zero());
    const Expression nz = a * b + Expression(1) - b * a;
    EXPECT_EQ(nz.is_zero(), vanishes_at(nz, gen, 20));
    const auto c = gen.rational();
    EXPECT_EQ(c.is_zero(), vanishes_at(c, gen, 20)) << c.to_string();
  }
}

TEST(Properties, SeededEngineCheckPassesAndIsReproducible) {
  const PropertyCounts counts{20, 20, 20, 20, 20};
  const Report a = engine_property_check(5, counts), b = engine_property_check(5, counts);
  EXPECT_TRUE(a.passed());
  ASSERT_EQ(a.residuals.size(), 4u);
  for (std::size_t i = 0; i < a.residuals.size(); ++i) EXPECT_EQ(a.residuals[i].label, b.residuals[i].label);
}

TEST(Properties, ReductionIsIdempotentAndLowersRank) {
  auto sp = ch_space();
  const Ranking ranking = Ranking::eliminating_variables(*sp, {"T", "Y"});
  RewriteSystem rs(sp, ranking);
  rs.add({sp->jet("P", "Y"), E(sp, "-(P_X*Om1 + P*Om1_X)/2")});
  rs.add({sp->jet("lam", "T"), E(sp, "lam*lam_Y")});
  const auto e = E(sp, "P_XYY*lam_TT + U/P_Y");
  const auto r = reduce_modulo(e, rs);
  EXPECT_EQ(reduce_modulo(r, rs), r);
  EXPECT_FALSE(ranking.less(*leading_jet(e, ranking), *leading_jet(r, ranking)));
}

}  // namespace
}  // namespace chmr::jet
