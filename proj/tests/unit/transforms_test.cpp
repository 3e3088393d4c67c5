#include <gtest/gtest.h>

#include <random>

#include "chmr/errors.hpp"
#include "chmr/transforms/transforms.hpp"

namespace chmr::transforms {
namespace {

using jet::Expression;
using jet::SpacePtr;

Expression E(const SpacePtr& sp, std::string_view text) { return jet::parse_expression(text, sp); }

std::string describe_failures(const Report& rep) {
  std::string s;
  for (const auto& o : rep.residuals)
    if (!o.ok()) s += o.label + ": " + o.remainder_text + "\n";
  if (rep.budget_exhausted) s += "budget exhausted\n";
  return s;
}

bool any_nonzero(const Report& rep) {
  for (const auto& o : rep.residuals)
    if (!o.informational && !o.reduced_to_zero) return true;
  return false;
}

TEST(ChainRule, ChDerivativeRewrites) {
  const SpacePtr z = systems::z_space(1, {"X"});
  const ChainRuleMap map = ch_chain_rule(1, z);
  const auto& src = *map.source();
  // D_X -> (1/X_0) d_0
  EXPECT_EQ(map.derive(E(z, "X_z2"), src.variable("X")), E(z, "X_z0z2/X_z0"));
  // D_Y -> d_1 - (X_1/X_0) d_0
  EXPECT_EQ(map.derive(E(z, "X_z0"), src.variable("Y")), E(z, "X_z0z1 - X_z1*X_z0z0/X_z0"));
  // D_T -> d_2 - (X_2/X_0) d_0
  EXPECT_EQ(map.derive(E(z, "X_z1"), src.variable("T")), E(z, "X_z1z2 - X_z2*X_z0z1/X_z0"));
}

TEST(ChainRule, ChDictionary) {
  const int n = 2;
  const SpacePtr z = systems::z_space(n, {"X"});
  const ChainRuleMap map = ch_chain_rule(n, z);
  const SpacePtr src = map.source();
  EXPECT_EQ(map.push(E(src, "P")), E(z, "1/X_z0"));
  EXPECT_EQ(map.push(E(src, "Om1")), E(z, "2*X_z1"));
  EXPECT_EQ(map.push(E(src, "Om2")), E(z, "2*X_z2"));
  EXPECT_EQ(map.push(E(src, "Delta")), E(z, "-X_z3/X_z0"));
  EXPECT_EQ(map.push(E(src, "U")), E(z, "1/X_z0^2"));
}

TEST(ChainRule, DictionaryConsistency) {
  const SpacePtr z = systems::z_space(1, {"X"});
  const ChainRuleMap map = ch_chain_rule(1, z);
  // X_0 P - 1 -> 0
  EXPECT_TRUE((E(z, "X_z0") * map.push(E(map.source(), "P")) - 1).is_zero());
}

TEST(ChainRule, MchDictionary) {
  const int n = 2;
  std::vector<std::string> fields{"x", "v1", "v2"};
  const SpacePtr z = systems::z_space(n, fields);
  const ChainRuleMap map = mch_chain_rule(n, z);
  const SpacePtr src = map.source();
  EXPECT_EQ(map.push(E(src, "u")), E(z, "1/x_z0"));
  EXPECT_EQ(map.push(E(src, "om1")), E(z, "x_z1"));
  EXPECT_EQ(map.push(E(src, "om2")), E(z, "x_z2"));
  // x_(n+1) = -delta/u
  EXPECT_EQ(map.push(E(src, "delta")), E(z, "-x_z3/x_z0"));
  // v_0 -> x_0 x_(i)0
  EXPECT_EQ(map.push(E(src, "v1_x")), E(z, "x_z0z1"));
  EXPECT_EQ(map.push(E(src, "v2_x")), E(z, "x_z0z2"));
}

TEST(ChainRule, SizeMismatchRejected) {
  const SpacePtr z = systems::z_space(1, {"X"});
  ReciprocalSpec spec;
  spec.potential = "X";
  spec.time_targets = {"z1"};
  spec.solve_for = {"P", "Om1", "Delta"};
  EXPECT_THROW(derive_chain_rule(ch_one_form(1), z, spec), DomainError);
}

TEST(ChainRule, RoundTripThroughInverse) {
  std::mt19937 rng(7);
  for (int n = 1; n <= 3; ++n) {
    const SpacePtr z = systems::z_space(n, {"X"});
    const ChainRuleMap fwd = ch_chain_rule(n, z);
    const ChainRuleMap back = ch_inverse_chain_rule(n, z);
    const auto sys = systems::build_ch_system(n);
    const SpacePtr src = fwd.source();
    std::vector<std::string> atoms{"P", "P_X", "P_XX", "Om1", "Om1_X", "Delta", "Delta_X", "P_T"};
    for (int i = 2; i <= n; ++i) atoms.push_back("Om" + std::to_string(i) + "_X");
    std::uniform_int_distribution<int> pick(0, static_cast<int>(atoms.size()) - 1), coef(-3, 3), len(1, 4);
    for (int trial = 0; trial < 15; ++trial) {
      Expression e(0);
      for (int t = len(rng); t > 0; --t) {
        Expression m(coef(rng));
        for (int k = len(rng) % 3; k >= 0; --k) m *= E(src, atoms[pick(rng)]);
        e += m;
      }
      e = e / (E(src, atoms[pick(rng)]) + 5);
      const Expression again = back.push(fwd.push(e));
      const Expression gap = jet::reduce_modulo(rehome(again, sys.space) - rehome(e, sys.space), sys.orientation);
      EXPECT_TRUE(gap.is_zero()) << "n=" << n << " " << e.to_string() << " -> " << gap.to_string();
    }
  }
}

TEST(Reciprocal, ChPassesForAllComponentCounts) {
  for (int n = 1; n <= 3; ++n) {
    const Report rep = verify_reciprocal_ch(n);
    EXPECT_TRUE(rep.passed()) << describe_failures(rep);
    int targets = 0;
    for (const auto& o : rep.residuals) {
      if (o.label.find(" -> X") != std::string::npos) ++targets;
      if (o.unit_factor && *o.unit_factor != "identity") EXPECT_NE(o.unit_factor->find("X_z0"), std::string::npos);
    }
    EXPECT_EQ(targets, n) << "every target equation is hit once";
  }
}

TEST(Reciprocal, ChComponentsLandOnMatchingTargets) {
  const Report rep = verify_reciprocal_ch(2);
  std::map<std::string, std::string> landing;
  for (const auto& o : rep.residuals) landing[o.label.substr(0, o.label.find(' '))] = o.label;
  EXPECT_EQ(landing["Om1"], "Om1 -> X1");
  EXPECT_EQ(landing["P_T"], "P_T -> X2");
  EXPECT_EQ(landing["P_Y"], "P_Y -> identity");
}

TEST(Reciprocal, MchPassesForAllComponentCounts) {
  for (int n = 1; n <= 3; ++n) {
    const Report rep = verify_reciprocal_mch(n);
    EXPECT_TRUE(rep.passed()) << describe_failures(rep);
    int targets = 0;
    for (const auto& o : rep.residuals)
      if (o.label.find(" -> x") != std::string::npos) ++targets;
    EXPECT_EQ(targets, n);
  }
}

TEST(Reciprocal, OneFormClosedness) {
  for (int n = 1; n <= 3; ++n) {
    for (const Report& rep : {verify_reciprocal_ch(n), verify_reciprocal_mch(n)}) {
      int closed = 0;
      for (const auto& o : rep.residuals) {
        if (o.label.rfind("one-form closed", 0) != 0) continue;
        if (o.label.find("reciprocal coordinates") != std::string::npos || !o.informational) {
          EXPECT_TRUE(o.reduced_to_zero) << rep.task << " " << o.label << ": " << o.remainder_text;
          ++closed;
        }
      }
      EXPECT_EQ(closed, 5) << rep.task;
    }
  }
}

struct Mutated {
  systems::EquationSystem source, target;
  ChainRuleMap map;
  jet::JetVar unit;
};

Mutated ch_setup(int n, const ExactOneForm& form) {
  const auto fam = systems::build_cbs_family(n);
  const SpacePtr z = systems::z_space(n, {"X"});
  Mutated m{systems::build_ch_system(n), fam.x_form, {}, z->jet("X", "z0")};
  m.target.space = z;
  m.target.orientation = rehome(fam.x_form.orientation, z);
  for (auto& eq : m.target.equations) eq.residual = rehome(eq.residual, z);
  ReciprocalSpec spec;
  spec.potential = "X";
  spec.time_targets = {"z1", "z" + std::to_string(n + 1)};
  spec.solve_for = {"P", "Om1", "Delta"};
  for (int i = 2; i <= n; ++i)
    spec.extra_images.emplace_back("Om" + std::to_string(i), 2 * jet::differentiate(Expression::symbol(z, "X"),
                                                                                    "z" + std::to_string(i)));
  m.map = derive_chain_rule(form, z, spec);
  return m;
}

Report run(const Mutated& m, const ExactOneForm& form) {
  Report rep = verify_reciprocal(m.source, m.map, m.target, m.unit, "mutant");
  for (auto& o : check_one_form_closed(form, m.source, m.map, rep)) rep.residuals.push_back(o);
  return rep;
}

TEST(Mutation, UnmutatedChSetupPasses) {
  const auto form = ch_one_form(2);
  const Report rep = run(ch_setup(2, form), form);
  EXPECT_TRUE(rep.passed()) << describe_failures(rep);
}

TEST(Mutation, ChOneFormSignFlipsAreCaught) {
  for (int n = 1; n <= 2; ++n)
    for (std::size_t k = 0; k < 3; ++k) {
      ExactOneForm form = ch_one_form(n);
      form.coefficients[k].second = -form.coefficients[k].second;
      const Report rep = run(ch_setup(n, form), form);
      EXPECT_TRUE(any_nonzero(rep)) << "n=" << n << " flipped d" << form.coefficients[k].first;
    }
}

TEST(Mutation, ChDictionarySignFlipsAreCaught) {
  const int n = 2;
  const auto form = ch_one_form(n);
  const Mutated base = ch_setup(n, form);
  for (std::size_t k = 0; k < base.map.dictionary().size(); ++k) {
    Mutated m = base;
    m.map.dictionary()[k].second = -m.map.dictionary()[k].second;
    const std::string name = m.map.source()->jet_name(m.map.dictionary()[k].first);
    if (name == "U") continue;  // U only enters the Lax pair; no equation of the system holds it
    EXPECT_TRUE(any_nonzero(run(m, form))) << "flipped image of " << name;
  }
}

TEST(Mutation, MchCorruptedDictionaryIsCaught) {
  const int n = 1;
  const auto fam = systems::build_mcbs_family(n);
  const SpacePtr z = systems::z_space(n, {"x", "v1"});
  systems::EquationSystem target = fam.x_form;
  target.space = z;
  target.orientation = rehome(fam.x_form.orientation, z);
  for (auto& eq : target.equations) eq.residual = rehome(eq.residual, z);
  ChainRuleMap map = mch_chain_rule(n, z);
  const auto src = systems::build_mch_system(n);
  ASSERT_TRUE(verify_reciprocal(src, map, target, z->jet("x", "z0"), "mch").passed());
  // om1 -> 2 x_1
  map.set_image(map.source()->jet("om1"), 2 * E(z, "x_z1"));
  EXPECT_TRUE(any_nonzero(verify_reciprocal(src, map, target, z->jet("x", "z0"), "mch")));
}

TEST(Miura, PassesForAllComponentCounts) {
  for (int n = 1; n <= 3; ++n) {
    const Report rep = verify_miura(n);
    EXPECT_TRUE(rep.passed()) << describe_failures(rep);
    EXPECT_EQ(rep.residuals.size(), 1u + 4u * n);
  }
}

TEST(Miura, LinkRecoversFirstRelation) {
  const Report rep = verify_miura(1);
  EXPECT_EQ(rep.residuals.front().label, "x_z0 = X_z0z0/X_z0 + X_z0 solves 4M_0 = x_z0z0 - m_0");
  EXPECT_TRUE(rep.residuals.front().reduced_to_zero);
}

TEST(Miura, DegenerateInputRejected) {
  const SpacePtr z = systems::z_space(1, {"x"});
  EXPECT_THROW(cbs_potential_from_mcbs(z, Expression(z, jet::Polynomial(jet::Rational(0))), 1), DivisionByZero);
  EXPECT_THROW(cbs_potential_from_mcbs(z, Expression(z, jet::Polynomial(jet::Rational(3))), 1), DivisionByZero);
}

TEST(Miura, CbsFromMcbsReducesForFirstComponent) {
  const SpacePtr z = systems::z_space(1, {"x", "M"});
  const Expression x = Expression::symbol(z, "x");
  jet::RewriteSystem mcbs(z, jet::Ranking::orderly());
  mcbs.add(jet::orient(systems::mcbs_residual(z, "x", 1), z->jet("x", "z0z0z0z1"), mcbs, "mCBS 1"));
  const Expression cbs = cbs_in_terms_of(z, cbs_potential_from_mcbs(z, x, 1), 1);
  EXPECT_FALSE(cbs.is_zero());
  EXPECT_TRUE(jet::reduce_modulo(cbs, mcbs).is_zero());
}

TEST(Composite, PassesForAllComponentCounts) {
  for (int n = 1; n <= 3; ++n) {
    const Report rep = verify_composite_dictionary(n);
    EXPECT_TRUE(rep.passed()) << describe_failures(rep);
  }
}

TEST(Composite, CoversEveryIndexedIdentity) {
  const int n = 3;
  const Report rep = verify_composite_dictionary(n);
  auto has = [&](const std::string& label) {
    for (const auto& o : rep.residuals)
      if (o.label == label) return o.reduced_to_zero;
    return false;
  };
  EXPECT_TRUE(has("1/u = (1/P)_X + 1/P"));
  for (int i = 1; i < n; ++i) {
    const std::string s = std::to_string(i), t = std::to_string(i + 1);
    EXPECT_TRUE(has("P Om" + t + " = 2 (v" + s + " - v" + s + "_x)")) << i;
    EXPECT_TRUE(has("om" + t + " = (Om" + t + "_X + Om" + t + ")/2")) << i;
  }
  EXPECT_TRUE(has("Delta = v3_x - v3"));
  EXPECT_TRUE(has("2U(sqrt(U) - u) + u U_X = 0"));
}

TEST(Composite, PrintedSignVariantIsInformational) {
  const Report rep = verify_composite_dictionary(1);
  bool seen = false;
  for (const auto& o : rep.residuals)
    if (o.label.find("sign variant") != std::string::npos) {
      seen = true;
      EXPECT_TRUE(o.informational);
      EXPECT_FALSE(o.reduced_to_zero);
    }
  EXPECT_TRUE(seen);
}

TEST(Derivation, GoalEqualToHypothesisReducesInOneStep) {
  const SpacePtr z = systems::z_space(1, {"X"});
  const Expression h = E(z, "X_z0z0 - X_z1*X_z0");
  const Report rep = check_derivation({{h, z->jet("X", "z0z0"), "h1"}}, h, jet::Ranking::orderly(), "trivial");
  ASSERT_EQ(rep.residuals.size(), 1u);
  EXPECT_TRUE(rep.passed());
  EXPECT_LE(rep.steps, 1u);
}

TEST(Derivation, ReportsIrreducibleRemainder) {
  const SpacePtr z = systems::z_space(1, {"X"});
  const Report rep = check_derivation({{E(z, "X_z0z0 - X_z1"), z->jet("X", "z0z0"), "h1"}}, E(z, "X_z0z0 + X_z2"),
                                      jet::Ranking::orderly(), "remainder");
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.residuals.front().remainder_text, E(z, "X_z1 + X_z2").to_string());
}

TEST(Derivation, FirstCompositeBlock) {
  // 1/u from the chain rule of both reciprocal maps: with x_0 = X_00/X_0 + X_0,
  // 1/u = x_0 and 1/P = X_0, and D_X = (1/X_0) d_0.
  const SpacePtr z = systems::z_space(1, {"X", "x"});
  const Expression X0 = E(z, "X_z0"), x0 = E(z, "x_z0");
  const Expression one_over_P = X0, one_over_u = x0;
  const Expression goal = one_over_u - (jet::differentiate(one_over_P, "z0") / X0 + one_over_P);
  const Report rep = check_derivation({{x0 - E(z, "X_z0z0/X_z0 + X_z0"), z->jet("x", "z0"), "x_0 link"}}, goal,
                                      jet::Ranking().then_fields(*z, {"X", "x"}), "block-1");
  EXPECT_TRUE(rep.passed()) << describe_failures(rep);
}

TEST(Derivation, SecondCompositeBlock) {
  // -P Om2/2 = v1_x - v1 for n = 2 in z-space: P = 1/X_0, Om2 = 2 X_2,
  // v1 = (x_2 + x_z1z0z0)/x_0 and D_x = (1/x_0) d_0.
  const auto ctx = build_composite_context(2);
  const Expression v1 = E(ctx.zspace, "(x_z2 + x_z0z0z1)/x_z0");
  const Expression goal = -E(ctx.zspace, "X_z2/X_z0") - (jet::differentiate(v1, "z0") / E(ctx.zspace, "x_z0") - v1);
  std::vector<Hypothesis> hyps;
  for (const auto& r : ctx.hypotheses.rules())
    hyps.push_back({Expression::jet(ctx.zspace, r.lhs) - r.rhs, r.lhs, r.provenance});
  const Report rep = check_derivation(hyps, goal, ctx.hypotheses.ranking(), "block-2");
  EXPECT_TRUE(rep.passed()) << describe_failures(rep);
}

}  // namespace
}  // namespace chmr::transforms
