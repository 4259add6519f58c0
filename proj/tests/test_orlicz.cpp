#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "orliczot/orlicz.hpp"
#include "support.hpp"

using namespace orliczot;

TEST(Phi, PowerAtThree) { EXPECT_DOUBLE_EQ(PhiFunction::power(2)(3.0), 9.0); }

TEST(Phi, ExpLinearVanishesAtZero) { EXPECT_EQ(PhiFunction::exp_linear(1.1)(0.0), 0.0); }

TEST(Phi, ExpPowerAtOne) { EXPECT_NEAR(PhiFunction::exp_power(1.05)(1.0), std::numbers::e - 1.0, 1e-12); }

TEST(Phi, ExpLinearUsesBetaAsScale) {
  EXPECT_NEAR(PhiFunction::exp_linear(2.0)(2.0), std::numbers::e - 1.0, 1e-12);
}

TEST(Phi, RejectsNegativeArgumentAndBadParameters) {
  EXPECT_THROW(PhiFunction::power(2)(-1.0), std::invalid_argument);
  EXPECT_THROW(PhiFunction::power(0.5), std::invalid_argument);
  EXPECT_THROW(PhiFunction::exp_linear(0.0), std::invalid_argument);
  EXPECT_THROW(PhiFunction::exp_power(1.0), std::invalid_argument);
  EXPECT_THROW(PhiFunction::mixture(1.5, PhiFunction::power(2), PhiFunction::power(3)), std::invalid_argument);
}

TEST(Phi, ContractionRegimeFlag) {
  EXPECT_TRUE(PhiFunction::exp_power(1.05).in_contraction_regime());
  EXPECT_FALSE(PhiFunction::exp_power(1.2).in_contraction_regime());
  EXPECT_FALSE(PhiFunction::exp_linear(1.05).in_contraction_regime());
}

TEST(Phi, OverflowSaturatesWithFlag) {
  const auto v = PhiFunction::exp_linear(1.0).eval_checked(800.0);
  EXPECT_TRUE(v.overflow);
  EXPECT_EQ(v.value, std::numeric_limits<double>::max());
  EXPECT_NEAR(PhiFunction::exp_linear(1.0).log_eval(800.0), 800.0, 1e-12);
  EXPECT_FALSE(PhiFunction::exp_linear(1.0).eval_checked(700.0).overflow);
}

TEST(PhiInverse, PowerAtOne) { EXPECT_DOUBLE_EQ(PhiFunction::power(2).inverse(1.0), 1.0); }

TEST(PhiInverse, ExpLinearAtOne) { EXPECT_NEAR(PhiFunction::exp_linear(1.0).inverse(1.0), std::log(2.0), 1e-12); }

TEST(PhiInverse, ExpPowerAtOne) {
  const auto phi = PhiFunction::exp_power(1.05);
  const double x = phi.inverse(1.0);
  EXPECT_NEAR(x, std::pow(std::log(2.0), 1.0 / 1.05), 1e-12);
  EXPECT_NEAR(x, 0.7053, 1e-4);
  EXPECT_NEAR(phi(x), 1.0, 1e-12);
}

TEST(PhiSup, Idempotent) {
  const auto p = PhiFunction::power(2);
  const auto s = PhiFunction::sup(p, p);
  for (double x : {0.0, 0.3, 1.0, 7.5}) EXPECT_EQ(s(x), p(x));
}

TEST(PhiSup, PicksLargerBranch) {
  const auto s = PhiFunction::sup(PhiFunction::power(1.5), PhiFunction::exp_linear(1.0));
  EXPECT_NEAR(s(0.1), std::expm1(0.1), 1e-15);
  EXPECT_NEAR(s(0.1), 0.10517, 1e-5);
}

TEST(PhiConditions, PowerTwoSatisfiesBoth) {
  const auto c = check_orlicz_conditions(PhiFunction::power(2));
  EXPECT_TRUE(c.condition_i);
  EXPECT_TRUE(c.condition_ii);
}

TEST(PhiConditions, PowerOneSatisfiesNeither) {
  const auto c = check_orlicz_conditions(PhiFunction::power(1));
  EXPECT_FALSE(c.condition_i);
  EXPECT_FALSE(c.condition_ii);
}

TEST(PhiConditions, ExpLinearFailsSmallArgumentCondition) {
  const auto c = check_orlicz_conditions(PhiFunction::exp_linear(1.1));
  EXPECT_TRUE(c.condition_i);
  EXPECT_FALSE(c.condition_ii);
}

TEST(PhiConditions, ExpPowerSatisfiesBoth) {
  const auto c = check_orlicz_conditions(PhiFunction::exp_power(1.05));
  EXPECT_TRUE(c.condition_i);
  EXPECT_TRUE(c.condition_ii);
}

TEST(PhiSpec, ParsesEveryKind) {
  EXPECT_EQ(parse_phi("pow:2"), PhiFunction::power(2));
  EXPECT_EQ(parse_phi("exp:1.1"), PhiFunction::exp_linear(1.1));
  EXPECT_EQ(parse_phi("exppow:1.05"), PhiFunction::exp_power(1.05));
  EXPECT_EQ(parse_phi("sup(pow:2,exp:1)"), PhiFunction::sup(PhiFunction::power(2), PhiFunction::exp_linear(1)));
  EXPECT_EQ(parse_phi("mix:0.5(pow:2, exp:1)"),
            PhiFunction::mixture(0.5, PhiFunction::power(2), PhiFunction::exp_linear(1)));
}

TEST(PhiSpec, RejectsGarbage) {
  for (const char* bad : {"", "pow", "pow:", "pow:2x", "sup(pow:2)", "mix:2(pow:2,pow:3)", "log:1", "exp:-1"})
    EXPECT_THROW(parse_phi(bad), std::invalid_argument) << bad;
}

namespace {

// Random member of the family, nesting at most `depth` composite levels.
PhiFunction random_phi(proptest::Gen& gen, int depth = 2) {
  const int pick = gen.integer(0, depth > 0 ? 4 : 2);
  switch (pick) {
    case 0:
      return PhiFunction::power(gen.uniform(1.0, 4.0));
    case 1:
      return PhiFunction::exp_linear(gen.uniform(0.2, 3.0));
    case 2:
      return PhiFunction::exp_power(gen.uniform(1.01, 2.0));
    case 3:
      return PhiFunction::sup(random_phi(gen, depth - 1), random_phi(gen, depth - 1));
    default:
      return PhiFunction::mixture(gen.uniform(0.0, 1.0), random_phi(gen, depth - 1), random_phi(gen, depth - 1));
  }
}

}  // namespace

TEST(PhiProperty, Monotone) {
  proptest::Gen gen(21);
  for (int t = 0; t < 300; ++t) {
    const auto phi = random_phi(gen);
    const double a = gen.uniform(0.0, 5.0);
    const double b = gen.uniform(0.0, 5.0);
    EXPECT_LE(phi(std::min(a, b)), phi(std::max(a, b))) << render_phi(phi);
  }
}

TEST(PhiProperty, MidpointConvex) {
  proptest::Gen gen(22);
  for (int t = 0; t < 300; ++t) {
    const auto phi = random_phi(gen);
    const double x = gen.uniform(0.0, 4.0);
    const double y = gen.uniform(0.0, 4.0);
    const double lhs = phi(0.5 * (x + y));
    const double rhs = 0.5 * (phi(x) + phi(y));
    EXPECT_LE(lhs, rhs + 1e-9 * (1.0 + std::abs(rhs))) << render_phi(phi) << " x=" << x << " y=" << y;
  }
}

TEST(PhiProperty, InverseConsistency) {
  proptest::Gen gen(23);
  for (int t = 0; t < 300; ++t) {
    const auto phi = random_phi(gen);
    const double y = std::pow(10.0, gen.uniform(-6.0, 6.0));
    EXPECT_NEAR(phi(phi.inverse(y)), y, 1e-8 * y) << render_phi(phi) << " y=" << y;
  }
}

TEST(PhiProperty, SupDominatesBothBranches) {
  proptest::Gen gen(24);
  for (int t = 0; t < 200; ++t) {
    const auto a = random_phi(gen, 1);
    const auto b = random_phi(gen, 1);
    const auto s = PhiFunction::sup(a, b);
    for (int k = 0; k < 5; ++k) {
      const double x = gen.uniform(0.0, 6.0);
      EXPECT_GE(s(x), a(x));
      EXPECT_GE(s(x), b(x));
    }
  }
}

TEST(PhiProperty, LogEvalAgreesWithEval) {
  proptest::Gen gen(25);
  for (int t = 0; t < 300; ++t) {
    const auto phi = random_phi(gen);
    const double x = gen.uniform(1e-3, 5.0);
    EXPECT_NEAR(phi.log_eval(x), std::log(phi(x)), 1e-10 * (1.0 + std::abs(std::log(phi(x))))) << render_phi(phi);
  }
}

TEST(PhiProperty, RenderParseRoundTrip) {
  proptest::Gen gen(26);
  for (int t = 0; t < 200; ++t) {
    const auto phi = random_phi(gen);
    EXPECT_EQ(parse_phi(render_phi(phi)), phi) << render_phi(phi);
  }
}

TEST(PhiConditions, CompositesFollowTheirBranches) {
  const auto p1 = PhiFunction::power(1);
  const auto e = PhiFunction::exp_linear(1.0);
  const auto q = PhiFunction::power(2);
  auto c = check_orlicz_conditions(PhiFunction::sup(p1, q));
  EXPECT_TRUE(c.condition_i);
  EXPECT_FALSE(c.condition_ii);
  c = check_orlicz_conditions(PhiFunction::sup(q, PhiFunction::exp_power(1.5)));
  EXPECT_TRUE(c.condition_ii);
  c = check_orlicz_conditions(PhiFunction::mixture(1.0, q, e));
  EXPECT_TRUE(c.condition_i);
  EXPECT_TRUE(c.condition_ii);
  c = check_orlicz_conditions(PhiFunction::mixture(0.5, q, e));
  EXPECT_FALSE(c.condition_ii);
}
