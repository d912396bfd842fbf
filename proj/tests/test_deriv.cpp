#include <confcalc/deriv.hpp>
#include <confcalc/identities.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <cmath>

using namespace confcalc;

namespace {

ScalarFunction fn(double (*f)(double), const char* label, double start = -INFINITY) {
  return ScalarFunction::real(f, label, start);
}

const ScalarFunction two_sqrt = fn([](double t) { return 2 * std::sqrt(t); }, "2sqrt(t)", 0.0);
const ScalarFunction square = fn([](double t) { return t * t; }, "t^2");
const ScalarFunction kink = fn([](double t) { return std::abs(t - 2); }, "|t-2|");
const ScalarFunction shifted = fn([](double t) { return 2 * std::sqrt(std::abs(t)); }, "2|t|^0.5");

}  // namespace

TEST(ConformableDerivative, SquareRootExampleIsOne) {
  for (double t : {0.01, 0.1, 1.0, 4.0, 100.0}) {
    auto d = conformable_derivative(two_sqrt, LowerTerminal(0), Order(0.5), t);
    ASSERT_TRUE(d.exists()) << t << ": " << d.note;
    EXPECT_NEAR(*d.value, 1.0, 1e-9) << t;
  }
}

TEST(ConformableDerivative, ConstantIsZero) {
  auto d = conformable_derivative(constant_function(1.0), LowerTerminal(0), Order(0.7), 2.0);
  ASSERT_TRUE(d.exists());
  EXPECT_NEAR(*d.value, 0.0, 1e-12);
}

TEST(ConformableDerivative, ShiftedExampleDiverges) {
  auto d = conformable_derivative(shifted, LowerTerminal(-1), Order(0.5), 0.0);
  EXPECT_EQ(d.verdict, Verdict::Diverges) << d.note;
  EXPECT_FALSE(d.value.has_value());
}

TEST(ConformableDerivative, SquareAtOne) {
  auto d = conformable_derivative(square, LowerTerminal(0), Order(0.5), 1.0);
  ASSERT_TRUE(d.exists());
  EXPECT_NEAR(*d.value, 2.0, 1e-10);
  // independent check on the raw quotient with a central difference in theta
  const double h = 1e-5;
  const double raw = (1 + h) * (1 + h) - (1 - h) * (1 - h);
  EXPECT_NEAR(*d.value, raw / (2 * h), 1e-8);
}

TEST(ConformableDerivative, RejectsTerminalAndLeft) {
  EXPECT_THROW(conformable_derivative(square, LowerTerminal(0), Order(0.5), 0.0), DomainError);
  EXPECT_THROW(conformable_derivative(square, LowerTerminal(0), Order(0.5), -1.0), DomainError);
}

TEST(ConformableDerivative, UndefinedSampleIsEvaluationError) {
  auto hole = ScalarFunction([](double t) -> std::optional<double> {
    if (t > 1.0) return std::nullopt;
    return t;
  }, "hole");
  EXPECT_THROW(conformable_derivative(hole, LowerTerminal(0), Order(1), 1.0), EvaluationError);
}

TEST(ConformableDerivative, NearDomainEdgeShrinksTheta) {
  // f is only defined on (0, inf); t is closer to the edge than theta0
  auto log_fn = fn([](double t) { return std::log(t); }, "log", 0.0);
  auto d = conformable_derivative(log_fn, LowerTerminal(0), Order(1), 0.004);
  ASSERT_TRUE(d.exists()) << d.note;
  EXPECT_NEAR(*d.value, 250.0, 1e-6 * 250);
}

TEST(OneSided, KinkSides) {
  const double s2 = std::sqrt(2.0);
  auto r = one_sided_derivative(kink, LowerTerminal(0), Order(0.5), 2.0, Side::Right);
  auto l = one_sided_derivative(kink, LowerTerminal(0), Order(0.5), 2.0, Side::Left);
  ASSERT_TRUE(r.exists());
  ASSERT_TRUE(l.exists());
  EXPECT_NEAR(*r.value, s2, 1e-12);
  EXPECT_NEAR(*l.value, -s2, 1e-12);
  // oracle: one-sided difference of f times (t - a)^{1 - alpha}
  const double h = 1e-7;
  EXPECT_NEAR(*r.value, s2 * (std::abs(2 + h - 2) - 0) / h, 1e-8);
}

TEST(OneSided, IdentityFirstOrder) {
  auto d = one_sided_derivative(fn([](double t) { return t; }, "t"), LowerTerminal(0), Order(1), 5.0,
                                Side::Right);
  ASSERT_TRUE(d.exists());
  EXPECT_NEAR(*d.value, 1.0, 1e-13);
}

TEST(Classify, Verdicts) {
  auto k = classify_alpha_differentiability(kink, LowerTerminal(0), Order(0.5), 2.0);
  EXPECT_EQ(k.verdict, Verdict::LeftRightMismatch);
  ASSERT_TRUE(k.left_value && k.right_value);
  EXPECT_NEAR(*k.left_value, -std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(*k.right_value, std::sqrt(2.0), 1e-10);
  EXPECT_FALSE(k.value.has_value());

  auto s = classify_alpha_differentiability(square, LowerTerminal(0), Order(0.5), 1.0);
  EXPECT_EQ(s.verdict, Verdict::Exists);
  EXPECT_NEAR(*s.value, 2.0, 1e-10);

  auto d = classify_alpha_differentiability(shifted, LowerTerminal(-1), Order(0.5), 0.0);
  EXPECT_EQ(d.verdict, Verdict::Diverges);
}

TEST(Classify, SmallKinkBelowMismatchTolIsExists) {
  // mismatch is only reported above mismatch_tol
  auto tiny = fn([](double t) { return 1e-8 * std::abs(t - 1); }, "tiny kink");
  auto d = classify_alpha_differentiability(tiny, LowerTerminal(0), Order(1), 1.0);
  EXPECT_EQ(d.verdict, Verdict::Exists);
}

TEST(LowerTerminal, Examples) {
  LimitOptions opts;
  auto e = derivative_at_lower_terminal(two_sqrt, LowerTerminal(0), Order(0.5), opts);
  ASSERT_TRUE(e.exists()) << e.note;
  EXPECT_NEAR(*e.value, 1.0, 1e-6);

  auto id = fn([](double t) { return t; }, "t");
  auto one = derivative_at_lower_terminal(id, LowerTerminal(0), Order(1));
  ASSERT_TRUE(one.exists());
  EXPECT_NEAR(*one.value, 1.0, 1e-8);

  auto zero = derivative_at_lower_terminal(id, LowerTerminal(0), Order(0.5));
  ASSERT_TRUE(zero.exists()) << zero.note;
  EXPECT_NEAR(*zero.value, 0.0, 1e-6);
}

TEST(LowerTerminal, BlowUpIsNotExists) {
  // T^{3/4} of 2 sqrt(t) is t^{-1/4}, unbounded at 0
  auto e = derivative_at_lower_terminal(two_sqrt, LowerTerminal(0), Order(0.75));
  EXPECT_FALSE(e.exists());
}

TEST(OrderTransfer, Examples) {
  EXPECT_DOUBLE_EQ(order_transfer(0.5, 4.0, LowerTerminal(0), Order(1), Order(0.5)), 1.0);
  EXPECT_DOUBLE_EQ(order_transfer(0.3, 7.0, LowerTerminal(1), Order(0.4), Order(0.4)), 0.3);
  EXPECT_DOUBLE_EQ(order_transfer(3.0, 5.0, LowerTerminal(1), Order(1), Order(0.5)), 6.0);
  EXPECT_THROW(order_transfer(1.0, 1.0, LowerTerminal(1), Order(1), Order(0.5)), DomainError);
}

TEST(OrderTransfer, MatchesRawQuotientOfLinearFunction) {
  auto f = fn([](double t) { return 3 * t; }, "3t");
  auto d = conformable_derivative(f, LowerTerminal(1), Order(0.5), 5.0);
  EXPECT_NEAR(*d.value, order_transfer(3.0, 5.0, LowerTerminal(1), Order(1), Order(0.5)), 1e-12);
}

TEST(LimitOptions, Validation) {
  LimitOptions o;
  EXPECT_NO_THROW(o.validate());
  o.shrink = 1.0;
  EXPECT_THROW(o.validate(), InvalidArgument);
  o = {};
  o.theta0 = 0.0;
  EXPECT_THROW(o.validate(), InvalidArgument);
  o = {};
  o.richardson_order = 3;
  EXPECT_THROW(o.validate(), InvalidArgument);
  o = {};
  o.max_levels = 1;
  EXPECT_THROW(o.validate(), InvalidArgument);
  EXPECT_THROW(conformable_derivative(square, LowerTerminal(0), Order(0.5), 1.0, o), InvalidArgument);
}

TEST(LimitOptions, FirstOrderRichardsonStillConverges) {
  LimitOptions o;
  o.richardson_order = 1;
  auto d = conformable_derivative(square, LowerTerminal(0), Order(0.5), 1.0, o);
  ASSERT_TRUE(d.exists()) << d.note;
  EXPECT_NEAR(*d.value, 2.0, 1e-7);
}

// Properties over the smooth catalog

class SmoothCatalog : public ::testing::TestWithParam<double> {};

TEST_P(SmoothCatalog, FirstDerivativeEquivalence) {
  const double a = GetParam();
  const Catalog cat = smooth_catalog(a);
  for (const auto& e : cat.entries()) {
    auto f = [&](double s) { return e.f.at(s); };
    for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
      for (double t : {a + 0.05, a + 1.0, a + 10.0}) {
        auto d = conformable_derivative(e.f, LowerTerminal(a), Order(alpha), t);
        ASSERT_TRUE(d.exists()) << e.f.label() << " t=" << t << " " << d.note;
        const double h = std::min(1e-3 * std::max(1.0, std::abs(t)), 0.1 * (t - a));
        const double want = std::pow(t - a, 1 - alpha) * oracle::fd9(f, t, h);
        EXPECT_LE(scaled_residual(*d.value, want), 1e-6) << e.f.label() << " alpha=" << alpha << " t=" << t;
      }
    }
  }
}

TEST_P(SmoothCatalog, OrderTransferConsistency) {
  const double a = GetParam();
  const Catalog cat = smooth_catalog(a);
  for (const auto& e : cat.entries()) {
    for (double t : {a + 0.1, a + 1.0, a + 10.0}) {
      for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
        for (double beta : {0.25, 0.5, 0.75, 1.0}) {
          auto da = conformable_derivative(e.f, LowerTerminal(a), Order(alpha), t);
          auto db = conformable_derivative(e.f, LowerTerminal(a), Order(beta), t);
          ASSERT_TRUE(da.exists() && db.exists());
          const double moved = order_transfer(*da.value, t, LowerTerminal(a), Order(alpha), Order(beta));
          EXPECT_LE(std::abs(*db.value - moved), 10 * (da.error_estimate + db.error_estimate) + 1e-8)
              << e.f.label() << " t=" << t << " " << alpha << "->" << beta;
        }
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Terminals, SmoothCatalog, ::testing::Values(0.0, 1.5, -2.0));

TEST(Properties, MonomialLaw) {
  const double a = 0.5;
  for (double p : {1.0, 2.0, 3.0, 0.5}) {
    auto f = ScalarFunction::real([=](double t) { return std::pow(t - a, p); }, "mono", a);
    for (double alpha : {0.3, 0.6, 1.0}) {
      for (double t : {0.6, 1.5, 4.0}) {
        auto d = conformable_derivative(f, LowerTerminal(a), Order(alpha), t);
        ASSERT_TRUE(d.exists());
        EXPECT_LE(scaled_residual(*d.value, p * std::pow(t - a, p - alpha)), 1e-8)
            << "p=" << p << " alpha=" << alpha << " t=" << t;
      }
    }
  }
}

TEST(Properties, Linearity) {
  auto f = fn([](double t) { return std::exp(t); }, "exp");
  auto g = fn([](double t) { return std::sin(t); }, "sin");
  const double c = 2.0, dcoef = -3.0;
  auto h = linear_combination(c, f, dcoef, g);
  for (double t : {0.3, 2.0, 7.0}) {
    auto ef = conformable_derivative(f, LowerTerminal(0), Order(0.4), t);
    auto eg = conformable_derivative(g, LowerTerminal(0), Order(0.4), t);
    auto eh = conformable_derivative(h, LowerTerminal(0), Order(0.4), t);
    const double bound = std::abs(c) * ef.error_estimate + std::abs(dcoef) * eg.error_estimate +
                         eh.error_estimate;
    EXPECT_LE(std::abs(*eh.value - (c * *ef.value + dcoef * *eg.value)),
              10 * bound + 1e-9 * std::max(1.0, std::abs(*eh.value)));
  }
}

TEST(Properties, MismatchOnlyWhenBothSidesConverge) {
  // the shifted example has blowing-up sides: never a mismatch
  for (double alpha : {0.3, 0.5, 0.9}) {
    auto d = classify_alpha_differentiability(shifted, LowerTerminal(-1), Order(alpha), 0.0);
    EXPECT_NE(d.verdict, Verdict::LeftRightMismatch);
  }
  // kinks of several slopes: both sides converge and differ
  for (double slope : {0.5, 3.0}) {
    auto f = ScalarFunction::real([=](double t) { return t < 1 ? 0.0 : slope * (t - 1); }, "ramp");
    auto d = classify_alpha_differentiability(f, LowerTerminal(0), Order(0.5), 1.0);
    EXPECT_EQ(d.verdict, Verdict::LeftRightMismatch);
    EXPECT_GT(std::abs(*d.right_value - *d.left_value), LimitOptions{}.mismatch_tol);
  }
}
