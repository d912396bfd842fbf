#include <confcalc/core.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace confcalc;

TEST(Order, AcceptsUnitInterval) {
  EXPECT_DOUBLE_EQ(Order(0.5).value(), 0.5);
  EXPECT_TRUE(Order(1.0).is_first_order());
  EXPECT_FALSE(Order(0.999).is_first_order());
}

TEST(Order, RejectsOutsideUnitInterval) {
  EXPECT_THROW(Order(0.0), InvalidArgument);
  EXPECT_THROW(Order(-0.5), InvalidArgument);
  EXPECT_THROW(Order(1.0000001), InvalidArgument);
  EXPECT_THROW(Order(std::nan("")), InvalidArgument);
}

TEST(LowerTerminal, RejectsNonFinite) {
  EXPECT_DOUBLE_EQ(LowerTerminal(-3.25).value(), -3.25);
  EXPECT_THROW(LowerTerminal(std::numeric_limits<double>::infinity()), InvalidArgument);
  EXPECT_THROW(LowerTerminal(std::nan("")), InvalidArgument);
}

TEST(ScalarFunction, UndefinedPoints) {
  auto f = ScalarFunction::real([](double t) { return std::sqrt(t); }, "sqrt", 0.0);
  EXPECT_DOUBLE_EQ(*f(4.0), 2.0);
  EXPECT_FALSE(f(-1.0).has_value());  // left of domain_start
  EXPECT_THROW(f.at(-1.0), EvaluationError);

  auto g = ScalarFunction::real([](double t) { return 1.0 / t; }, "inv");
  EXPECT_FALSE(g(0.0).has_value());  // non-finite result
  auto h = ScalarFunction([](double t) -> std::optional<double> {
    if (t > 1) return std::nullopt;
    return t;
  }, "partial");
  EXPECT_FALSE(h(2.0).has_value());
  EXPECT_EQ(h.label(), "partial");
}

TEST(ScalarFunction, Combinators) {
  auto f = ScalarFunction::real([](double t) { return t * t; }, "t^2");
  auto g = ScalarFunction::real([](double t) { return t - 1.0; }, "t-1");
  EXPECT_DOUBLE_EQ(*linear_combination(2.0, f, -3.0, g)(3.0), 12.0);
  EXPECT_DOUBLE_EQ(*product(f, g)(3.0), 18.0);
  EXPECT_DOUBLE_EQ(*quotient(f, g)(3.0), 4.5);
  EXPECT_FALSE(quotient(f, g)(1.0).has_value());
  EXPECT_DOUBLE_EQ(*constant_function(7.0)(-100.0), 7.0);
}

TEST(Verdict, Names) {
  EXPECT_EQ(to_string(Verdict::Exists), "Exists");
  EXPECT_EQ(to_string(Verdict::LeftRightMismatch), "LeftRightMismatch");
  EXPECT_EQ(to_string(Verdict::Diverges), "Diverges");
  EXPECT_EQ(to_string(Verdict::Inconclusive), "Inconclusive");
}

IvpSpec linear_spec() {
  return IvpSpec{LowerTerminal(0.0), Order(0.5), 1.0,
                 [](double, double x) -> std::optional<double> { return x; }, 1.0};
}

TEST(IvpSpec, ValidateNamesEveryField) {
  EXPECT_NO_THROW(linear_spec().validate());
  IvpSpec s = linear_spec();
  s.horizon = -1.0;
  s.tol = 0.0;
  s.x0 = std::nan("");
  try {
    s.validate();
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("T:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("tol"), std::string::npos) << msg;
    EXPECT_NE(msg.find("x0"), std::string::npos) << msg;
  }
  IvpSpec empty = linear_spec();
  empty.F = nullptr;
  EXPECT_THROW(empty.validate(), InvalidArgument);
}

TEST(Trajectory, RejectsNonMonotone) {
  EXPECT_THROW(Trajectory({{0, 1}, {0, 2}}, {}, {}), InvalidArgument);
  EXPECT_THROW(Trajectory({{1, 1}, {0, 2}}, {}, {}), InvalidArgument);
  EXPECT_THROW(Trajectory({{0, 1}}, {}, {}), InvalidArgument);
}

TEST(Trajectory, InterpolatesCubicsExactly) {
  std::vector<Sample> s;
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.1 * i;
    s.push_back({t, t * t * t - t});
  }
  Trajectory tr(s, {InterpolationKind::CubicLocal, 1.0}, {});
  for (double t : {0.0, 0.05, 0.33, 0.71, 0.999, 1.0})
    EXPECT_NEAR(tr(t), t * t * t - t, 1e-13) << t;
  EXPECT_THROW(tr(1.01), DomainError);
  EXPECT_THROW(tr(-0.01), DomainError);
}

TEST(Trajectory, GradedInterpolationFollowsPowerLaw) {
  // x = 1 + 2 sqrt(t) is linear in s = t^{1/2}
  std::vector<Sample> s;
  for (int i = 0; i <= 8; ++i) {
    const double t = std::pow(i / 8.0, 2.0);
    s.push_back({t, 1 + 2 * std::sqrt(t)});
  }
  Trajectory graded(s, {InterpolationKind::Linear, 0.5}, {});
  for (double t : {1e-6, 0.003, 0.2, 0.77}) EXPECT_NEAR(graded(t), 1 + 2 * std::sqrt(t), 1e-12);
}

TEST(Trajectory, ResampleKeepsEndpoints) {
  Trajectory tr({{0.0, 1.0}, {0.4, 2.0}, {1.0, 3.0}}, {InterpolationKind::Linear, 1.0}, {});
  auto r = tr.resample(11);
  ASSERT_EQ(r.size(), 11u);
  EXPECT_EQ(r.front().t, 0.0);
  EXPECT_EQ(r.front().x, 1.0);
  EXPECT_EQ(r.back().t, 1.0);
  EXPECT_EQ(r.back().x, 3.0);
  EXPECT_THROW(tr.resample(1), InvalidArgument);
}

TEST(Trajectory, SupGap) {
  Trajectory a({{0.0, 0.0}, {1.0, 1.0}}, {InterpolationKind::Linear, 1.0}, {});
  Trajectory b({{0.0, 0.0}, {1.0, 1.5}}, {InterpolationKind::Linear, 1.0}, {});
  EXPECT_NEAR(sup_gap(a, b), 0.5, 1e-15);
  EXPECT_EQ(sup_gap(a, a), 0.0);
}

TEST(VerificationReport, PassedIffWithinTolerance) {
  VerificationReport r("demo", 1e-6);
  EXPECT_TRUE(r.passed());
  r.add_case({"b", {2.0}, 1e-7, ""});
  EXPECT_TRUE(r.passed());
  r.add_case({"a", {1.0}, 2e-6, ""});
  EXPECT_FALSE(r.passed());
  EXPECT_DOUBLE_EQ(r.max_residual(), 2e-6);
  r.canonicalize();
  EXPECT_EQ(r.cases().front().label, "a");
  r.add_skip({"c", {1.0}, 0.0, "skipped"});
  EXPECT_EQ(r.skipped().size(), 1u);
}

TEST(VerificationReport, NaNResidualFails) {
  VerificationReport r("nan", 1.0);
  r.add_case({"x", {}, std::nan(""), ""});
  EXPECT_FALSE(r.passed());
}

TEST(ScaledResidual, AbsoluteNearZeroRelativeFarAway) {
  EXPECT_DOUBLE_EQ(scaled_residual(0.5, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(scaled_residual(101.0, 100.0), 0.01);
  EXPECT_DOUBLE_EQ(scaled_residual(-3.0, -3.0), 0.0);
}
