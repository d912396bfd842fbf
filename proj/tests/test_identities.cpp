#include <confcalc/identities.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace confcalc;

namespace {

CatalogEntry entry(std::function<double(double)> f, std::function<double(double)> fp, const char* label,
                   Interval on, bool locally_bounded = true) {
  CatalogEntry e{ScalarFunction::real(std::move(f), label), ScalarFunction::real(std::move(fp), label),
                 on, ""};
  e.smooth = true;
  e.bounded_derivative_near_a = true;
  e.locally_bounded_at_a = locally_bounded;
  return e;
}

Catalog single(CatalogEntry e) {
  Catalog c;
  c.add(std::move(e));
  return c;
}

const VerificationCase* find_case(const VerificationReport& r, const std::string& label_part) {
  for (const auto& c : r.cases())
    if (c.label.find(label_part) != std::string::npos) return &c;
  return nullptr;
}

}  // namespace

TEST(Catalog, SelfCheckRejectsWrongDerivative) {
  Catalog c;
  EXPECT_NO_THROW(c.add(entry([](double t) { return t * t; }, [](double t) { return 2 * t; }, "t^2", {0, 5})));
  EXPECT_THROW(c.add(entry([](double t) { return t * t; }, [](double t) { return 2 * t + 1e-3; }, "bad", {0, 5})),
               InvalidArgument);
  EXPECT_EQ(c.size(), 1u);
}

TEST(Catalog, DefaultContents) {
  const Catalog smooth = smooth_catalog(0.0);
  EXPECT_GE(smooth.size(), 6u);
  for (const auto& e : smooth.entries()) EXPECT_TRUE(e.smooth) << e.f.label();
  const Catalog all = default_catalog(1.0);
  EXPECT_EQ(all.size(), smooth.size() + 2);
  EXPECT_EQ(all.smooth_only().size(), smooth.size());
  EXPECT_LT(all.locally_bounded().size(), all.size());  // the power law is unbounded at a
  const auto pts = default_points(1.0);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_DOUBLE_EQ(pts.front(), 1.01);
  EXPECT_DOUBLE_EQ(pts.back(), 11.0);
  EXPECT_THROW(power_law_entry(0, 0.75, 0.5), PreconditionError);
}

TEST(Algebraic, ProductAndConstantRules) {
  Catalog c;
  c.add(entry([](double t) { return t * t; }, [](double t) { return 2 * t; }, "t^2", {0, 20}));
  c.add(entry([](double t) { return t * t * t + 1; }, [](double t) { return 3 * t * t; }, "t^3+1", {0, 20}));
  const std::vector<double> pts{2.0};
  auto reports = verify_algebraic_rules(c, LowerTerminal(0), Order(0.5), pts);
  ASSERT_EQ(reports.size(), 4u);
  EXPECT_EQ(reports[0].identity_name(), "constant_rule");
  EXPECT_EQ(reports[1].identity_name(), "linearity");
  EXPECT_EQ(reports[2].identity_name(), "product_rule");
  EXPECT_EQ(reports[3].identity_name(), "quotient_rule");
  EXPECT_LE(reports[2].max_residual(), 1e-6);
  EXPECT_LE(reports[0].max_residual(), 1e-8);
  for (const auto& r : reports) EXPECT_TRUE(r.passed()) << r.identity_name();
}

TEST(Algebraic, LinearityExample) {
  Catalog c;
  c.add(entry([](double t) { return t; }, [](double) { return 1.0; }, "t", {0, 20}));
  c.add(entry([](double t) { return std::sqrt(t); }, [](double t) { return 0.5 / std::sqrt(t); }, "sqrt", {0.01, 20}));
  const std::vector<double> pts{4.0};
  auto reports = verify_algebraic_rules(c, LowerTerminal(0), Order(0.5), pts);
  EXPECT_LE(reports[1].max_residual(), 1e-7);
}

TEST(Algebraic, QuotientRuleSkipsZeroDenominator) {
  Catalog c;
  c.add(entry([](double t) { return t - 1; }, [](double) { return 1.0; }, "t-1", {0, 20}));
  const std::vector<double> pts{1.0};
  auto reports = verify_algebraic_rules(c, LowerTerminal(0), Order(0.5), pts);
  EXPECT_FALSE(reports[3].skipped().empty());
}

TEST(Algebraic, FullCatalogAtShiftedTerminal) {
  const std::vector<double> pts = default_points(1.5);
  VerifyOptions o;
  o.tolerance = 1e-4;
  for (const auto& r : verify_algebraic_rules(smooth_catalog(1.5), LowerTerminal(1.5), Order(0.3), pts, o))
    EXPECT_TRUE(r.passed()) << r.identity_name() << " " << r.max_residual();
}

TEST(OrderChange, Examples) {
  Catalog sq = single(entry([](double t) { return 2 * std::sqrt(t); }, [](double t) { return 1 / std::sqrt(t); },
                            "2sqrt", {0.01, 20}));
  const std::vector<double> four{4.0};
  auto r = verify_order_change(sq, LowerTerminal(0), Order(0.5), Order(1), four);
  EXPECT_LE(r.max_residual(), 1e-7);
  auto same = verify_order_change(sq, LowerTerminal(0), Order(0.5), Order(0.5), four);
  EXPECT_EQ(same.max_residual(), 0.0);

  Catalog ex = single(entry([](double t) { return std::exp(t); }, [](double t) { return std::exp(t); }, "exp", {1, 5}));
  const std::vector<double> two{2.0};
  EXPECT_LE(verify_order_change(ex, LowerTerminal(1), Order(0.3), Order(0.8), two).max_residual(), 1e-6);
}

TEST(OrderChange, AllPairsPassOnSmoothCatalog) {
  const double a = -1.0;
  const Catalog cat = smooth_catalog(a);
  const std::vector<double> pts{a + 0.1, a + 1, a + 10};
  for (double al : {0.25, 0.5, 0.75, 1.0})
    for (double be : {0.25, 0.5, 0.75, 1.0}) {
      auto r = verify_order_change(cat, LowerTerminal(a), Order(al), Order(be), pts);
      EXPECT_TRUE(r.passed()) << al << " " << be << " " << r.max_residual();
    }
}

TEST(LeftInverse, Examples) {
  Catalog sq = single(entry([](double t) { return t * t; }, [](double t) { return 2 * t; }, "t^2", {0, 5}));
  const std::vector<double> one{1.0};
  EXPECT_LE(verify_left_inverse(sq, LowerTerminal(0), Order(0.5), one).max_residual(), 1e-8);

  Catalog s = single(entry([](double t) { return std::sin(t); }, [](double t) { return std::cos(t); }, "sin", {0, 5}));
  const std::vector<double> pi{std::numbers::pi};
  EXPECT_LE(verify_left_inverse(s, LowerTerminal(0), Order(0.5), pi).max_residual(), 1e-6);

  Catalog k = single(entry([](double) { return 4.0; }, [](double) { return 0.0; }, "4", {0, 5}));
  EXPECT_EQ(verify_left_inverse(k, LowerTerminal(0), Order(0.5), one).max_residual(), 0.0);
}

TEST(LeftInverse, PowerLawRaisesDivergence) {
  Catalog c;
  c.add(power_law_entry(0.0, 0.5, 0.75));
  const std::vector<double> pts{1.0};
  EXPECT_THROW(verify_left_inverse(c, LowerTerminal(0), Order(0.5), pts), DivergenceError);
}

TEST(LeftInverse, KinkWithoutAnalyticDerivative) {
  // the kink entry falls back to the limit estimator and is continuous at a
  Catalog c;
  c.add(kink_entry(0.0, 2.0));
  const std::vector<double> pts{1.0, 3.0};
  auto r = verify_left_inverse(c, LowerTerminal(0), Order(0.5), pts);
  EXPECT_TRUE(r.passed()) << r.max_residual();
}

TEST(RightInverse, Examples) {
  Catalog one = single(entry([](double) { return 1.0; }, [](double) { return 0.0; }, "1", {0, 5}));
  const std::vector<double> four{4.0};
  EXPECT_LE(verify_right_inverse(one, LowerTerminal(0), Order(0.5), four).max_residual(), 1e-6);

  Catalog zero = single(entry([](double) { return 0.0; }, [](double) { return 0.0; }, "0", {0, 5}));
  EXPECT_LE(verify_right_inverse(zero, LowerTerminal(0), Order(0.5), four).max_residual(), 1e-12);

  Catalog id = single(entry([](double t) { return t; }, [](double) { return 1.0; }, "t", {1, 5}));
  const std::vector<double> two{2.0};
  EXPECT_LE(verify_right_inverse(id, LowerTerminal(1), Order(0.6), two).max_residual(), 1e-5);
}

TEST(RightInverse, SkipsUnboundedEntries) {
  Catalog c;
  c.add(power_law_entry(0.0, 0.5, 0.75));
  const std::vector<double> pts{1.0};
  auto r = verify_right_inverse(c, LowerTerminal(0), Order(0.5), pts);
  EXPECT_TRUE(r.cases().empty());
  EXPECT_FALSE(r.skipped().empty());
}

TEST(LowerTerminalVanishing, Examples) {
  Catalog sq = single(entry([](double t) { return t * t; }, [](double t) { return 2 * t; }, "t^2", {0, 5}));
  const std::vector<double> half{0.5};
  auto r = verify_lower_terminal_vanishing(sq, LowerTerminal(0), half);
  EXPECT_LE(r.max_residual(), 1e-6);

  Catalog k = single(entry([](double) { return 3.0; }, [](double) { return 0.0; }, "3", {0, 5}));
  const std::vector<double> many{0.1, 0.5, 0.9};
  EXPECT_EQ(verify_lower_terminal_vanishing(k, LowerTerminal(0), many).max_residual(), 0.0);

  // 2 sqrt(t) at order 1/4: t^{1/4} -> 0
  CatalogEntry e = entry([](double t) { return 2 * std::sqrt(t); }, [](double t) { return 1 / std::sqrt(t); },
                         "2sqrt", {0.01, 5});
  e.bounded_derivative_near_a = true;  // exercised on purpose: the order is below 1/2
  const std::vector<double> quarter{0.25};
  EXPECT_LE(verify_lower_terminal_vanishing(single(e), LowerTerminal(0), quarter).max_residual(), 1e-5);
}

TEST(LowerTerminalVanishing, NonExistsIsAFailingCase) {
  CatalogEntry e = entry([](double t) { return 2 * std::sqrt(t); }, [](double t) { return 1 / std::sqrt(t); },
                         "2sqrt", {0.01, 5});
  const std::vector<double> big{0.75};
  auto r = verify_lower_terminal_vanishing(single(e), LowerTerminal(0), big);
  EXPECT_FALSE(r.passed());
  ASSERT_FALSE(r.cases().empty());
  EXPECT_FALSE(r.cases().front().note.empty());
}

TEST(Counterexample, Examples) {
  EXPECT_TRUE(counterexample_check(0.5, 0.75, LowerTerminal(0), 1.0).passed());
  EXPECT_TRUE(counterexample_check(0.5, 0.75, LowerTerminal(-2), 0.0).passed());
  EXPECT_TRUE(counterexample_check(0.3, 0.9, LowerTerminal(0), 1.0).passed());
  EXPECT_THROW(counterexample_check(0.75, 0.5, LowerTerminal(0), 1.0), PreconditionError);
  EXPECT_THROW(counterexample_check(0.5, 0.5, LowerTerminal(0), 1.0), PreconditionError);
}

TEST(Counterexample, GridOfOrders) {
  for (double al : {0.1, 0.3, 0.5, 0.7})
    for (double be : {0.2, 0.4, 0.6, 0.8, 0.95})
      if (be > al) EXPECT_TRUE(counterexample_check(al, be, LowerTerminal(1), 3.0).passed()) << al << " " << be;
}

TEST(Reports, DeterministicAcrossRuns) {
  const Catalog cat = smooth_catalog(0.0);
  const auto pts = default_points(0.0);
  auto first = verify_order_change(cat, LowerTerminal(0), Order(0.5), Order(0.75), pts);
  auto second = verify_order_change(cat, LowerTerminal(0), Order(0.5), Order(0.75), pts);
  ASSERT_EQ(first.cases().size(), second.cases().size());
  for (std::size_t i = 0; i < first.cases().size(); ++i) {
    EXPECT_EQ(first.cases()[i].label, second.cases()[i].label);
    EXPECT_EQ(first.cases()[i].points, second.cases()[i].points);
    EXPECT_EQ(first.cases()[i].residual, second.cases()[i].residual);
  }
  for (std::size_t i = 1; i < first.cases().size(); ++i)
    EXPECT_LE(first.cases()[i - 1].label, first.cases()[i].label);
  ASSERT_NE(find_case(first, "sin"), nullptr);
}
