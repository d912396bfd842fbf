#include <confcalc/identities.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace confcalc {

namespace {

constexpr double kSelfCheckTol = 1e-6;
constexpr int kSelfCheckPoints = 9;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// fourth-order central difference
double central_difference(const ScalarFunction& f, double t, double h) {
  return (f.at(t - 2 * h) - 8 * f.at(t - h) + 8 * f.at(t + h) - f.at(t + 2 * h)) / (12 * h);
}

void self_check(const CatalogEntry& e) {
  if (!e.f_prime) return;
  const double lo = e.smooth_on.lo;
  const double hi = e.smooth_on.hi;
  if (!(hi > lo)) throw InvalidArgument("catalog entry " + e.f.label() + ": empty smooth_on interval");
  const double cell = (hi - lo) / kSelfCheckPoints;
  for (int i = 0; i < kSelfCheckPoints; ++i) {
    const double t = lo + (i + 0.5) * cell;
    const double h = std::min(1e-3 * std::max(1.0, std::abs(t)), 0.2 * cell);
    const double fd = central_difference(e.f, t, h);
    const double exact = e.f_prime->at(t);
    if (scaled_residual(fd, exact) > kSelfCheckTol) {
      throw InvalidArgument("catalog entry " + e.f.label() + ": f_prime disagrees with f at t = " +
                            fmt(t) + " (" + fmt(exact) + " vs " + fmt(fd) + ")");
    }
  }
}

CatalogEntry entry(ScalarFunction f, ScalarFunction df, Interval on, std::string notes) {
  CatalogEntry e{std::move(f), std::move(df), on, std::move(notes)};
  e.smooth = true;
  e.bounded_derivative_near_a = true;
  e.locally_bounded_at_a = true;
  return e;
}

}  // namespace

Catalog::Catalog(std::vector<CatalogEntry> entries) {
  for (auto& e : entries) add(std::move(e));
}

void Catalog::add(CatalogEntry e) {
  self_check(e);
  entries_.push_back(std::move(e));
}

Catalog Catalog::smooth_only() const {
  Catalog out;
  for (const auto& e : entries_)
    if (e.smooth) out.entries_.push_back(e);
  return out;
}

Catalog Catalog::with_bounded_derivative_near_a() const {
  Catalog out;
  for (const auto& e : entries_)
    if (e.bounded_derivative_near_a) out.entries_.push_back(e);
  return out;
}

Catalog Catalog::locally_bounded() const {
  Catalog out;
  for (const auto& e : entries_)
    if (e.locally_bounded_at_a) out.entries_.push_back(e);
  return out;
}

Catalog smooth_catalog(double a) {
  const Interval near{a + 0.01, a + 10.0};
  std::vector<CatalogEntry> v;
  v.push_back(entry(constant_function(3.0), constant_function(0.0), near, "constant"));
  v.push_back(entry(ScalarFunction::real([](double t) { return t; }, "t"),
                    constant_function(1.0), near, "identity"));
  v.push_back(entry(ScalarFunction::real([](double t) { return t * t; }, "t^2"),
                    ScalarFunction::real([](double t) { return 2 * t; }, "2*t"), near, "square"));
  v.push_back(entry(ScalarFunction::real([](double t) { return t * t * t + 1; }, "t^3+1"),
                    ScalarFunction::real([](double t) { return 3 * t * t; }, "3*t^2"), near,
                    "cubic, nonzero at 0"));

  auto root = entry(ScalarFunction::real([a](double t) { return std::sqrt(t - a); },
                                         "sqrt(t-" + fmt(a) + ")", a),
                    ScalarFunction::real([a](double t) { return 0.5 / std::sqrt(t - a); },
                                         "0.5/sqrt(t-" + fmt(a) + ")", a),
                    near, "unbounded derivative at a");
  root.bounded_derivative_near_a = false;
  v.push_back(std::move(root));

  v.push_back(entry(ScalarFunction::real([](double t) { return std::exp(t); }, "exp(t)"),
                    ScalarFunction::real([](double t) { return std::exp(t); }, "exp(t)"), near,
                    "exponential"));
  v.push_back(entry(ScalarFunction::real([](double t) { return std::sin(t); }, "sin(t)"),
                    ScalarFunction::real([](double t) { return std::cos(t); }, "cos(t)"), near,
                    "oscillatory"));
  return Catalog(std::move(v));
}

CatalogEntry kink_entry(double a, double offset) {
  if (!(offset > 0.0)) throw InvalidArgument("kink offset must be positive");
  const double c = a + offset;
  CatalogEntry e{
      ScalarFunction::real([c](double t) { return std::abs(t - c); }, "|t-" + fmt(c) + "|"),
      ScalarFunction::real([c](double t) { return t < c ? -1.0 : 1.0; }, "sign(t-" + fmt(c) + ")"),
      Interval{a + 0.01 * offset, c - 0.01 * offset},
      "kink at c = " + fmt(c)};
  e.bounded_derivative_near_a = true;
  e.locally_bounded_at_a = true;
  return e;
}

CatalogEntry power_law_entry(double a, double alpha, double beta) {
  if (!(0.0 < alpha && alpha < beta && beta < 1.0))
    throw PreconditionError("power law entry needs 0 < alpha < beta < 1");
  const std::string tag = "(t-" + fmt(a) + ")^" + fmt(alpha - beta);
  return CatalogEntry{
      ScalarFunction::real([=](double t) { return std::pow(t - a, alpha - beta) / alpha; },
                           fmt(1 / alpha) + "*" + tag, a),
      ScalarFunction::real(
          [=](double t) { return (alpha - beta) / alpha * std::pow(t - a, alpha - beta - 1); },
          "power law derivative", a),
      Interval{a + 0.1, a + 10.0},
      "order-" + fmt(alpha) + " derivative not integrable at a (beta = " + fmt(beta) + ")"};
}

Catalog default_catalog(double a) {
  Catalog c = smooth_catalog(a);
  c.add(kink_entry(a));
  c.add(power_law_entry(a, 0.5, 0.75));
  return c;
}

std::vector<double> default_points(double a) {
  return {a + 0.01, a + 0.1, a + 1.0, a + 10.0};
}

}  // namespace confcalc
