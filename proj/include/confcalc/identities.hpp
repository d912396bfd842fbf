#pragma once

// Numerical checks of the conformable calculus identities over a catalog of
// test functions. Every check returns VerificationReports whose residuals are
// scaled: |got - want| / max(1, |want|).

#include <confcalc/core.hpp>
#include <confcalc/deriv.hpp>
#include <confcalc/integ.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace confcalc {

struct Interval {
  double lo;
  double hi;
};

struct CatalogEntry {
  ScalarFunction f;
  std::optional<ScalarFunction> f_prime;  // analytic f'
  Interval smooth_on;                     // f' is continuous here
  std::string notes;

  bool smooth = false;                  // C^1 on (a, inf)
  bool bounded_derivative_near_a = false;
  bool locally_bounded_at_a = false;    // f bounded on (a, a + eps)
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<CatalogEntry> entries);

  /// Appends e after checking f_prime against central differences of f on
  /// smooth_on (scaled gap <= 1e-6); throws InvalidArgument on mismatch.
  void add(CatalogEntry e);

  std::span<const CatalogEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  Catalog smooth_only() const;
  Catalog with_bounded_derivative_near_a() const;
  Catalog locally_bounded() const;

 private:
  std::vector<CatalogEntry> entries_;
};

/// Constant, t, t^2, t^3 + 1, sqrt(t - a), e^t, sin t.
Catalog smooth_catalog(double a);

/// |t - c| with c = a + offset (offset > 0).
CatalogEntry kink_entry(double a, double offset = 2.0);

/// alpha^{-1} (t - a)^{alpha - beta}, 0 < alpha < beta < 1. Its conformable
/// derivative of order alpha is not integrable at a.
CatalogEntry power_law_entry(double a, double alpha, double beta);

/// smooth_catalog plus kink_entry plus power_law_entry(a, 1/2, 3/4).
Catalog default_catalog(double a);

/// a + 10^k for k = -2..1.
std::vector<double> default_points(double a);

struct VerifyOptions {
  std::optional<double> tolerance;  // report tolerance; per-identity default when empty
  LimitOptions limit;
  QuadOptions quad;
};

inline constexpr double kDefaultTolerance = 1e-5;
inline constexpr double kChainedTolerance = 1e-4;  // derivative of a numerical integral

/// Reports "constant_rule", "linearity", "product_rule", "quotient_rule" (in
/// that order) over all ordered pairs (f, g) of the catalog. Every side is an
/// independent limit estimate; cases where an estimate is not Exists, or
/// |g(t)| is tiny for the quotient rule, are skipped.
std::vector<VerificationReport> verify_algebraic_rules(const Catalog& catalog, LowerTerminal a,
                                                       Order alpha, std::span<const double> points,
                                                       const VerifyOptions& opts = {});

/// Residual of T^beta f(t0) against (t0 - a)^{alpha - beta} T^alpha f(t0),
/// both estimated independently.
VerificationReport verify_order_change(const Catalog& catalog, LowerTerminal a, Order alpha,
                                       Order beta, std::span<const double> points,
                                       const VerifyOptions& opts = {});

/// Residual of I^alpha[T^alpha f](t) against f(t) - f(a). T^alpha f is built
/// from f_prime when present, otherwise from the limit estimator.
/// DivergenceError from the integral propagates.
VerificationReport verify_left_inverse(const Catalog& catalog, LowerTerminal a, Order alpha,
                                       std::span<const double> points,
                                       const VerifyOptions& opts = {});

/// Residual of T^alpha[u -> I^alpha f(u)](t) against f(t). Entries not locally
/// bounded at a are skipped.
VerificationReport verify_right_inverse(const Catalog& catalog, LowerTerminal a, Order alpha,
                                        std::span<const double> points,
                                        const VerifyOptions& opts = {});

/// |T^alpha f(a)| for every alpha < 1 in alpha_list; anything but Exists is a
/// failing case with the estimator's note. Entries without a bounded
/// derivative near a are skipped.
VerificationReport verify_lower_terminal_vanishing(const Catalog& catalog, LowerTerminal a,
                                                   std::span<const double> alpha_list,
                                                   const VerifyOptions& opts = {});

/// Probes I^alpha of T^alpha f for f = alpha^{-1} (t - a)^{alpha - beta};
/// passes iff the probe says Divergent. PreconditionError unless
/// 0 < alpha < beta < 1.
VerificationReport counterexample_check(double alpha, double beta, LowerTerminal a, double t,
                                        const VerifyOptions& opts = {});

}  // namespace confcalc
