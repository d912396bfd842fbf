#pragma once

// Numerical left-sided conformable derivatives
//
//   T^alpha_a f(t) = lim_{theta -> 0} [f(t + theta (t - a)^{1 - alpha}) - f(t)] / theta
//
// estimated from difference quotients on a geometric theta sequence with
// Richardson extrapolation, plus the one-sided limits, the limit t -> a+ that
// defines the derivative at the lower terminal, and the exact order-transfer
// map between orders.

#include <confcalc/core.hpp>

namespace confcalc {

/// Controls the theta -> 0 limit.
struct LimitOptions {
  double theta0 = 1e-2;           // initial |theta|
  double shrink = 0.5;            // theta_{k+1} = shrink * theta_k
  int max_levels = 20;            // quotients per side
  int richardson_order = 2;       // 1: average one-sided limits; 2: even-power central tableau
  double mismatch_tol = 1e-5;     // scaled gap separating left and right limits
  double diverge_threshold = 1e8; // growth factor over the coarsest quotient that is divergent outright
  double converge_tol = 1e-6;     // scaled extrapolation error accepted as converged

  /// Throws InvalidArgument if any field is out of range.
  void validate() const;
};

enum class Side { Left, Right };

/// Two-sided estimate of T^alpha_a f(t), t > a.
///
/// verdict is Exists when both one-sided limits converge and agree within
/// mismatch_tol, LeftRightMismatch when both converge but disagree, Diverges
/// when either side's quotients blow up like a power of 1/|theta|, and
/// Inconclusive otherwise. error_estimate is the magnitude of the last
/// extrapolation correction (floored at the roundoff level of the quotients).
///
/// Throws DomainError for t <= a (use derivative_at_lower_terminal) and
/// EvaluationError when f is undefined at a required sample point.
DerivativeEstimate conformable_derivative(const ScalarFunction& f, LowerTerminal a, Order alpha,
                                          double t, const LimitOptions& opts = {});

/// T^alpha_a f(t-0) or T^alpha_a f(t+0). Verdict is Exists, Diverges or Inconclusive.
DerivativeEstimate one_sided_derivative(const ScalarFunction& f, LowerTerminal a, Order alpha,
                                        double t, Side side, const LimitOptions& opts = {});

/// T^alpha_a f(a) = lim_{t -> a+} T^alpha_a f(t), probed along
/// t_k = a + theta0 * shrink^k and accelerated with the Wynn epsilon algorithm.
///
/// Only finitely many points can be sampled, so a missing limit is reported as
/// Inconclusive (or Diverges for sustained blow-up), never as a proof of
/// nonexistence.
DerivativeEstimate derivative_at_lower_terminal(const ScalarFunction& f, LowerTerminal a,
                                                Order alpha, const LimitOptions& opts = {});

/// (t0 - a)^{from - to} * value: T^{to}_a f(t0) from T^{from}_a f(t0). Exact.
double order_transfer(double value, double t0, LowerTerminal a, Order from_order, Order to_order);

/// Runs both one-sided estimators and classifies existence. The returned
/// estimate carries both one-sided values; value is their mean when Exists.
DerivativeEstimate classify_alpha_differentiability(const ScalarFunction& f, LowerTerminal a,
                                                    Order alpha, double t,
                                                    const LimitOptions& opts = {});

}  // namespace confcalc
