#pragma once

// Conformable integral
//
//   I^alpha_a f(t) = int_a^t (s - a)^{alpha - 1} f(s) ds
//
// evaluated after the substitution u = (s - a)^alpha, which turns it into
//
//   (1/alpha) int_0^{(t - a)^alpha} f(a + u^{1/alpha}) du,
//
// an integral with no endpoint singularity whenever f is bounded near a.

#include <confcalc/core.hpp>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace confcalc {

struct QuadOptions {
  double tol = 1e-10;          // scaled: |error| <= tol * max(1, |I|)
  int max_refinements = 30;    // bisection depth / probe levels
  double diverge_growth = 1.5; // growth of partial integrals over a 4-level window

  void validate() const;
};

/// I^alpha_a f(t) for t >= a; 0 for t == a.
///
/// Throws DomainError for t < a, DivergenceError when the integral diverges
/// at the lower terminal (decided by divergence_probe), QuadratureError when
/// refinement neither converges nor diverges, and EvaluationError from f.
double conformable_integral(const ScalarFunction& f, LowerTerminal a, Order alpha, double t,
                            const QuadOptions& opts = {});

/// int_{t1}^{t2} (s - a)^{alpha - 1} f(s) ds for a <= t1 <= t2.
double conformable_integral_between(const ScalarFunction& f, LowerTerminal a, Order alpha,
                                    double t1, double t2, const QuadOptions& opts = {});

enum class ProbeVerdict { Convergent, Divergent, Inconclusive };

std::string_view to_string(ProbeVerdict v);

struct ProbeResult {
  ProbeVerdict verdict = ProbeVerdict::Inconclusive;
  std::optional<double> value;   // extrapolated integral when Convergent
  std::vector<double> partials;  // integrals over [a + eps_k, t], k = 1, 2, ...
  std::string note;
};

/// Classifies I^alpha_a f(t) from partial integrals over [a + eps_k, t] with
/// eps_k = (t - a) 2^{-k}.
///
/// Divergent: over a window of four levels the increments keep one sign and
/// grow at a near-constant ratio, and |partial| grows by at least diverge_growth.
/// Convergent: increments shrink and the Wynn-extrapolated limit settles
/// within tol. Inconclusive otherwise.
ProbeResult divergence_probe(const ScalarFunction& f, LowerTerminal a, Order alpha, double t,
                             const QuadOptions& opts = {});

namespace quad {

/// u^{1/alpha}, evaluated in log space for small u.
double inverse_substitution(double u, double alpha);

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
  bool endpoint_limited = false;  // the interval touching lo reached max depth unconverged
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of g over [lo, hi].
/// Stops when the summed error estimate is below max(tol, tol |I|) plus the
/// roundoff level of int |g|.
Result adaptive(const std::function<double(double)>& g, double lo, double hi, double tol,
                int max_depth);

/// Fixed 8-point Gauss-Legendre rule on [lo, hi].
double gauss_legendre(const std::function<double(double)>& g, double lo, double hi);

}  // namespace quad

}  // namespace confcalc
