#pragma once

// Solvers for the conformable initial value problem
//
//   T^alpha_a x(t) = F(t, x(t)),  x(a) = x0,  t in [a, T].
//
// For differentiable x this is x' = (t - a)^{alpha - 1} F(t, x), and with
// u = (t - a)^alpha it becomes the regular problem dx/du = F(a + u^{1/alpha}, x) / alpha.

#include <confcalc/core.hpp>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace confcalc {

/// dx/du = rhs(u, x) on [0, u_end], x(0) = x0, with t = a + u^{1/alpha}.
struct RegularizedProblem {
  double a;
  double alpha;
  double x0;
  double u_end;
  std::function<double(double u, double x)> rhs;  // throws EvaluationError where F is undefined

  double to_t(double u) const;
  double to_u(double t) const;
};

/// Exact change of variables; validates the spec.
RegularizedProblem regularize(const IvpSpec& spec);

/// Adaptive Dormand-Prince 5(4) on the regularized problem with absolute and
/// relative error targets spec.tol. Steps are capped at u_end / dense_steps so
/// the trajectory is dense enough for interpolation.
/// Throws StepFailure when the step size collapses or the solution overflows.
Trajectory solve_regularized(const IvpSpec& spec, std::size_t dense_steps = 1024);

/// Picard iteration x_{k+1} = x0 + I^alpha F(., x_k) on grid_n cells uniform in
/// u, cell integrals by Gauss-Legendre with x_k interpolated by local cubics.
/// Stops when the sup-norm change is <= spec.tol; NonConvergence after max_iters.
Trajectory solve_picard(const IvpSpec& spec, std::size_t grid_n = 256, std::size_t max_iters = 500);

struct DirectOptions {
  double epsilon_frac = 1e-4;         // bootstrap interval [a, a + epsilon_frac (T - a)]
  std::size_t bootstrap_cells = 16;   // Picard grid on the bootstrap interval
  std::size_t bootstrap_sweeps = 50;  // 1 gives a single Picard step from x = x0
  std::size_t dense_steps = 1024;     // step cap (T - a) / dense_steps away from a
};

/// Bootstraps x on [a, a + eps] by Picard sweeps, then integrates
/// x' = (t - a)^{alpha - 1} F(t, x) directly in t with Dormand-Prince 5(4).
Trajectory solve_direct_singular(const IvpSpec& spec, const DirectOptions& opts = {});

/// Dispatches on spec.method with default solver settings.
Trajectory solve(const IvpSpec& spec);

/// max |(t - a)^{1 - alpha} x'(t) - F(t, x(t))| over points, with x' a finite
/// difference of the interpolated trajectory. DomainError for points outside (a, T].
double residual(const Trajectory& traj, const IvpSpec& spec, std::span<const double> points);

/// n uniform points on [a + 0.01 (T - a), T].
std::vector<double> residual_points(const IvpSpec& spec, std::size_t n = 200);

/// t -> x0 exp(lambda (t - a)^alpha / alpha), the solution of T^alpha x = lambda x.
ScalarFunction linear_closed_form(double lambda, LowerTerminal a, Order alpha, double x0);

}  // namespace confcalc
