#include <confcalc/ivp.hpp>

#include <confcalc/integ.hpp>

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace confcalc {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 1>;

constexpr std::size_t kMaxSteps = 5'000'000;
constexpr double kMinStepFrac = 1e-14;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double eval_F(const RightSide& F, double t, double x) {
  const auto v = F(t, x);
  if (!v || !std::isfinite(*v))
    throw EvaluationError("F undefined at t = " + fmt(t) + ", x = " + fmt(x));
  return *v;
}

struct Path {
  std::vector<double> s;
  std::vector<double> x;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

// Controlled Dormand-Prince 5(4) for dx/ds = rhs(s, x) on [s0, s1], recording every accepted step.
// max_step(s) caps the step taken from s.
Path integrate(const std::function<double(double, double)>& rhs, double s0, double s1, double x0,
               double tol, const std::function<double(double)>& max_step) {
  Path p;
  p.s.push_back(s0);
  p.x.push_back(x0);
  if (s1 <= s0) return p;

  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol, tol);
  auto system = [&rhs](const State& x, State& dxdt, double s) { dxdt[0] = rhs(s, x[0]); };
  State x{x0};
  double s = s0;
  double dt = std::min(max_step(s0), 0.01 * (s1 - s0));
  const double min_step = kMinStepFrac * std::max(std::abs(s1), s1 - s0);
  while (s < s1) {
    const bool last = s + dt >= s1;
    if (last) dt = s1 - s;
    const double s_before = s;
    if (stepper.try_step(system, x, s, dt) == odeint::success) {
      if (!std::isfinite(x[0]))
        throw StepFailure("solution left the representable range near s = " + fmt(s));
      if (last) s = s1;  // land exactly on the end point
      if (s > s_before) {
        p.s.push_back(s);
        p.x.push_back(x[0]);
      }
      if (++p.steps > kMaxSteps) throw StepFailure("step budget exhausted at s = " + fmt(s));
      dt = std::min(dt, max_step(s));
    } else {
      ++p.rejected;
      if (!(dt >= min_step))
        throw StepFailure("step size fell below " + fmt(min_step) + " at s = " + fmt(s) +
                          " without meeting tol " + fmt(tol));
    }
  }
  return p;
}

// Samples in t from a u or tau path, dropping points that round onto their predecessor.
void append_samples(std::vector<Sample>& out, const std::vector<double>& t,
                    const std::vector<double>& x) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!out.empty() && !(t[i] > out.back().t)) continue;
    out.push_back({t[i], x[i]});
  }
}

// Local cubic through the four uniform nodes around v.
double cubic_at(const std::vector<double>& y, double h, double v) {
  const std::size_t n = y.size() - 1;  // cells
  const double pos = v / h;
  auto cell = static_cast<std::ptrdiff_t>(std::floor(pos));
  std::ptrdiff_t j0 = std::clamp<std::ptrdiff_t>(cell - 1, 0, static_cast<std::ptrdiff_t>(n) - 3);
  const double r = pos - static_cast<double>(j0);
  const double y0 = y[j0], y1 = y[j0 + 1], y2 = y[j0 + 2], y3 = y[j0 + 3];
  return -y0 * (r - 1) * (r - 2) * (r - 3) / 6 + y1 * r * (r - 2) * (r - 3) / 2 -
         y2 * r * (r - 1) * (r - 3) / 2 + y3 * r * (r - 1) * (r - 2) / 6;
}

struct PicardRun {
  std::vector<double> x;  // values at u_j = j h
  double h;
  std::size_t iterations = 0;
  double last_change = std::numeric_limits<double>::infinity();
  bool converged = false;
};

PicardRun picard(const RegularizedProblem& p, double u_end, std::size_t cells,
                 std::size_t max_iters, double tol) {
  PicardRun run;
  run.h = u_end / static_cast<double>(cells);
  run.x.assign(cells + 1, p.x0);
  std::vector<double> next(cells + 1);
  for (std::size_t k = 0; k < max_iters; ++k) {
    const auto& prev = run.x;
    const std::function<double(double)> integrand = [&](double v) {
      return p.rhs(v, cubic_at(prev, run.h, v));
    };
    next[0] = p.x0;
    double acc = 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
      acc += quad::gauss_legendre(integrand, j * run.h, (j + 1) * run.h);
      next[j + 1] = p.x0 + acc;
    }
    double change = 0.0;
    for (std::size_t j = 0; j <= cells; ++j) change = std::max(change, std::abs(next[j] - prev[j]));
    run.x.swap(next);
    run.iterations = k + 1;
    run.last_change = std::isfinite(change) ? change : std::numeric_limits<double>::infinity();
    if (!std::isfinite(change)) break;
    if (change <= tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace

double RegularizedProblem::to_t(double u) const {
  return a + quad::inverse_substitution(u, alpha);
}

double RegularizedProblem::to_u(double t) const {
  const double d = t - a;
  if (d <= 0.0) return 0.0;
  return alpha == 1.0 ? d : std::pow(d, alpha);
}

RegularizedProblem regularize(const IvpSpec& spec) {
  spec.validate();
  RegularizedProblem p;
  p.a = spec.a.value();
  p.alpha = spec.alpha.value();
  p.x0 = spec.x0;
  p.u_end = p.to_u(spec.horizon);
  const RightSide F = spec.F;
  const double a = p.a;
  const double alpha = p.alpha;
  p.rhs = [F, a, alpha](double u, double x) {
    return eval_F(F, a + quad::inverse_substitution(u, alpha), x) / alpha;
  };
  return p;
}

Trajectory solve_regularized(const IvpSpec& spec, std::size_t dense_steps) {
  const RegularizedProblem p = regularize(spec);
  if (dense_steps == 0) throw InvalidArgument("dense_steps must be positive");
  const double cap = p.u_end / static_cast<double>(dense_steps);
  const Path path = integrate(p.rhs, 0.0, p.u_end, p.x0, spec.tol, [cap](double) { return cap; });
  std::vector<double> t(path.s.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = p.to_t(path.s[i]);
  t.front() = p.a;
  t.back() = spec.horizon;
  std::vector<Sample> samples;
  append_samples(samples, t, path.x);
  samples.back() = {spec.horizon, path.x.back()};

  SolverMeta meta{IvpMethod::Regularized, path.steps, path.rejected, 0, spec.tol};
  return Trajectory(std::move(samples), Interpolation{InterpolationKind::CubicLocal, p.alpha}, meta);
}

Trajectory solve_picard(const IvpSpec& spec, std::size_t grid_n, std::size_t max_iters) {
  const RegularizedProblem p = regularize(spec);
  if (grid_n < 16) throw InvalidArgument("Picard grid needs at least 16 cells");
  if (max_iters == 0) throw InvalidArgument("max_iters must be positive");
  const PicardRun run = picard(p, p.u_end, grid_n, max_iters, spec.tol);
  if (!run.converged) {
    throw NonConvergence("Picard iteration stopped after " + std::to_string(run.iterations) +
                             " iterations with sup-norm change " + fmt(run.last_change),
                         run.last_change);
  }
  std::vector<double> t(grid_n + 1);
  for (std::size_t j = 0; j <= grid_n; ++j) t[j] = p.to_t(j * run.h);
  t.front() = p.a;
  t.back() = spec.horizon;
  std::vector<Sample> samples;
  append_samples(samples, t, run.x);
  samples.back() = {spec.horizon, run.x.back()};

  SolverMeta meta{IvpMethod::Picard, grid_n, 0, run.iterations, run.last_change};
  return Trajectory(std::move(samples), Interpolation{InterpolationKind::CubicLocal, p.alpha}, meta);
}

Trajectory solve_direct_singular(const IvpSpec& spec, const DirectOptions& opts) {
  const RegularizedProblem p = regularize(spec);
  if (!(opts.epsilon_frac > 0.0 && opts.epsilon_frac <= 0.1))
    throw InvalidArgument("epsilon_frac must lie in (0, 0.1]");
  if (opts.bootstrap_cells < 4) throw InvalidArgument("bootstrap needs at least 4 cells");
  if (opts.bootstrap_sweeps == 0) throw InvalidArgument("bootstrap_sweeps must be positive");
  if (opts.dense_steps == 0) throw InvalidArgument("dense_steps must be positive");

  const double span = spec.horizon - p.a;
  const double eps = opts.epsilon_frac * span;

  // bootstrap on [a, a + eps] in u, where the solution is smooth
  const PicardRun boot = picard(p, p.to_u(p.a + eps), opts.bootstrap_cells, opts.bootstrap_sweeps, spec.tol);
  std::vector<double> t_boot(boot.x.size());
  for (std::size_t j = 0; j < t_boot.size(); ++j) t_boot[j] = p.to_t(j * boot.h);
  t_boot.front() = p.a;
  t_boot.back() = p.a + eps;  // the direct leg starts exactly here

  // x' = tau^{alpha - 1} F(a + tau, x) with tau = t - a, which keeps t - a exact near a
  const RightSide F = spec.F;
  const double a = p.a;
  const double alpha = p.alpha;
  auto rhs = [F, a, alpha](double tau, double x) {
    const double w = alpha == 1.0 ? 1.0 : std::pow(tau, alpha - 1.0);
    return w * eval_F(F, a + tau, x);
  };
  // same spacing in u = tau^alpha as the regularized solver, and at most span / dense_steps
  const double cap_t = span / static_cast<double>(opts.dense_steps);
  const double cap_u = p.u_end / static_cast<double>(opts.dense_steps);
  auto max_step = [=](double tau) {
    return alpha == 1.0 ? cap_t : std::min(cap_t, cap_u * std::pow(tau, 1.0 - alpha) / alpha);
  };
  const Path path = integrate(rhs, eps, span, boot.x.back(), spec.tol, max_step);

  std::vector<Sample> samples;
  append_samples(samples, t_boot, boot.x);
  std::vector<double> t_direct(path.s.size());
  for (std::size_t i = 0; i < t_direct.size(); ++i) t_direct[i] = a + path.s[i];
  t_direct.back() = spec.horizon;
  append_samples(samples, t_direct, path.x);
  samples.back() = {spec.horizon, path.x.back()};

  SolverMeta meta{IvpMethod::DirectSingular, path.steps, path.rejected, boot.iterations,
                  std::max(spec.tol, boot.converged ? 0.0 : boot.last_change)};
  return Trajectory(std::move(samples), Interpolation{InterpolationKind::CubicLocal, p.alpha}, meta);
}

Trajectory solve(const IvpSpec& spec) {
  switch (spec.method) {
    case IvpMethod::Regularized: return solve_regularized(spec);
    case IvpMethod::Picard: return solve_picard(spec);
    case IvpMethod::DirectSingular: return solve_direct_singular(spec);
  }
  throw InvalidArgument("unknown solver method");
}

double residual(const Trajectory& traj, const IvpSpec& spec, std::span<const double> points) {
  const double a = spec.a.value();
  const double alpha = spec.alpha.value();
  const double t_end = traj.back().t;
  const double span = t_end - a;
  double worst = 0.0;
  for (double t : points) {
    if (!(t > a) || !(t <= t_end))
      throw DomainError("residual point " + fmt(t) + " outside (a, T]");
    const double h = std::min(1e-6 * span, 0.25 * (t - a));
    double dx;
    if (t + h <= t_end) {
      dx = (traj(t + h) - traj(t - h)) / (2 * h);
    } else {
      dx = (3 * traj(t) - 4 * traj(t - h) + traj(t - 2 * h)) / (2 * h);
    }
    const double x = traj(t);
    const double lhs = (alpha == 1.0 ? 1.0 : std::pow(t - a, 1.0 - alpha)) * dx;
    worst = std::max(worst, std::abs(lhs - eval_F(spec.F, t, x)));
  }
  return worst;
}

std::vector<double> residual_points(const IvpSpec& spec, std::size_t n) {
  if (n < 2) throw InvalidArgument("need at least two residual points");
  const double a = spec.a.value();
  const double lo = a + 0.01 * (spec.horizon - a);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + (spec.horizon - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = spec.horizon;
  return out;
}

ScalarFunction linear_closed_form(double lambda, LowerTerminal a, Order alpha, double x0) {
  const double av = a.value();
  const double al = alpha.value();
  std::ostringstream label;
  label << x0 << "*exp(" << lambda << "*(t-" << av << ")^" << al << "/" << al << ")";
  return ScalarFunction::real(
      [=](double t) { return x0 * std::exp(lambda * std::pow(t - av, al) / al); }, label.str(), av);
}

}  // namespace confcalc
