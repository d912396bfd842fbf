#include <confcalc/integ.hpp>

#include <confcalc/detail/extrapolation.hpp>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace confcalc {

namespace {

constexpr std::size_t kMaxIntervals = 20000;
constexpr std::size_t kGrowthWindow = 4;
constexpr double kRatioSpread = 1.25;

// Interior trouble (jumps, kinks) resolved to max depth is accepted up to this
// multiple of the requested tolerance.
constexpr double kInteriorSlack = 1e3;

std::function<double(double)> substituted(const ScalarFunction& f, double a, double alpha) {
  return [&f, a, alpha](double u) {
    return f.at(a + quad::inverse_substitution(u, alpha)) / alpha;
  };
}

double substituted_coordinate(double s_minus_a, double alpha) {
  return alpha == 1.0 ? s_minus_a : std::pow(s_minus_a, alpha);
}

std::string describe(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

// Adaptive integral over [lo, hi] in u that has to converge (no singular endpoint).
double regular_piece(const std::function<double(double)>& g, double lo, double hi,
                     const QuadOptions& opts) {
  const auto r = quad::adaptive(g, lo, hi, opts.tol, opts.max_refinements);
  if (r.converged) return r.value;
  if (r.error <= kInteriorSlack * opts.tol * std::max(1.0, std::abs(r.value))) return r.value;
  throw QuadratureError("adaptive quadrature did not converge on [" + describe(lo) + ", " +
                        describe(hi) + "] (error estimate " + describe(r.error) + ")");
}

}  // namespace

void QuadOptions::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("quadrature tol must be positive");
  if (max_refinements < 4 || max_refinements > 60)
    throw InvalidArgument("max_refinements must lie in [4, 60]");
  if (!(diverge_growth > 1.0)) throw InvalidArgument("diverge_growth must exceed 1");
}

std::string_view to_string(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::Convergent: return "Convergent";
    case ProbeVerdict::Divergent: return "Divergent";
    case ProbeVerdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace quad {

double inverse_substitution(double u, double alpha) {
  if (alpha == 1.0) return u;
  if (u <= 0.0) return 0.0;
  if (u < 1e-3) return std::exp(std::log(u) / alpha);
  return std::pow(u, 1.0 / alpha);
}

Result adaptive(const std::function<double(double)>& g, double lo, double hi, double tol,
                int max_depth) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Piece {
    double lo, hi, value, error, l1;
    int depth;
  };
  auto eval = [&](double l, double h, int depth) {
    double err = 0.0;
    double l1 = 0.0;
    double v = Kronrod::integrate(g, l, h, 0, 0.0, &err, &l1);
    // the single-panel error comes back in [-1, 1] units; the value and l1 are scaled
    return Piece{l, h, v, err * 0.5 * (h - l), l1, depth};
  };
  auto by_error = [](const Piece& x, const Piece& y) { return x.error < y.error; };

  Result out;
  if (lo == hi) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Piece, std::vector<Piece>, decltype(by_error)> open(by_error);
  std::vector<Piece> frozen;  // reached max depth
  Piece first = eval(lo, hi, 0);
  double value = first.value;
  double error = first.error;
  double l1 = first.l1;
  open.push(first);

  auto target = [&] {
    return std::max({tol, tol * std::abs(value),
                     50.0 * std::numeric_limits<double>::epsilon() * l1});
  };
  double frozen_error = 0.0;
  // refine while the error that bisection can still reduce exceeds the target
  while (!open.empty() && error > target() && error - frozen_error > target() &&
         open.size() + frozen.size() < kMaxIntervals) {
    Piece p = open.top();
    open.pop();
    if (p.depth >= max_depth) {
      frozen.push_back(p);
      frozen_error += p.error;
      continue;
    }
    const double mid = 0.5 * (p.lo + p.hi);
    Piece left = eval(p.lo, mid, p.depth + 1);
    Piece right = eval(mid, p.hi, p.depth + 1);
    value += left.value + right.value - p.value;
    error += left.error + right.error - p.error;
    l1 += left.l1 + right.l1 - p.l1;
    open.push(left);
    open.push(right);
  }

  // recompute sums to shed accumulated cancellation
  value = 0.0;
  error = 0.0;
  l1 = 0.0;
  std::vector<Piece> all(frozen);
  while (!open.empty()) {
    all.push_back(open.top());
    open.pop();
  }
  std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) { return x.lo < y.lo; });
  for (const auto& p : all) {
    value += p.value;
    error += p.error;
    l1 += p.l1;
  }
  out.value = value;
  out.error = error;
  out.intervals = all.size();
  out.converged = error <= target();
  if (!out.converged) {
    const Piece& edge = all.front();
    out.endpoint_limited = edge.depth >= max_depth || edge.error >= 0.5 * error;
  }
  return out;
}

double gauss_legendre(const std::function<double(double)>& g, double lo, double hi) {
  return boost::math::quadrature::gauss<double, 8>::integrate(g, lo, hi);
}

}  // namespace quad

double conformable_integral_between(const ScalarFunction& f, LowerTerminal a, Order alpha,
                                    double t1, double t2, const QuadOptions& opts) {
  opts.validate();
  if (!(t1 >= a.value()) || !(t2 >= t1))
    throw DomainError("need a <= t1 <= t2, got t1 = " + describe(t1) + ", t2 = " + describe(t2));
  if (t1 == t2) return 0.0;
  if (t1 == a.value()) return conformable_integral(f, a, alpha, t2, opts);
  const double al = alpha.value();
  return regular_piece(substituted(f, a.value(), al), substituted_coordinate(t1 - a.value(), al),
                       substituted_coordinate(t2 - a.value(), al), opts);
}

double conformable_integral(const ScalarFunction& f, LowerTerminal a, Order alpha, double t,
                            const QuadOptions& opts) {
  opts.validate();
  if (!(t >= a.value()))
    throw DomainError("conformable integral needs t >= a, got t = " + describe(t));
  if (t == a.value()) return 0.0;

  const double al = alpha.value();
  const double upper = substituted_coordinate(t - a.value(), al);
  quad::Result r;
  bool undefined_near_terminal = false;
  try {
    r = quad::adaptive(substituted(f, a.value(), al), 0.0, upper, opts.tol, opts.max_refinements);
  } catch (const EvaluationError&) {
    // f may be undefined only at (a rounded) a; let the probe decide
    undefined_near_terminal = true;
  }
  if (!undefined_near_terminal) {
    if (r.converged) return r.value;
    if (!r.endpoint_limited &&
        r.error <= kInteriorSlack * opts.tol * std::max(1.0, std::abs(r.value)))
      return r.value;
  }

  const ProbeResult probe = divergence_probe(f, a, alpha, t, opts);
  switch (probe.verdict) {
    case ProbeVerdict::Convergent: return *probe.value;
    case ProbeVerdict::Divergent:
      throw DivergenceError("conformable integral of " + f.label() + " diverges at the lower terminal a = " +
                            describe(a.value()));
    case ProbeVerdict::Inconclusive: break;
  }
  throw QuadratureError("conformable integral of " + f.label() + " did not converge: " + probe.note);
}

ProbeResult divergence_probe(const ScalarFunction& f, LowerTerminal a, Order alpha, double t,
                             const QuadOptions& opts) {
  opts.validate();
  if (!(t > a.value())) throw DomainError("divergence probe needs t > a, got t = " + describe(t));
  const double al = alpha.value();
  const double span = t - a.value();
  const auto g = substituted(f, a.value(), al);

  ProbeResult out;
  std::vector<double> increments;
  double partial = 0.0;
  double upper = substituted_coordinate(span, al);
  double eps = span;
  for (int k = 1; k <= opts.max_refinements; ++k) {
    eps *= 0.5;
    const double lower = substituted_coordinate(eps, al);
    const double inc = regular_piece(g, lower, upper, opts);
    upper = lower;
    partial += inc;
    increments.push_back(inc);
    out.partials.push_back(partial);

    const std::size_t n = increments.size();
    if (n >= kGrowthWindow + 1) {
      bool steady = true;
      double lo_ratio = std::numeric_limits<double>::infinity();
      double hi_ratio = 0.0;
      for (std::size_t i = n - kGrowthWindow; i < n; ++i) {
        const double prev = increments[i - 1];
        const double cur = increments[i];
        if (prev == 0.0 || (prev > 0.0) != (cur > 0.0) || std::abs(cur) < std::abs(prev)) {
          steady = false;
          break;
        }
        lo_ratio = std::min(lo_ratio, cur / prev);
        hi_ratio = std::max(hi_ratio, cur / prev);
      }
      // power-law blow-up: increment ratios settle to a constant
      steady = steady && hi_ratio <= kRatioSpread * lo_ratio;
      const double before = std::abs(out.partials[n - 1 - kGrowthWindow]);
      if (steady && std::abs(partial) >= opts.diverge_growth * before) {
        out.verdict = ProbeVerdict::Divergent;
        out.note = "partial integrals grow without bound as eps -> 0";
        return out;
      }
    }

    if (n >= 4) {
      bool shrinking = true;
      for (std::size_t i = n - 3; i < n; ++i) {
        if (std::abs(increments[i]) > std::abs(increments[i - 1])) shrinking = false;
      }
      if (!shrinking) continue;
      const double scale = std::max(1.0, std::abs(partial));
      if (std::abs(inc) <= opts.tol * scale) {
        out.verdict = ProbeVerdict::Convergent;
        out.value = partial;
        return out;
      }
      const auto now = detail::wynn_epsilon(out.partials);
      const auto before = detail::wynn_epsilon(std::span<const double>(out.partials).first(n - 1));
      if (std::abs(now.value - before.value) <= opts.tol * scale && now.error <= std::sqrt(opts.tol) * scale) {
        out.verdict = ProbeVerdict::Convergent;
        out.value = now.value;
        return out;
      }
    }
  }
  out.note = "partial integrals neither settled nor blew up";
  return out;
}

}  // namespace confcalc
