#include <confcalc/deriv.hpp>

#include <confcalc/detail/extrapolation.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace confcalc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Smallest power-law exponent p treated as blow-up when |D(theta)| ~ |theta|^{-p}.
constexpr double kBlowUpExponent = 0.1;
constexpr std::size_t kBlowUpRun = 3;

// Quotients below this multiple of the roundoff level are noise, not blow-up.
constexpr double kNoiseMultiple = 1e3;

std::string format_point(const char* what, double t) {
  std::ostringstream os;
  os.precision(17);
  os << what << " " << t;
  return os.str();
}

double terminal_scale(double t, double a, double alpha) {
  return alpha == 1.0 ? 1.0 : std::pow(t - a, 1.0 - alpha);
}

struct SideResult {
  Verdict verdict = Verdict::Inconclusive;
  double value = 0.0;
  double error = std::numeric_limits<double>::infinity();
  std::vector<double> quotients;
  std::string note;
};

struct Sampler {
  const ScalarFunction& f;
  double t;
  double scale;  // (t - a)^{1 - alpha}
  double ft;
  double theta0;
  const LimitOptions& opts;

  // Difference quotient at signed theta, using the representable step.
  double quotient(double theta) const {
    const double tp = t + theta * scale;
    const double h = tp - t;
    if (h == 0.0) throw EvaluationError(format_point("theta underflows at t =", t));
    auto fp = f(tp);
    if (!fp) throw EvaluationError(f.label() + " undefined at " + format_point("t =", tp));
    return (*fp - ft) / (h / scale);
  }

  double noise_floor(double theta, double q) const {
    const double mag = std::max(std::abs(ft), std::abs(ft + q * theta));
    return kNoiseMultiple * kEps * mag / std::abs(theta);
  }

  std::vector<double> thetas(int sign) const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(opts.max_levels));
    double th = theta0;
    for (int k = 0; k < opts.max_levels; ++k, th *= opts.shrink) out.push_back(sign * th);
    return out;
  }
};

bool blows_up(const std::vector<double>& thetas, const std::vector<double>& q,
              const Sampler& s) {
  const std::size_t n = q.size();
  if (n < kBlowUpRun + 1) return false;
  for (std::size_t i = n - kBlowUpRun - 1; i < n; ++i) {
    if (!(std::abs(q[i]) > s.noise_floor(thetas[i], q[i]))) return false;
  }
  const double min_ratio = std::pow(1.0 / s.opts.shrink, kBlowUpExponent);
  if (detail::sustained_growth(q, min_ratio, kBlowUpRun)) return true;
  // growth past diverge_threshold times the coarsest quotient, still growing
  return std::abs(q[n - 1]) > s.opts.diverge_threshold * std::max(1.0, std::abs(q[0])) &&
         std::abs(q[n - 1]) >= std::abs(q[n - 2]);
}

SideResult estimate_side(const Sampler& s, int sign) {
  SideResult r;
  const auto th = s.thetas(sign);
  r.quotients.reserve(th.size());
  for (double theta : th) r.quotients.push_back(s.quotient(theta));

  if (blows_up(th, r.quotients, s)) {
    r.verdict = Verdict::Diverges;
    r.note = "difference quotients grow like a power of 1/|theta|";
    return r;
  }

  const auto ex = detail::richardson(r.quotients, s.opts.shrink, 1);
  r.value = ex.value;
  r.error = std::max(ex.error, s.noise_floor(th[ex.row], ex.value) / kNoiseMultiple);
  if (std::isfinite(r.value) && r.error <= s.opts.converge_tol * std::max(1.0, std::abs(r.value))) {
    r.verdict = Verdict::Exists;
  } else {
    r.verdict = Verdict::Inconclusive;
    r.note = "one-sided extrapolation did not settle";
  }
  return r;
}

// Largest theta0 <= opts.theta0 whose probe points stay well inside f's domain.
double admissible_theta0(const ScalarFunction& f, double t, double scale, bool left, bool right,
                         const LimitOptions& opts) {
  double theta0 = opts.theta0;
  const double start = f.domain_start();
  if (left && std::isfinite(start)) {
    // keep the left stencil within half the distance to the domain edge
    const double room = 0.5 * (t - start);
    if (!(room > 0.0)) throw EvaluationError(format_point("no room left of t =", t));
    theta0 = std::min(theta0, room / scale);
  }
  for (int tries = 0; tries < 64; ++tries) {
    bool ok = (!right || f(t + theta0 * scale)) && (!left || f(t - theta0 * scale));
    // after hitting an undefined point, back off from the edge that was found
    if (ok) return tries == 0 ? theta0 : theta0 * opts.shrink * opts.shrink;
    theta0 *= opts.shrink;
  }
  throw EvaluationError(f.label() + " undefined in every probed neighbourhood of " +
                        format_point("t =", t));
}

Sampler make_sampler(const ScalarFunction& f, LowerTerminal a, Order alpha, double t, bool left,
                     bool right, const LimitOptions& opts) {
  opts.validate();
  if (!(t > a.value())) {
    throw DomainError(format_point("conformable derivative needs t > a; got t =", t) +
                      format_point(", a =", a.value()));
  }
  const double ft = f.at(t);
  const double scale = terminal_scale(t, a.value(), alpha.value());
  const double theta0 = admissible_theta0(f, t, scale, left, right, opts);
  return Sampler{f, t, scale, ft, theta0, opts};
}

DerivativeEstimate from_side(const SideResult& r, Side side) {
  DerivativeEstimate est;
  est.verdict = r.verdict;
  est.note = r.note;
  if (r.verdict != Verdict::Diverges) {
    est.error_estimate = r.error;
    if (r.verdict == Verdict::Exists) {
      est.value = r.value;
      (side == Side::Left ? est.left_value : est.right_value) = r.value;
    }
  } else {
    est.error_estimate = std::numeric_limits<double>::infinity();
  }
  return est;
}

DerivativeEstimate combine(const SideResult& left, const SideResult& right,
                           const LimitOptions& opts) {
  DerivativeEstimate est;
  if (left.verdict == Verdict::Exists) est.left_value = left.value;
  if (right.verdict == Verdict::Exists) est.right_value = right.value;

  if (left.verdict == Verdict::Diverges || right.verdict == Verdict::Diverges) {
    est.verdict = Verdict::Diverges;
    est.error_estimate = std::numeric_limits<double>::infinity();
    est.note = left.verdict == Verdict::Diverges ? "left side: " + left.note : "right side: " + right.note;
    return est;
  }
  if (left.verdict != Verdict::Exists || right.verdict != Verdict::Exists) {
    est.verdict = Verdict::Inconclusive;
    est.error_estimate = std::max(left.error, right.error);
    est.note = left.verdict != Verdict::Exists ? "left side: " + left.note : "right side: " + right.note;
    return est;
  }
  const double gap = std::abs(left.value - right.value);
  const double scale = std::max({1.0, std::abs(left.value), std::abs(right.value)});
  if (gap > opts.mismatch_tol * scale) {
    est.verdict = Verdict::LeftRightMismatch;
    est.error_estimate = std::max(left.error, right.error);
    est.note = "one-sided limits disagree";
    return est;
  }
  est.verdict = Verdict::Exists;
  est.value = 0.5 * (left.value + right.value);
  est.error_estimate = std::max(left.error, right.error) + 0.5 * gap;
  return est;
}

}  // namespace

void LimitOptions::validate() const {
  if (!(theta0 > 0.0) || !std::isfinite(theta0)) throw InvalidArgument("theta0 must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidArgument("shrink must lie in (0, 1)");
  if (max_levels < 4 || max_levels > 60) throw InvalidArgument("max_levels must lie in [4, 60]");
  if (richardson_order != 1 && richardson_order != 2)
    throw InvalidArgument("richardson_order must be 1 or 2");
  if (!(mismatch_tol > 0.0)) throw InvalidArgument("mismatch_tol must be positive");
  if (!(diverge_threshold > 0.0)) throw InvalidArgument("diverge_threshold must be positive");
  if (!(converge_tol > 0.0)) throw InvalidArgument("converge_tol must be positive");
}

DerivativeEstimate one_sided_derivative(const ScalarFunction& f, LowerTerminal a, Order alpha,
                                        double t, Side side, const LimitOptions& opts) {
  const bool left = side == Side::Left;
  const Sampler s = make_sampler(f, a, alpha, t, left, !left, opts);
  return from_side(estimate_side(s, left ? -1 : 1), side);
}

DerivativeEstimate classify_alpha_differentiability(const ScalarFunction& f, LowerTerminal a,
                                                    Order alpha, double t,
                                                    const LimitOptions& opts) {
  const Sampler s = make_sampler(f, a, alpha, t, true, true, opts);
  return combine(estimate_side(s, -1), estimate_side(s, 1), opts);
}

DerivativeEstimate conformable_derivative(const ScalarFunction& f, LowerTerminal a, Order alpha,
                                          double t, const LimitOptions& opts) {
  const Sampler s = make_sampler(f, a, alpha, t, true, true, opts);
  const SideResult left = estimate_side(s, -1);
  const SideResult right = estimate_side(s, 1);
  DerivativeEstimate est = combine(left, right, opts);
  if (est.verdict != Verdict::Exists || opts.richardson_order == 1) return est;

  // Averaging the two one-sided quotients at equal |theta| gives the central
  // quotient, whose error expansion has even powers only.
  std::vector<double> central(left.quotients.size());
  for (std::size_t k = 0; k < central.size(); ++k)
    central[k] = 0.5 * (left.quotients[k] + right.quotients[k]);
  const auto ex = detail::richardson(central, opts.shrink, 2);
  const auto th = s.thetas(1);
  const double err = std::max(ex.error, s.noise_floor(th[ex.row], ex.value) / kNoiseMultiple);
  if (std::isfinite(ex.value) && err <= est.error_estimate) {
    est.value = ex.value;
    est.error_estimate = err;
  }
  return est;
}

DerivativeEstimate derivative_at_lower_terminal(const ScalarFunction& f, LowerTerminal a,
                                                Order alpha, const LimitOptions& opts) {
  opts.validate();
  std::vector<double> seq;
  std::vector<double> errs;
  seq.reserve(static_cast<std::size_t>(opts.max_levels));
  DerivativeEstimate out;

  double h = opts.theta0;
  for (int k = 0; k < opts.max_levels; ++k, h *= opts.shrink) {
    const double t = a.value() + h;
    if (!(t > a.value())) break;
    DerivativeEstimate inner;
    try {
      inner = conformable_derivative(f, a, alpha, t, opts);
    } catch (const EvaluationError& e) {
      throw EvaluationError(std::string("near the lower terminal: ") + e.what());
    }
    if (!inner.exists()) {
      out.note = format_point("inner estimate not Exists at t =", t) + " (" +
                 std::string(to_string(inner.verdict)) + ")";
      break;
    }
    seq.push_back(*inner.value);
    errs.push_back(inner.error_estimate);
  }

  if (seq.size() < 4) {
    out.verdict = Verdict::Inconclusive;
    out.error_estimate = std::numeric_limits<double>::infinity();
    if (out.note.empty()) out.note = "too few probe points";
    return out;
  }

  const double min_ratio = std::pow(1.0 / opts.shrink, kBlowUpExponent);
  if (detail::sustained_growth(seq, min_ratio, kBlowUpRun)) {
    out.verdict = Verdict::Diverges;
    out.error_estimate = std::numeric_limits<double>::infinity();
    out.note = "T^alpha f(t) grows without bound as t -> a+";
    return out;
  }

  const auto ex = detail::wynn_epsilon(seq);
  const double inner_err = *std::max_element(errs.end() - 3, errs.end());
  const double err = std::max(ex.error, inner_err);
  if (std::isfinite(ex.value) && err <= opts.converge_tol * std::max(1.0, std::abs(ex.value)) &&
      out.note.empty()) {
    out.verdict = Verdict::Exists;
    out.value = ex.value;
    out.right_value = ex.value;
  } else {
    out.verdict = Verdict::Inconclusive;
    if (out.note.empty()) out.note = "limit t -> a+ did not settle";
  }
  out.error_estimate = err;
  return out;
}

double order_transfer(double value, double t0, LowerTerminal a, Order from_order, Order to_order) {
  if (!(t0 > a.value())) throw DomainError(format_point("order transfer needs t0 > a; got t0 =", t0));
  const double exponent = from_order.value() - to_order.value();
  if (exponent == 0.0) return value;
  return std::pow(t0 - a.value(), exponent) * value;
}

}  // namespace confcalc
