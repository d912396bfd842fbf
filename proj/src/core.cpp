#include <confcalc/core.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace confcalc {

Order::Order(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream msg;
    msg << "order must lie in (0, 1], got " << alpha;
    throw InvalidArgument(msg.str());
  }
}

LowerTerminal::LowerTerminal(double a) : a_(a) {
  if (!std::isfinite(a)) throw InvalidArgument("lower terminal must be finite");
}

ScalarFunction::ScalarFunction(Fn fn, std::string label, double domain_start)
    : fn_(std::move(fn)), label_(std::move(label)), domain_start_(domain_start) {
  if (!fn_) throw InvalidArgument("ScalarFunction needs a callable");
}

std::optional<double> ScalarFunction::operator()(double t) const {
  if (!(t >= domain_start_)) return std::nullopt;
  auto v = fn_(t);
  if (!v || !std::isfinite(*v)) return std::nullopt;
  return v;
}

double ScalarFunction::at(double t) const {
  if (auto v = (*this)(t)) return *v;
  std::ostringstream msg;
  msg.precision(17);
  msg << label_ << " is undefined at t = " << t;
  throw EvaluationError(msg.str());
}

ScalarFunction linear_combination(double c, const ScalarFunction& f, double d,
                                  const ScalarFunction& g) {
  std::ostringstream label;
  label << c << "*(" << f.label() << ")+" << d << "*(" << g.label() << ")";
  return ScalarFunction(
      [=](double t) -> std::optional<double> {
        auto fv = f(t);
        auto gv = g(t);
        if (!fv || !gv) return std::nullopt;
        return c * *fv + d * *gv;
      },
      label.str(), std::max(f.domain_start(), g.domain_start()));
}

ScalarFunction product(const ScalarFunction& f, const ScalarFunction& g) {
  return ScalarFunction(
      [=](double t) -> std::optional<double> {
        auto fv = f(t);
        auto gv = g(t);
        if (!fv || !gv) return std::nullopt;
        return *fv * *gv;
      },
      "(" + f.label() + ")*(" + g.label() + ")", std::max(f.domain_start(), g.domain_start()));
}

ScalarFunction quotient(const ScalarFunction& f, const ScalarFunction& g) {
  return ScalarFunction(
      [=](double t) -> std::optional<double> {
        auto fv = f(t);
        auto gv = g(t);
        if (!fv || !gv || *gv == 0.0) return std::nullopt;
        return *fv / *gv;
      },
      "(" + f.label() + ")/(" + g.label() + ")", std::max(f.domain_start(), g.domain_start()));
}

ScalarFunction constant_function(double c) {
  std::ostringstream label;
  label.precision(17);
  label << c;
  return ScalarFunction::real([c](double) { return c; }, label.str());
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Exists: return "Exists";
    case Verdict::LeftRightMismatch: return "LeftRightMismatch";
    case Verdict::Diverges: return "Diverges";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string_view to_string(IvpMethod m) {
  switch (m) {
    case IvpMethod::Regularized: return "regularized";
    case IvpMethod::Picard: return "picard";
    case IvpMethod::DirectSingular: return "direct";
  }
  return "regularized";
}

void IvpSpec::validate() const {
  std::vector<std::string> bad;
  if (!std::isfinite(x0)) bad.emplace_back("x0: must be finite");
  if (!F) bad.emplace_back("F: missing right-hand side");
  if (!std::isfinite(horizon) || !(horizon > a.value())) bad.emplace_back("T: must exceed a");
  if (!(tol > 0.0) || !std::isfinite(tol)) bad.emplace_back("tol: must be positive");
  if (bad.empty()) return;
  std::string msg = "invalid IVP spec:";
  for (const auto& b : bad) msg += "\n  " + b;
  throw InvalidArgument(msg);
}

Trajectory::Trajectory(std::vector<Sample> samples, Interpolation interpolation, SolverMeta meta)
    : samples_(std::move(samples)), interpolation_(interpolation), meta_(meta) {
  if (samples_.size() < 2) throw InvalidArgument("trajectory needs at least two samples");
  if (!(interpolation_.grading > 0.0 && interpolation_.grading <= 1.0))
    throw InvalidArgument("interpolation grading must lie in (0, 1]");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].t) || !std::isfinite(samples_[i].x))
      throw InvalidArgument("trajectory samples must be finite");
    if (i > 0 && !(samples_[i].t > samples_[i - 1].t))
      throw InvalidArgument("trajectory t values must be strictly increasing");
  }
  s_.reserve(samples_.size());
  for (const auto& p : samples_) s_.push_back(graded(p.t));
  for (std::size_t i = 1; i < s_.size(); ++i) {
    if (!(s_[i] > s_[i - 1]))
      throw InvalidArgument("trajectory samples collapse in the graded coordinate");
  }
}

double Trajectory::graded(double t) const {
  double d = t - samples_.front().t;
  if (interpolation_.grading == 1.0) return d;
  return d <= 0.0 ? 0.0 : std::pow(d, interpolation_.grading);
}

double Trajectory::operator()(double t) const {
  if (!(t >= samples_.front().t && t <= samples_.back().t)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "t = " << t << " outside trajectory span [" << samples_.front().t << ", "
        << samples_.back().t << "]";
    throw DomainError(msg.str());
  }
  if (t == samples_.back().t) return samples_.back().x;
  const double s = graded(t);
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - s_.begin() - 1, 0));
  i = std::min(i, s_.size() - 2);

  if (interpolation_.kind == InterpolationKind::Linear || s_.size() < 4) {
    double w = (s - s_[i]) / (s_[i + 1] - s_[i]);
    return samples_[i].x + w * (samples_[i + 1].x - samples_[i].x);
  }

  // four-point Lagrange stencil around [s_i, s_{i+1}], clamped at the ends.
  // Differences from the first node keep constant data exact.
  std::size_t lo = i == 0 ? 0 : i - 1;
  lo = std::min(lo, s_.size() - 4);
  const double anchor = samples_[lo].x;
  double result = 0.0;
  for (std::size_t j = lo + 1; j < lo + 4; ++j) {
    double basis = 1.0;
    for (std::size_t k = lo; k < lo + 4; ++k) {
      if (k != j) basis *= (s - s_[k]) / (s_[j] - s_[k]);
    }
    result += basis * (samples_[j].x - anchor);
  }
  return anchor + result;
}

std::vector<Sample> Trajectory::resample(std::size_t n) const {
  if (n < 2) throw InvalidArgument("resample needs at least two points");
  std::vector<Sample> out;
  out.reserve(n);
  const double t0 = samples_.front().t;
  const double t1 = samples_.back().t;
  for (std::size_t i = 0; i < n; ++i) {
    double t = i + 1 == n ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back({t, (*this)(t)});
  }
  out.front().x = samples_.front().x;
  return out;
}

double sup_gap(const Trajectory& lhs, const Trajectory& rhs, std::size_t n) {
  const double t0 = std::max(lhs.front().t, rhs.front().t);
  const double t1 = std::min(lhs.back().t, rhs.back().t);
  if (!(t1 >= t0)) throw DomainError("trajectories do not overlap");
  double gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double t = i + 1 == n ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    gap = std::max(gap, std::abs(lhs(t) - rhs(t)));
  }
  return gap;
}

VerificationReport::VerificationReport(std::string identity_name, double tolerance)
    : identity_name_(std::move(identity_name)), tolerance_(tolerance) {}

void VerificationReport::add_case(VerificationCase c) {
  // NaN residuals count as failures
  double r = std::isnan(c.residual) ? std::numeric_limits<double>::infinity() : c.residual;
  max_residual_ = std::max(max_residual_, r);
  cases_.push_back(std::move(c));
}

void VerificationReport::add_skip(VerificationCase c) { skipped_.push_back(std::move(c)); }

void VerificationReport::canonicalize() {
  auto order = [](const VerificationCase& l, const VerificationCase& r) {
    if (l.label != r.label) return l.label < r.label;
    return l.points < r.points;
  };
  std::stable_sort(cases_.begin(), cases_.end(), order);
  std::stable_sort(skipped_.begin(), skipped_.end(), order);
}

double scaled_residual(double got, double want) noexcept {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace confcalc
