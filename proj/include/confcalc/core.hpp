#pragma once

// Domain types shared by every confcalc module. Nothing here does numerics
// beyond validation and trajectory interpolation.

#include <confcalc/errors.hpp>

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace confcalc {

/// Order of a conformable derivative or integral, alpha in (0, 1].
class Order {
 public:
  explicit Order(double alpha);

  double value() const noexcept { return alpha_; }
  bool is_first_order() const noexcept { return alpha_ == 1.0; }

  friend bool operator==(Order, Order) = default;

 private:
  double alpha_;
};

/// Lower terminal a of the left-sided operators. Any finite real.
class LowerTerminal {
 public:
  explicit LowerTerminal(double a);

  double value() const noexcept { return a_; }

 private:
  double a_;
};

/// A deterministic real -> real map that may be undefined at some points.
///
/// Evaluation returns std::nullopt for points left of domain_start, for
/// points where the wrapped callable reports "undefined", and for any
/// non-finite result. Callers decide whether undefined is an error.
class ScalarFunction {
 public:
  using Fn = std::function<std::optional<double>(double)>;

  ScalarFunction(Fn fn, std::string label,
                 double domain_start = -std::numeric_limits<double>::infinity());

  /// Wraps a plain double(double) callable.
  template <class F>
    requires std::is_invocable_r_v<double, F, double> &&
             (!std::is_same_v<std::invoke_result_t<F, double>, std::optional<double>>)
  static ScalarFunction real(F f, std::string label,
                             double domain_start = -std::numeric_limits<double>::infinity()) {
    return ScalarFunction(
        [f = std::move(f)](double t) -> std::optional<double> { return f(t); },
        std::move(label), domain_start);
  }

  std::optional<double> operator()(double t) const;

  /// Evaluates or throws EvaluationError.
  double at(double t) const;

  double domain_start() const noexcept { return domain_start_; }
  const std::string& label() const noexcept { return label_; }

 private:
  Fn fn_;
  std::string label_;
  double domain_start_;
};

/// c*f + d*g, f*g and f/g as new functions (used by the algebraic-rule checks).
ScalarFunction linear_combination(double c, const ScalarFunction& f, double d,
                                  const ScalarFunction& g);
ScalarFunction product(const ScalarFunction& f, const ScalarFunction& g);
ScalarFunction quotient(const ScalarFunction& f, const ScalarFunction& g);
ScalarFunction constant_function(double c);

enum class Verdict { Exists, LeftRightMismatch, Diverges, Inconclusive };

std::string_view to_string(Verdict v);

struct DerivativeEstimate {
  std::optional<double> value;
  double error_estimate = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<double> left_value;
  std::optional<double> right_value;
  std::string note;

  bool exists() const noexcept { return verdict == Verdict::Exists; }
};

enum class IvpMethod { Regularized, Picard, DirectSingular };

std::string_view to_string(IvpMethod m);

/// Right-hand side F(t, x); std::nullopt (or a non-finite value) means undefined.
using RightSide = std::function<std::optional<double>(double t, double x)>;

/// Conformable initial value problem T^alpha_a x = F(t, x), x(a) = x0 on [a, horizon].
struct IvpSpec {
  LowerTerminal a;
  Order alpha;
  double x0;
  RightSide F;
  double horizon;
  IvpMethod method = IvpMethod::Regularized;
  double tol = 1e-8;

  /// Throws InvalidArgument naming every offending field.
  void validate() const;
};

enum class InterpolationKind { Linear, CubicLocal };

/// Interpolation rule of a Trajectory.
///
/// Interpolation happens in the graded coordinate s = (t - t_0)^grading.
/// grading = alpha makes conformable solutions, which behave like
/// x0 + c (t - a)^alpha near the terminal, smooth in s.
struct Interpolation {
  InterpolationKind kind = InterpolationKind::CubicLocal;
  double grading = 1.0;
};

struct SolverMeta {
  IvpMethod method = IvpMethod::Regularized;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t iterations = 0;
  double achieved_tolerance = 0.0;
};

struct Sample {
  double t;
  double x;
};

class Trajectory {
 public:
  /// Throws InvalidArgument unless t is strictly increasing with >= 2 samples.
  Trajectory(std::vector<Sample> samples, Interpolation interpolation, SolverMeta meta);

  /// Interpolated value; DomainError outside [t_front, t_back].
  double operator()(double t) const;

  std::span<const Sample> samples() const noexcept { return samples_; }
  const Sample& front() const noexcept { return samples_.front(); }
  const Sample& back() const noexcept { return samples_.back(); }
  const Interpolation& interpolation() const noexcept { return interpolation_; }
  const SolverMeta& meta() const noexcept { return meta_; }

  /// n >= 2 uniformly spaced samples on [t_front, t_back], endpoints exact.
  std::vector<Sample> resample(std::size_t n) const;

 private:
  double graded(double t) const;

  std::vector<Sample> samples_;
  std::vector<double> s_;
  Interpolation interpolation_;
  SolverMeta meta_;
};

/// Sup-norm distance of two trajectories on n uniform points of their common span.
double sup_gap(const Trajectory& lhs, const Trajectory& rhs, std::size_t n = 2001);

struct VerificationCase {
  std::string label;
  std::vector<double> points;
  double residual = 0.0;
  std::string note;
};

/// Residual summary of one identity. passed() <=> max_residual() <= tolerance.
class VerificationReport {
 public:
  VerificationReport(std::string identity_name, double tolerance);

  void add_case(VerificationCase c);
  void add_skip(VerificationCase c);

  /// Orders cases by label, then points.
  void canonicalize();

  const std::string& identity_name() const noexcept { return identity_name_; }
  const std::vector<VerificationCase>& cases() const noexcept { return cases_; }
  const std::vector<VerificationCase>& skipped() const noexcept { return skipped_; }
  double tolerance() const noexcept { return tolerance_; }
  double max_residual() const noexcept { return max_residual_; }
  bool passed() const noexcept { return max_residual_ <= tolerance_; }

 private:
  std::string identity_name_;
  double tolerance_;
  double max_residual_ = 0.0;
  std::vector<VerificationCase> cases_;
  std::vector<VerificationCase> skipped_;
};

/// |got - want| / max(1, |want|): absolute near zero, relative for large values.
double scaled_residual(double got, double want) noexcept;

}  // namespace confcalc
