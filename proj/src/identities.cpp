#include <confcalc/identities.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <future>
#include <thread>
#include <limits>
#include <sstream>

namespace confcalc {

namespace {

constexpr double kLinearC = 2.0;
constexpr double kLinearD = -3.0;
constexpr double kTinyDenominator = 1e-6;
constexpr double kInnerQuadTol = 1e-13;

struct CaseBatch {
  std::vector<VerificationCase> cases;
  std::vector<VerificationCase> skipped;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string skip_note(std::string_view what, const DerivativeEstimate& e) {
  std::string s = std::string(what) + ": " + std::string(to_string(e.verdict));
  if (!e.note.empty()) s += " (" + e.note + ")";
  return s;
}

// Runs job(i) for i in [0, n) on a few worker threads and merges the batches
// into one report. The first exception thrown by any job is rethrown.
template <class Job>
VerificationReport gather(std::string name, double tolerance, std::size_t n, Job job) {
  std::vector<CaseBatch> batches(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        batches[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> running;
  for (std::size_t w = 0; w < workers; ++w) running.push_back(std::async(std::launch::async, worker));
  for (auto& r : running) r.get();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  VerificationReport report(std::move(name), tolerance);
  for (auto& b : batches) {
    for (auto& c : b.cases) report.add_case(std::move(c));
    for (auto& c : b.skipped) report.add_skip(std::move(c));
  }
  report.canonicalize();
  return report;
}

void check_points(LowerTerminal a, std::span<const double> points) {
  for (double t : points)
    if (!(t > a.value()) || !std::isfinite(t))
      throw InvalidArgument("verification points must lie in (a, inf), got " + fmt(t));
}

// T^alpha f built from the analytic derivative, or from the estimator when none is known.
ScalarFunction conformable_of(const CatalogEntry& e, LowerTerminal a, Order alpha,
                              const LimitOptions& limit) {
  const double av = a.value();
  const double al = alpha.value();
  const std::string label = "T^" + fmt(al) + "[" + e.f.label() + "]";
  if (e.f_prime) {
    const ScalarFunction df = *e.f_prime;
    return ScalarFunction(
        [df, av, al](double s) -> std::optional<double> {
          const auto d = df(s);
          if (!d) return std::nullopt;
          return (al == 1.0 ? 1.0 : std::pow(s - av, 1.0 - al)) * *d;
        },
        label, av);
  }
  const ScalarFunction f = e.f;
  return ScalarFunction(
      [f, a, alpha, limit](double s) -> std::optional<double> {
        if (!(s > a.value())) return std::nullopt;
        const auto est = conformable_derivative(f, a, alpha, s, limit);
        if (!est.exists()) return std::nullopt;
        return est.value;
      },
      label, av);
}

}  // namespace

std::vector<VerificationReport> verify_algebraic_rules(const Catalog& catalog, LowerTerminal a,
                                                       Order alpha, std::span<const double> points,
                                                       const VerifyOptions& opts) {
  check_points(a, points);
  opts.limit.validate();
  const double tol = opts.tolerance.value_or(kDefaultTolerance);
  const auto entries = catalog.entries();
  const std::vector<double> pts(points.begin(), points.end());
  auto estimate = [&](const ScalarFunction& f, double t) {
    return conformable_derivative(f, a, alpha, t, opts.limit);
  };

  std::vector<VerificationReport> out;
  const std::vector<double> constants{-1.5, 0.0, 3.0};
  out.push_back(gather("constant_rule", tol, constants.size(), [&](std::size_t i) {
    CaseBatch b;
    const auto c = constant_function(constants[i]);
    for (double t : pts) {
      const auto e = estimate(c, t);
      VerificationCase vc{c.label(), {t}, 0.0, {}};
      if (!e.exists()) {
        vc.note = skip_note("T(c)", e);
        b.skipped.push_back(std::move(vc));
        continue;
      }
      vc.residual = std::abs(*e.value);
      b.cases.push_back(std::move(vc));
    }
    return b;
  }));

  const std::size_t n = entries.size();
  enum Rule { Linear, Product, Quotient };
  auto pair_rule = [&](Rule rule) {
    return [&, rule](std::size_t k) {
      CaseBatch b;
      const ScalarFunction& f = entries[k / n].f;
      const ScalarFunction& g = entries[k % n].f;
      const std::string label = "f=" + f.label() + ", g=" + g.label();
      for (double t : pts) {
        VerificationCase vc{label, {t}, 0.0, {}};
        const auto fv = f(t);
        const auto gv = g(t);
        if (!fv || !gv) {
          vc.note = "f or g undefined";
          b.skipped.push_back(std::move(vc));
          continue;
        }
        if (rule == Quotient && std::abs(*gv) < kTinyDenominator) {
          vc.note = "g(t) is nearly zero";
          b.skipped.push_back(std::move(vc));
          continue;
        }
        const ScalarFunction combined = rule == Linear    ? linear_combination(kLinearC, f, kLinearD, g)
                                        : rule == Product ? product(f, g)
                                                          : quotient(f, g);
        const auto tf = estimate(f, t);
        const auto tg = estimate(g, t);
        const auto th = estimate(combined, t);
        const DerivativeEstimate* bad = !tf.exists() ? &tf : !tg.exists() ? &tg : !th.exists() ? &th : nullptr;
        if (bad) {
          vc.note = skip_note(bad == &tf ? "T(f)" : bad == &tg ? "T(g)" : "T(combined)", *bad);
          b.skipped.push_back(std::move(vc));
          continue;
        }
        double want = 0.0;
        switch (rule) {
          case Linear: want = kLinearC * *tf.value + kLinearD * *tg.value; break;
          case Product: want = *gv * *tf.value + *fv * *tg.value; break;
          case Quotient: want = (*gv * *tf.value - *fv * *tg.value) / (*gv * *gv); break;
        }
        vc.residual = scaled_residual(*th.value, want);
        b.cases.push_back(std::move(vc));
      }
      return b;
    };
  };
  out.push_back(gather("linearity", tol, n * n, pair_rule(Linear)));
  out.push_back(gather("product_rule", tol, n * n, pair_rule(Product)));
  out.push_back(gather("quotient_rule", tol, n * n, pair_rule(Quotient)));
  return out;
}

VerificationReport verify_order_change(const Catalog& catalog, LowerTerminal a, Order alpha,
                                       Order beta, std::span<const double> points,
                                       const VerifyOptions& opts) {
  check_points(a, points);
  opts.limit.validate();
  const auto entries = catalog.entries();
  const std::vector<double> pts(points.begin(), points.end());
  return gather("order_change", opts.tolerance.value_or(kDefaultTolerance), entries.size(),
                [&](std::size_t i) {
                  CaseBatch b;
                  const ScalarFunction& f = entries[i].f;
                  for (double t0 : pts) {
                    VerificationCase vc{f.label(), {t0}, 0.0, {}};
                    const auto ta = conformable_derivative(f, a, alpha, t0, opts.limit);
                    const auto tb = conformable_derivative(f, a, beta, t0, opts.limit);
                    if (!ta.exists() || !tb.exists()) {
                      vc.note = skip_note(!ta.exists() ? "T^alpha" : "T^beta", !ta.exists() ? ta : tb);
                      b.skipped.push_back(std::move(vc));
                      continue;
                    }
                    const double want = order_transfer(*ta.value, t0, a, alpha, beta);
                    vc.residual = scaled_residual(*tb.value, want);
                    vc.note = "alpha=" + fmt(alpha.value()) + " beta=" + fmt(beta.value());
                    b.cases.push_back(std::move(vc));
                  }
                  return b;
                });
}

VerificationReport verify_left_inverse(const Catalog& catalog, LowerTerminal a, Order alpha,
                                       std::span<const double> points, const VerifyOptions& opts) {
  check_points(a, points);
  opts.limit.validate();
  opts.quad.validate();
  const auto entries = catalog.entries();
  const std::vector<double> pts(points.begin(), points.end());
  return gather("left_inverse", opts.tolerance.value_or(kDefaultTolerance), entries.size(),
                [&](std::size_t i) {
                  CaseBatch b;
                  const CatalogEntry& e = entries[i];
                  const ScalarFunction tf = conformable_of(e, a, alpha, opts.limit);
                  for (double t : pts) {
                    const double got = conformable_integral(tf, a, alpha, t, opts.quad);
                    const double want = e.f.at(t) - e.f.at(a.value());
                    b.cases.push_back({e.f.label(), {t}, scaled_residual(got, want),
                                       e.f_prime ? "analytic derivative" : "estimated derivative"});
                  }
                  return b;
                });
}

VerificationReport verify_right_inverse(const Catalog& catalog, LowerTerminal a, Order alpha,
                                        std::span<const double> points,
                                        const VerifyOptions& opts) {
  check_points(a, points);
  opts.limit.validate();
  opts.quad.validate();
  const auto entries = catalog.entries();
  const std::vector<double> pts(points.begin(), points.end());
  QuadOptions inner = opts.quad;
  inner.tol = std::min(inner.tol, kInnerQuadTol);
  return gather(
      "right_inverse", opts.tolerance.value_or(kChainedTolerance), entries.size(),
      [&](std::size_t i) {
        CaseBatch b;
        const CatalogEntry& e = entries[i];
        for (double t : pts) {
          VerificationCase vc{e.f.label(), {t}, 0.0, {}};
          if (!e.locally_bounded_at_a) {
            vc.note = "not locally bounded at a";
            b.skipped.push_back(std::move(vc));
            continue;
          }
          // I(u) = I(t) + int_t^u, so nearby values differ by an accurately computed piece
          const double base = conformable_integral(e.f, a, alpha, t, inner);
          const ScalarFunction integral(
              [&e, a, alpha, inner, t, base](double u) -> std::optional<double> {
                if (!(u > a.value())) return std::nullopt;
                if (u >= t) return base + conformable_integral_between(e.f, a, alpha, t, u, inner);
                return base - conformable_integral_between(e.f, a, alpha, u, t, inner);
              },
              "I[" + e.f.label() + "]", a.value());
          const auto est = conformable_derivative(integral, a, alpha, t, opts.limit);
          if (!est.exists()) {
            vc.note = skip_note("T(I f)", est);
            b.skipped.push_back(std::move(vc));
            continue;
          }
          vc.residual = scaled_residual(*est.value, e.f.at(t));
          b.cases.push_back(std::move(vc));
        }
        return b;
      });
}

VerificationReport verify_lower_terminal_vanishing(const Catalog& catalog, LowerTerminal a,
                                                   std::span<const double> alpha_list,
                                                   const VerifyOptions& opts) {
  opts.limit.validate();
  const auto entries = catalog.entries();
  std::vector<Order> orders;
  for (double al : alpha_list) orders.emplace_back(al);
  return gather(
      "lower_terminal_vanishing", opts.tolerance.value_or(kDefaultTolerance), entries.size(),
      [&](std::size_t i) {
        CaseBatch b;
        const CatalogEntry& e = entries[i];
        for (Order al : orders) {
          VerificationCase vc{e.f.label(), {al.value()}, 0.0, "alpha=" + fmt(al.value())};
          if (al.is_first_order()) {
            vc.note += ": first order, nothing to vanish";
            b.skipped.push_back(std::move(vc));
            continue;
          }
          if (!e.bounded_derivative_near_a) {
            vc.note += ": derivative unbounded near a";
            b.skipped.push_back(std::move(vc));
            continue;
          }
          const auto est = derivative_at_lower_terminal(e.f, a, al, opts.limit);
          if (est.exists()) {
            vc.residual = std::abs(*est.value);
          } else {
            vc.residual = std::numeric_limits<double>::infinity();
            vc.note = skip_note(vc.note, est);
          }
          b.cases.push_back(std::move(vc));
        }
        return b;
      });
}

VerificationReport counterexample_check(double alpha, double beta, LowerTerminal a, double t,
                                        const VerifyOptions& opts) {
  if (!(0.0 < alpha && alpha < beta && beta < 1.0))
    throw PreconditionError("counterexample needs 0 < alpha < beta < 1, got alpha = " +
                            fmt(alpha) + ", beta = " + fmt(beta));
  if (!(t > a.value())) throw InvalidArgument("counterexample needs t > a");
  const double av = a.value();
  // T^alpha of alpha^{-1} (t - a)^{alpha - beta}
  const ScalarFunction derivative = ScalarFunction::real(
      [=](double s) { return (alpha - beta) / alpha * std::pow(s - av, -beta); },
      "T^" + fmt(alpha) + "[" + fmt(1 / alpha) + "*(t-" + fmt(av) + ")^" + fmt(alpha - beta) + "]",
      av);
  const ProbeResult probe = divergence_probe(derivative, a, Order(alpha), t, opts.quad);
  VerificationReport report("counterexample", opts.tolerance.value_or(kDefaultTolerance));
  const bool divergent = probe.verdict == ProbeVerdict::Divergent;
  report.add_case({derivative.label(), {alpha, beta, t},
                   divergent ? 0.0 : std::numeric_limits<double>::infinity(),
                   "probe verdict " + std::string(to_string(probe.verdict)) +
                       (probe.note.empty() ? "" : ": " + probe.note)});
  return report;
}

}  // namespace confcalc
