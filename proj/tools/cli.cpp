#include "cli.hpp"

#include <confcalc/deriv.hpp>
#include <confcalc/exprparse.hpp>
#include <confcalc/identities.hpp>
#include <confcalc/integ.hpp>
#include <confcalc/ivp.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace confcalc::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kDefaultSolveTol = 1e-8;
constexpr std::size_t kDefaultSamples = 101;
constexpr std::size_t kPicardGrid = 256;

// Bad input detected after argument parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::optional<double> env_tolerance() {
  const char* raw = std::getenv("CONFCALC_TOL");
  if (!raw || !*raw) return std::nullopt;
  const std::string s(raw);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !(v > 0.0) || !std::isfinite(v))
    throw UsageError("CONFCALC_TOL must be a positive number, got '" + s + "'");
  return v;
}

std::string csv_number(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

json optional_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

expr::ExprPtr parse_expression(const std::string& text) {
  return expr::parse(text);
}

// deriv ---------------------------------------------------------------------

struct DerivArgs {
  std::string expr;
  double a = 0.0;
  double alpha = 1.0;
  std::optional<double> t;
  std::string side;
  bool at_terminal = false;
};

int cmd_deriv(const DerivArgs& args, std::ostream& out) {
  const ScalarFunction f = expr::to_function(parse_expression(args.expr), args.expr);
  const LowerTerminal a(args.a);
  const Order alpha(args.alpha);
  LimitOptions opts;
  if (auto tol = env_tolerance()) opts.converge_tol = *tol;

  DerivativeEstimate est;
  json j;
  j["expr"] = args.expr;
  j["a"] = args.a;
  j["alpha"] = args.alpha;
  if (args.at_terminal) {
    if (!args.side.empty()) throw UsageError("--side cannot be combined with --at-terminal");
    j["t"] = args.a;
    est = derivative_at_lower_terminal(f, a, alpha, opts);
  } else {
    if (!args.t) throw UsageError("--t is required unless --at-terminal is given");
    j["t"] = *args.t;
    if (args.side.empty()) {
      est = conformable_derivative(f, a, alpha, *args.t, opts);
    } else {
      est = one_sided_derivative(f, a, alpha, *args.t, args.side == "left" ? Side::Left : Side::Right, opts);
    }
  }
  if (!args.side.empty()) j["side"] = args.side;
  j["value"] = optional_number(est.value);
  j["error_estimate"] = finite_or_null(est.error_estimate);
  j["verdict"] = std::string(to_string(est.verdict));
  j["left_value"] = optional_number(est.left_value);
  j["right_value"] = optional_number(est.right_value);
  j["note"] = est.note;
  out << j.dump() << '\n';
  return est.exists() ? kOk : kNonexistence;
}

// integ ---------------------------------------------------------------------

struct IntegArgs {
  std::string expr;
  double a = 0.0;
  double alpha = 1.0;
  double t = 0.0;
  bool probe = false;
};

int cmd_integ(const IntegArgs& args, std::ostream& out) {
  const ScalarFunction f = expr::to_function(parse_expression(args.expr), args.expr);
  const LowerTerminal a(args.a);
  const Order alpha(args.alpha);
  QuadOptions opts;
  if (auto tol = env_tolerance()) opts.tol = *tol;

  json j;
  j["expr"] = args.expr;
  j["a"] = args.a;
  j["alpha"] = args.alpha;
  j["t"] = args.t;
  if (args.probe) {
    const ProbeResult r = divergence_probe(f, a, alpha, args.t, opts);
    j["verdict"] = std::string(to_string(r.verdict));
    j["value"] = optional_number(r.value);
    j["levels"] = r.partials.size();
    j["note"] = r.note;
    out << j.dump() << '\n';
    return r.verdict == ProbeVerdict::Convergent ? kOk : kNonexistence;
  }
  try {
    j["value"] = conformable_integral(f, a, alpha, args.t, opts);
    j["verdict"] = "Convergent";
  } catch (const DivergenceError& e) {
    j["value"] = nullptr;
    j["verdict"] = "Divergent";
    j["note"] = e.what();
    out << j.dump() << '\n';
    return kNonexistence;
  } catch (const QuadratureError& e) {
    j["value"] = nullptr;
    j["verdict"] = "Inconclusive";
    j["note"] = e.what();
    out << j.dump() << '\n';
    return kNonexistence;
  }
  out << j.dump() << '\n';
  return kOk;
}

// solve ---------------------------------------------------------------------

struct SolveArgs {
  std::string spec_path;
  std::string out_path;
  bool compare = false;
};

struct LoadedSpec {
  IvpSpec spec;
  std::size_t samples;
  std::string F_text;
};

std::optional<IvpMethod> method_from(const std::string& s) {
  if (s == "regularized") return IvpMethod::Regularized;
  if (s == "picard") return IvpMethod::Picard;
  if (s == "direct") return IvpMethod::DirectSingular;
  return std::nullopt;
}

LoadedSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open spec file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("spec file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("spec file must hold a JSON object");

  std::vector<std::string> problems;
  static const std::vector<std::string> known{"a", "alpha", "x0", "F", "T", "method", "tol", "samples"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      problems.push_back(key + ": unknown field");

  auto number = [&](const char* key, bool required) -> std::optional<double> {
    if (!j.contains(key)) {
      if (required) problems.push_back(std::string(key) + ": missing");
      return std::nullopt;
    }
    const auto& v = j[key];
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      problems.push_back(std::string(key) + ": must be a finite number");
      return std::nullopt;
    }
    return v.get<double>();
  };
  const auto a = number("a", true);
  const auto alpha = number("alpha", true);
  const auto x0 = number("x0", true);
  const auto T = number("T", true);
  const auto tol = number("tol", false);
  if (alpha && !(*alpha > 0.0 && *alpha <= 1.0)) problems.push_back("alpha: must lie in (0, 1]");
  if (a && T && !(*T > *a)) problems.push_back("T: must exceed a");
  if (tol && !(*tol > 0.0)) problems.push_back("tol: must be positive");

  std::size_t samples = kDefaultSamples;
  if (j.contains("samples")) {
    const auto& v = j["samples"];
    if (!v.is_number_integer() || v.get<long long>() < 2)
      problems.push_back("samples: must be an integer >= 2");
    else
      samples = static_cast<std::size_t>(v.get<long long>());
  }

  IvpMethod method = IvpMethod::Regularized;
  if (j.contains("method")) {
    const auto& v = j["method"];
    const auto m = v.is_string() ? method_from(v.get<std::string>()) : std::nullopt;
    if (!m)
      problems.push_back("method: must be one of regularized, picard, direct");
    else
      method = *m;
  }

  RightSide F;
  std::string F_text;
  if (!j.contains("F")) {
    problems.push_back("F: missing");
  } else if (!j["F"].is_string()) {
    problems.push_back("F: must be an expression string");
  } else {
    F_text = j["F"].get<std::string>();
    try {
      F = expr::to_right_side(expr::parse(F_text));
    } catch (const expr::SyntaxError& e) {
      problems.push_back(std::string("F: ") + e.what());
    }
  }

  if (!problems.empty()) {
    std::string msg = "invalid spec '" + path + "':";
    for (const auto& p : problems) msg += "\n  " + p;
    throw UsageError(msg);
  }
  double use_tol = kDefaultSolveTol;
  if (tol) {
    use_tol = *tol;
  } else if (auto env = env_tolerance()) {
    use_tol = *env;
  }
  IvpSpec spec{LowerTerminal(*a), Order(*alpha), *x0, F, *T, method, use_tol};
  spec.validate();
  return {spec, samples, F_text};
}

Trajectory run_method(IvpSpec spec, IvpMethod m) {
  spec.method = m;
  switch (m) {
    case IvpMethod::Regularized: return solve_regularized(spec);
    case IvpMethod::Picard: return solve_picard(spec, kPicardGrid);
    case IvpMethod::DirectSingular: return solve_direct_singular(spec);
  }
  throw InvalidArgument("unknown method");
}

void write_csv(std::ostream& os, const std::vector<Sample>& rows) {
  os << "t,x\n";
  for (const auto& r : rows) os << csv_number(r.t) << ',' << csv_number(r.x) << '\n';
}

json meta_json(const Trajectory& traj) {
  const SolverMeta& m = traj.meta();
  json j;
  j["method"] = std::string(to_string(m.method));
  j["x_T"] = traj.back().x;
  j["steps"] = m.steps;
  j["rejected_steps"] = m.rejected_steps;
  j["iterations"] = m.iterations;
  j["achieved_tolerance"] = finite_or_null(m.achieved_tolerance);
  return j;
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  if (args.compare && args.out_path.empty())
    throw UsageError("--compare needs --out so the CSV and the gap report stay separate");
  const LoadedSpec loaded = load_spec(args.spec_path);
  const IvpSpec& spec = loaded.spec;

  std::optional<Trajectory> primary;
  try {
    primary = run_method(spec, spec.method);
  } catch (const NonConvergence& e) {
    err << "warning: " << e.what() << "; CSV withheld, reporting the regularized solution instead\n";
    json j;
    j["status"] = "nonconvergence";
    j["method"] = std::string(to_string(spec.method));
    j["last_change"] = finite_or_null(e.last_change());
    try {
      j["fallback"] = meta_json(run_method(spec, IvpMethod::Regularized));
    } catch (const Error& fe) {
      j["fallback"] = nullptr;
      err << "regularized fallback failed too: " << fe.what() << '\n';
    }
    out << j.dump() << '\n';
    return kNonConvergence;
  }

  json report = meta_json(*primary);
  if (args.compare) {
    std::vector<std::pair<IvpMethod, Trajectory>> all;
    for (IvpMethod m : {IvpMethod::Regularized, IvpMethod::Picard, IvpMethod::DirectSingular}) {
      if (m == spec.method) {
        all.emplace_back(m, *primary);
        continue;
      }
      try {
        all.emplace_back(m, run_method(spec, m));
      } catch (const NonConvergence& e) {
        err << "error: " << to_string(m) << " did not converge: " << e.what() << '\n';
        json j;
        j["status"] = "nonconvergence";
        j["method"] = std::string(to_string(m));
        j["last_change"] = finite_or_null(e.last_change());
        out << j.dump() << '\n';
        return kNonConvergence;
      }
    }
    json gaps = json::object();
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t k = i + 1; k < all.size(); ++k)
        gaps[std::string(to_string(all[i].first)) + "-" + std::string(to_string(all[k].first))] =
            sup_gap(all[i].second, all[k].second);
    report["gaps"] = gaps;
  }

  const auto rows = primary->resample(loaded.samples);
  if (args.out_path.empty()) {
    write_csv(out, rows);
    return kOk;
  }
  std::ofstream csv(args.out_path);
  if (!csv) throw UsageError("cannot write '" + args.out_path + "'");
  write_csv(csv, rows);
  csv.close();
  if (!csv) throw UsageError("failed writing '" + args.out_path + "'");
  report["samples"] = rows.size();
  report["out"] = args.out_path;
  out << report.dump() << '\n';
  return kOk;
}

// verify --------------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all";
  std::string out_path;
  std::optional<double> tol;
  double a = 0.0;
  double alpha = 0.5;
  double beta = 0.75;
};

json case_json(const VerificationCase& c) {
  json j;
  j["label"] = c.label;
  j["points"] = c.points;
  j["residual"] = finite_or_null(c.residual);
  j["note"] = c.note;
  return j;
}

json report_json(const VerificationReport& r, json parameters) {
  json j;
  j["identity"] = r.identity_name();
  j["parameters"] = std::move(parameters);
  j["tolerance"] = r.tolerance();
  j["passed"] = r.passed();
  j["max_residual"] = finite_or_null(r.max_residual());
  j["cases"] = json::array();
  for (const auto& c : r.cases()) j["cases"].push_back(case_json(c));
  j["skipped"] = json::array();
  for (const auto& c : r.skipped()) j["skipped"].push_back(case_json(c));
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"all", "algebra", "order-change", "inverses",
                                              "lower-terminal", "counterexample"};
  return names;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
  VerifyOptions opts;
  if (args.tol) {
    if (!(*args.tol > 0.0)) throw UsageError("--tol must be positive");
    opts.tolerance = args.tol;
  } else if (auto env = env_tolerance()) {
    opts.tolerance = env;
  }
  const LowerTerminal a(args.a);
  const Order alpha(args.alpha);
  const Catalog catalog = default_catalog(args.a);
  const Catalog smooth = catalog.smooth_only();
  const auto points = default_points(args.a);
  const std::vector<double> orders{0.25, 0.5, 0.75, 1.0};
  const bool all = args.suite == "all";

  json reports = json::array();
  bool passed = true;
  auto add = [&](const VerificationReport& r, json params) {
    passed = passed && r.passed();
    reports.push_back(report_json(r, std::move(params)));
  };
  auto with_alpha = [&] { return json{{"a", args.a}, {"alpha", args.alpha}}; };

  if (all || args.suite == "algebra") {
    for (const auto& r : verify_algebraic_rules(smooth, a, alpha, points, opts)) add(r, with_alpha());
  }
  if (all || args.suite == "order-change") {
    for (double x : orders)
      for (double y : orders)
        add(verify_order_change(smooth, a, Order(x), Order(y), points, opts),
            json{{"a", args.a}, {"alpha", x}, {"beta", y}});
  }
  if (all || args.suite == "inverses") {
    add(verify_left_inverse(catalog.locally_bounded(), a, alpha, points, opts), with_alpha());
    add(verify_right_inverse(catalog, a, alpha, points, opts), with_alpha());
  }
  if (all || args.suite == "lower-terminal") {
    const std::vector<double> fractional{0.25, 0.5, 0.75};
    add(verify_lower_terminal_vanishing(catalog, a, fractional, opts),
        json{{"a", args.a}, {"alphas", fractional}});
  }
  if (all || args.suite == "counterexample") {
    add(counterexample_check(args.alpha, args.beta, a, args.a + 1.0, opts),
        json{{"a", args.a}, {"alpha", args.alpha}, {"beta", args.beta}, {"t", args.a + 1.0}});
  }

  if (args.out_path.empty()) {
    out << reports.dump(2) << '\n';
  } else {
    std::ofstream file(args.out_path);
    if (!file) throw UsageError("cannot write '" + args.out_path + "'");
    file << reports.dump(2) << '\n';
    file.close();
    if (!file) throw UsageError("failed writing '" + args.out_path + "'");
    json summary;
    summary["suite"] = args.suite;
    summary["reports"] = reports.size();
    summary["passed"] = passed;
    summary["out"] = args.out_path;
    out << summary.dump() << '\n';
  }
  return passed ? kOk : kNonexistence;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformable derivatives, integrals and initial value problems", "confcalc"};
  app.require_subcommand(1, 1);

  DerivArgs da;
  auto* deriv = app.add_subcommand("deriv", "conformable derivative T^alpha_a f(t)");
  deriv->add_option("--expr", da.expr, "f as an expression in t")->required();
  deriv->add_option("--a", da.a, "lower terminal")->required();
  deriv->add_option("--alpha", da.alpha, "order in (0, 1]")->required();
  deriv->add_option("--t", da.t, "evaluation point, t > a");
  deriv->add_option("--side", da.side, "one-sided limit")->check(CLI::IsMember({"left", "right"}));
  deriv->add_flag("--at-terminal", da.at_terminal, "limit t -> a+ instead of a point value");

  IntegArgs ia;
  auto* integ = app.add_subcommand("integ", "conformable integral I^alpha_a f(t)");
  integ->add_option("--expr", ia.expr, "f as an expression in t")->required();
  integ->add_option("--a", ia.a, "lower terminal")->required();
  integ->add_option("--alpha", ia.alpha, "order in (0, 1]")->required();
  integ->add_option("--t", ia.t, "upper limit, t >= a")->required();
  integ->add_flag("--probe", ia.probe, "classify convergence at the lower terminal");

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "solve T^alpha_a x = F(t, x) from a JSON spec");
  solve_cmd->add_option("spec", sa.spec_path, "JSON spec file")->required();
  solve_cmd->add_option("--out", sa.out_path, "CSV output path (stdout when omitted)");
  solve_cmd->add_flag("--compare", sa.compare, "run all three methods and report pairwise gaps");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "check the calculus identities over the test catalog");
  verify->add_option("--suite", va.suite, "which identities")->check(CLI::IsMember(suite_names()));
  verify->add_option("--out", va.out_path, "JSON report path (stdout when omitted)");
  verify->add_option("--tol", va.tol, "report tolerance");
  verify->add_option("--a", va.a, "lower terminal");
  verify->add_option("--alpha", va.alpha, "order for the single-order checks");
  verify->add_option("--beta", va.beta, "second order for the counterexample");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (deriv->parsed()) return cmd_deriv(da, out);
    if (integ->parsed()) return cmd_integ(ia, out);
    if (solve_cmd->parsed()) return cmd_solve(sa, out, err);
    if (verify->parsed()) return cmd_verify(va, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const expr::SyntaxError& e) {
    err << "syntax error: " << e.what() << '\n';
    return kUsage;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const StepFailure& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNonexistence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace confcalc::cli
