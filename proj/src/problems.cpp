#include "an2c/problems.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "test_functions.hpp"

namespace an2c {

Evaluation evaluate(const Problem& problem, const Vector& x, int order, EvalCounters& counters) {
  if (order < 0 || order > 2) throw std::invalid_argument("evaluation order must be 0, 1 or 2");
  if (x.size() != problem.n)
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) + ", problem " +
                                problem.name + " expects " + std::to_string(problem.n));
  Evaluation e;
  e.order = order;
  e.f = problem.objective->value(x);
  ++counters.f_evals;
  e.finite = std::isfinite(e.f);
  if (order >= 1) {
    e.g = problem.objective->gradient(x);
    ++counters.g_evals;
    e.finite = e.finite && e.g.allFinite();
  }
  if (order == 2) {
    HessianBuilder builder(problem.n);
    problem.objective->hessian(x, builder);
    e.H = std::move(builder).build();
    ++counters.H_evals;
    e.finite = e.finite && e.H->all_finite();
  }
  return e;
}

namespace {

std::string format_point(const Vector& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

double relative_error(double approx, double exact) {
  return std::abs(approx - exact) / std::max(1.0, std::abs(exact));
}

}  // namespace

DerivativeReport check_derivatives(const Problem& problem, const Vector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  EvalCounters counters;
  const Evaluation at_x = evaluate(problem, x, 2, counters);
  if (!at_x.finite) throw DerivativeCheckError("non-finite evaluation at " + format_point(x));
  const DenseMatrix H = at_x.H->to_dense();

  DerivativeReport report;
  report.probe_points.push_back(x);
  for (Eigen::Index i = 0; i < problem.n; ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    Vector xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    const Evaluation ep = evaluate(problem, xp, 1, counters);
    const Evaluation em = evaluate(problem, xm, 1, counters);
    report.probe_points.push_back(xp);
    report.probe_points.push_back(xm);
    if (!ep.finite) throw DerivativeCheckError("non-finite evaluation at " + format_point(xp));
    if (!em.finite) throw DerivativeCheckError("non-finite evaluation at " + format_point(xm));
    // Use the actual spacing so rounding in x +- step does not bias the quotient.
    const double width = xp[i] - xm[i];
    report.max_rel_grad_err =
        std::max(report.max_rel_grad_err, relative_error((ep.f - em.f) / width, at_x.g[i]));
    const Vector column = (ep.g - em.g) / width;
    for (Eigen::Index r = 0; r < problem.n; ++r)
      report.max_rel_hess_err = std::max(report.max_rel_hess_err, relative_error(column[r], H(r, i)));
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

Vector constant(Eigen::Index n, double v) { return Vector::Constant(n, v); }

Vector alternating(Eigen::Index n, double odd, double even) {
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = i % 2 == 0 ? odd : even;
  return x;
}

Problem assemble(const std::string& name, Eigen::Index n, Vector x0, bool convex,
                 std::optional<double> lipschitz, std::shared_ptr<const Objective> objective) {
  Problem p;
  p.name = name;
  p.n = n;
  p.x0 = std::move(x0);
  p.convex = convex;
  p.hessian_lipschitz = lipschitz;
  p.objective = std::move(objective);
  return p;
}

ProblemInfo family(std::string name, Eigen::Index default_n, Eigen::Index medium_n, bool convex,
                   std::optional<double> lipschitz, std::string start,
                   std::function<std::shared_ptr<const Objective>(Eigen::Index)> objective,
                   std::function<Vector(Eigen::Index)> x0, bool fixture = false) {
  ProblemInfo info;
  info.name = name;
  info.default_n = default_n;
  info.medium_n = medium_n;
  info.convex = convex;
  info.hessian_lipschitz = lipschitz;
  info.fixture = fixture;
  info.start = std::move(start);
  info.make = [=](Eigen::Index n) {
    auto obj = objective(n);
    return assemble(name, n, x0(n), convex, lipschitz, std::move(obj));
  };
  return info;
}

ProblemInfo dixmaan_family(std::string name, functions::DixmaanParams params) {
  return family(
      std::move(name), 12, 600, false, std::nullopt, "x_i = 2",
      [params](Eigen::Index n) { return functions::dixmaan(n, params); },
      [](Eigen::Index n) { return constant(n, 2.0); });
}

Vector log_spaced(Eigen::Index n, double lo, double hi) {
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    d[i] = lo * std::pow(hi / lo, t);
  }
  return d;
}

Vector fixed_dimension(Eigen::Index n, Eigen::Index expected, const char* name) {
  if (n != expected)
    throw std::invalid_argument(std::string(name) + " has fixed dimension " + std::to_string(expected));
  return Vector::Zero(n);
}

std::vector<ProblemInfo> build_registry() {
  using namespace functions;
  std::vector<ProblemInfo> r;
  r.push_back(family("rosenbr", 10, 500, false, std::nullopt, "x_i = -1.2 (odd i), 1 (even i)", rosenbrock,
                     [](Eigen::Index n) { return alternating(n, -1.2, 1.0); }));
  r.push_back(family("broyden3d", 10, 500, false, std::nullopt, "x_i = -1", broyden_tridiagonal,
                     [](Eigen::Index n) { return constant(n, -1.0); }));
  r.push_back(dixmaan_family("dixmaana", {1.0, 0.0, 0.125, 0.125, 0, 0, 0, 0}));
  r.push_back(dixmaan_family("dixmaane", {1.0, 0.0, 0.125, 0.125, 1, 0, 0, 1}));
  r.push_back(dixmaan_family("dixmaani", {1.0, 0.0, 0.125, 0.125, 2, 0, 0, 2}));
  r.push_back(dixmaan_family("dixmaanl", {1.0, 0.26, 0.26, 0.26, 2, 1, 1, 2}));
  r.push_back(family("tridia", 10, 500, true, 0.0, "x_i = 1", tridia,
                     [](Eigen::Index n) { return constant(n, 1.0); }));
  r.push_back(family("arwhead", 10, 500, true, std::nullopt, "x_i = 1", arwhead,
                     [](Eigen::Index n) { return constant(n, 1.0); }));
  r.push_back(family("nondquar", 10, 500, true, std::nullopt, "x_i = 1 (odd i), -1 (even i)", nondquar,
                     [](Eigen::Index n) { return alternating(n, 1.0, -1.0); }));
  r.push_back(family("woods", 12, 500, false, std::nullopt, "(-3, -1, -3, -1) repeated", woods,
                     [](Eigen::Index n) { return alternating(n, -3.0, -1.0); }));
  r.push_back(family("engval1", 10, 500, true, std::nullopt, "x_i = 2", engval1,
                     [](Eigen::Index n) { return constant(n, 2.0); }));
  r.push_back(family("cube", 10, 500, false, std::nullopt, "x_i = -1.2 (odd i), 1 (even i)", cube,
                     [](Eigen::Index n) { return alternating(n, -1.2, 1.0); }));
  r.push_back(family("eg2", 10, 500, false, std::nullopt, "x_i = 0", eg2,
                     [](Eigen::Index n) { return constant(n, 0.0); }));
  r.push_back(family("dqrtic", 10, 500, true, std::nullopt, "x_i = 2", dqrtic,
                     [](Eigen::Index n) { return constant(n, 2.0); }));
  r.push_back(family("curly10", 10, 500, false, std::nullopt, "x_i = 1e-4 i / (n + 1)",
                     [](Eigen::Index n) { return curly(n, 10); },
                     [](Eigen::Index n) {
                       Vector x(n);
                       for (Eigen::Index i = 0; i < n; ++i)
                         x[i] = 1e-4 * static_cast<double>(i + 1) / static_cast<double>(n + 1);
                       return x;
                     }));
  r.push_back(family("quadratic", 10, 500, true, 0.0, "x_i = 1, Hessian diag(1, ..., n)",
                     [](Eigen::Index n) {
                       if (n < 1) throw std::invalid_argument("quadratic needs n >= 1");
                       return diagonal_quadratic(Vector::LinSpaced(n, 1.0, static_cast<double>(n)));
                     },
                     [](Eigen::Index n) { return constant(n, 1.0); }));
  r.push_back(family("illquad", 10, 500, true, 0.0, "x_i = 1, Hessian diag log-spaced over [1, 1e6]",
                     [](Eigen::Index n) {
                       if (n < 2) throw std::invalid_argument("illquad needs n >= 2");
                       return diagonal_quadratic(log_spaced(n, 1.0, 1e6));
                     },
                     [](Eigen::Index n) { return constant(n, 1.0); }));

  // Fixtures.
  r.push_back(family("badgrad-fixture", 2, 2, false, std::nullopt, "x = (-1.2, 1)", miscoded_rosenbrock,
                     [](Eigen::Index n) { return alternating(n, -1.2, 1.0); }, true));
  r.push_back(family("sphere", 2, 2, true, 0.0, "x_i = 1",
                     [](Eigen::Index n) { return diagonal_quadratic(Vector::Ones(n)); },
                     [](Eigen::Index n) { return constant(n, 1.0); }, true));
  r.push_back(family("saddle2", 2, 2, false, 0.0, "x = 0 (f = x^2 - y^2)",
                     [](Eigen::Index n) {
                       fixed_dimension(n, 2, "saddle2");
                       return diagonal_quadratic((Vector(2) << 2.0, -2.0).finished());
                     },
                     [](Eigen::Index n) { return fixed_dimension(n, 2, "saddle2"); }, true));
  r.push_back(family("saddle3", 3, 3, false, 0.0, "x = 0 (Hessian diag(1, 4, -3))",
                     [](Eigen::Index n) {
                       fixed_dimension(n, 3, "saddle3");
                       return diagonal_quadratic((Vector(3) << 1.0, 4.0, -3.0).finished());
                     },
                     [](Eigen::Index n) { return fixed_dimension(n, 3, "saddle3"); }, true));
  return r;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

const std::vector<ProblemInfo>& problem_registry() {
  static const std::vector<ProblemInfo> registry = build_registry();
  return registry;
}

const ProblemInfo& find_problem(std::string_view name) {
  const std::string key = lowercase(name);
  for (const ProblemInfo& info : problem_registry())
    if (info.name == key) return info;
  throw UnknownProblem("unknown problem '" + std::string(name) + "'");
}

Problem make_problem(std::string_view id) {
  const auto colon = id.find(':');
  const ProblemInfo& info = find_problem(id.substr(0, colon));
  Eigen::Index n = info.default_n;
  if (colon != std::string_view::npos) {
    const std::string_view digits = id.substr(colon + 1);
    long long parsed = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), parsed);
    if (ec != std::errc() || end != digits.data() + digits.size() || parsed <= 0)
      throw UnknownProblem("bad dimension in problem id '" + std::string(id) + "'");
    n = static_cast<Eigen::Index>(parsed);
  }
  return info.make(n);
}

std::vector<std::string> suite(Tier tier) {
  std::vector<std::string> out;
  for (const ProblemInfo& info : problem_registry()) {
    if (info.fixture) continue;
    const Eigen::Index n = tier == Tier::small ? info.default_n : info.medium_n;
    out.push_back(info.name + ":" + std::to_string(n));
  }
  return out;
}

nlohmann::json registry_json() {
  nlohmann::json out = nlohmann::json::array();
  for (const ProblemInfo& info : problem_registry()) {
    if (info.fixture) continue;
    nlohmann::json entry = {{"name", info.name}, {"default_n", info.default_n}, {"convex", info.convex}};
    if (info.hessian_lipschitz) entry["hessian_lipschitz"] = *info.hessian_lipschitz;
    entry["start"] = info.start;
    out.push_back(std::move(entry));
  }
  return out;
}

Problem make_diagonal_quadratic(std::string name, Vector diagonal, Vector x0) {
  if (diagonal.size() != x0.size()) throw std::invalid_argument("diagonal and start point sizes differ");
  const bool convex = (diagonal.array() >= 0.0).all();
  const Eigen::Index n = diagonal.size();
  return assemble(std::move(name), n, std::move(x0), convex, 0.0,
                  functions::diagonal_quadratic(std::move(diagonal)));
}

}  // namespace an2c
