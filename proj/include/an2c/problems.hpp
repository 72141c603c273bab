#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "an2c/types.hpp"

namespace an2c {

/// Twice continuously differentiable objective with analytic derivatives.
/// Implementations must be pure: identical inputs give bitwise identical
/// outputs, and no state is mutated.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual void hessian(const Vector& x, HessianBuilder& out) const = 0;
};

struct Problem {
  std::string name;
  Eigen::Index n = 0;
  Vector x0;
  bool convex = false;
  std::optional<double> hessian_lipschitz;
  std::shared_ptr<const Objective> objective;
};

/// Result of one evaluation. A non-finite value in any requested output is
/// reported through `finite` rather than thrown.
struct Evaluation {
  int order = 0;
  double f = 0.0;
  Vector g;
  std::optional<SymmetricMatrix> H;
  bool finite = true;
};

/// Evaluates f and, for order >= 1, g and, for order 2, H at x. Each
/// requested order bumps its counter in `counters` by one.
Evaluation evaluate(const Problem& problem, const Vector& x, int order, EvalCounters& counters);

struct DerivativeReport {
  double max_rel_grad_err = 0.0;
  double max_rel_hess_err = 0.0;
  std::vector<Vector> probe_points;
};

class DerivativeCheckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Central finite differences with per-coordinate step h*max(1,|x_i|).
/// Errors are max_i |fd_i - a_i| / max(1, |a_i|).
DerivativeReport check_derivatives(const Problem& problem, const Vector& x, double h);

// ---------------------------------------------------------------------------
// Registry

class UnknownProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Tier { small, medium };

struct ProblemInfo {
  std::string name;
  Eigen::Index default_n = 0;
  Eigen::Index medium_n = 0;
  bool convex = false;
  std::optional<double> hessian_lipschitz;
  bool fixture = false;  // test fixtures are resolvable but not part of any suite
  std::string start;     // description of the conventional starting point
  std::function<Problem(Eigen::Index)> make;
};

const std::vector<ProblemInfo>& problem_registry();
const ProblemInfo& find_problem(std::string_view name);

/// Resolves "name" or "name:n" (case-insensitive name).
Problem make_problem(std::string_view id);

/// Suite problem ids ("name:n") for the given tier, fixtures excluded.
std::vector<std::string> suite(Tier tier);

/// [{name, default_n, convex, hessian_lipschitz?}] for every non-fixture problem.
nlohmann::json registry_json();

/// Convex quadratic 0.5 * sum d_i x_i^2 with the given diagonal and start.
Problem make_diagonal_quadratic(std::string name, Vector diagonal, Vector x0);

}  // namespace an2c
