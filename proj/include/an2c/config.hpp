#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "an2c/linalg.hpp"

namespace an2c {

enum class Mode { an2c, an2e, soan2c, soan2e, ar2 };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);  // throws std::invalid_argument
inline bool is_second_order(Mode m) { return m == Mode::soan2c || m == Mode::soan2e; }
inline bool tries_convex_step(Mode m) { return m == Mode::an2c || m == Mode::soan2c; }

enum class TraceLevel { none, summary, full };

std::string_view to_string(TraceLevel level);
TraceLevel parse_trace_level(std::string_view text);

/// Algorithmic constants. Defaults are the usual experimental settings;
/// sigma0, sigma_min and eig_tol are not fixed there and use 1, 1e-10, 1e-8.
struct SolverConfig {
  Mode mode = Mode::an2c;
  double eps1 = 1e-6;
  double eps2 = 1e-4;
  double sigma0 = 1.0;
  double sigma_min = 1e-10;
  double kappa_a = 100.0;
  double kappa_C = 1e8;
  double kappa_theta = 1.0;
  double varsigma1 = 0.5;
  double varsigma2 = 1e-10;
  double varsigma3 = 1e-10;
  double gamma1 = 0.5;
  double gamma2 = 10.0;
  double gamma3 = 10.0;
  double eta1 = 1e-4;
  double eta2 = 0.95;
  std::int64_t max_iter = 5000;
  std::optional<double> theta_sub;  // AR2 only; unset means 1e-3 for n <= 100, 1e-2 above

  LinearBackend backend = LinearBackend::direct;
  double eig_tol = 1e-8;
  TraceLevel trace = TraceLevel::full;

  /// Throws std::invalid_argument naming the first parameter out of range.
  void validate() const;

  double theta_sub_for(Eigen::Index n) const { return theta_sub.value_or(n <= 100 ? 1e-3 : 1e-2); }
};

}  // namespace an2c
