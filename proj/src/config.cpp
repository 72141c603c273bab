#include "an2c/config.hpp"

#include <cmath>
#include <stdexcept>

namespace an2c {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::an2c: return "an2c";
    case Mode::an2e: return "an2e";
    case Mode::soan2c: return "soan2c";
    case Mode::soan2e: return "soan2e";
    case Mode::ar2: return "ar2";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  for (Mode m : {Mode::an2c, Mode::an2e, Mode::soan2c, Mode::soan2e, Mode::ar2})
    if (to_string(m) == text) return m;
  throw std::invalid_argument("unknown algorithm '" + std::string(text) + "'");
}

std::string_view to_string(TraceLevel level) {
  switch (level) {
    case TraceLevel::none: return "none";
    case TraceLevel::summary: return "summary";
    case TraceLevel::full: return "full";
  }
  return "?";
}

TraceLevel parse_trace_level(std::string_view text) {
  for (TraceLevel t : {TraceLevel::none, TraceLevel::summary, TraceLevel::full})
    if (to_string(t) == text) return t;
  throw std::invalid_argument("unknown trace level '" + std::string(text) + "'");
}

namespace {

void check(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void SolverConfig::validate() const {
  check(finite(eps1) && eps1 > 0.0 && eps1 <= 1.0, "eps1 must lie in (0, 1]");
  check(finite(eps2) && eps2 > 0.0 && eps2 <= 1.0, "eps2 must lie in (0, 1]");
  check(finite(sigma0) && sigma0 > 0.0, "sigma0 must be positive");
  check(finite(sigma_min) && sigma_min > 0.0, "sigma_min must be positive");
  check(finite(kappa_a) && kappa_a >= 1.0, "kappa_a must be at least 1");
  check(finite(kappa_C) && kappa_C > 0.0, "kappa_C must be positive");
  check(finite(kappa_theta) && kappa_theta > 0.0, "kappa_theta must be positive");
  check(varsigma1 > 0.0 && varsigma1 < 1.0, "varsigma1 must lie in (0, 1)");
  check(varsigma2 >= 0.0 && varsigma2 < 0.5, "varsigma2 must lie in [0, 1/2)");
  check(varsigma3 >= 0.0 && varsigma3 < 1.0, "varsigma3 must lie in [0, 1)");
  check(gamma1 > 0.0 && gamma1 < 1.0, "gamma1 must lie in (0, 1)");
  check(finite(gamma2) && gamma2 > 1.0, "gamma2 must exceed 1");
  check(finite(gamma3) && gamma3 >= gamma2, "gamma3 must be at least gamma2");
  check(eta1 > 0.0 && eta1 <= 1.0, "eta1 must lie in (0, 1]");
  check(eta2 >= eta1 && eta2 < 1.0, "eta2 must lie in [eta1, 1)");
  check(max_iter > 0, "max_iter must be positive");
  check(!theta_sub || (finite(*theta_sub) && *theta_sub > 0.0), "theta_sub must be positive");
  check(finite(eig_tol) && eig_tol > 0.0, "eig_tol must be positive");
}

}  // namespace an2c
