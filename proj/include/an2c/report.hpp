#pragma once

#include <string>

#include "json.hpp"

#include "an2c/config.hpp"
#include "an2c/solver.hpp"

namespace an2c {

/// Every SolverConfig field under its flag-style name.
nlohmann::json config_json(const SolverConfig& cfg);

/// Stable JSON form of a run. Non-finite reals become null.
nlohmann::json run_json(const RunRecord& run);

/// run_json plus a "config" echo.
nlohmann::json run_json(const RunRecord& run, const SolverConfig& cfg);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace an2c
