#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "an2c/config.hpp"
#include "an2c/types.hpp"

namespace an2c {

struct BenchResult {
  std::string algo;
  std::string problem;
  Eigen::Index n = 0;
  std::optional<std::int64_t> iterations;  // nullopt marks an unsolved run
  bool success = false;
  std::string status;
  EvalCounters counters;
};

/// Runs every (algo, problem) pair with `base` (mode replaced, trace off) on
/// up to `workers` threads. A run that throws is recorded as unsolved.
/// Results are sorted by algo, then problem name, then n.
std::vector<BenchResult> run_grid(const std::vector<Mode>& algos, const std::vector<std::string>& problems,
                                  const SolverConfig& base, unsigned workers = 1);

/// Step function: fraction(tau) is the second member of the last breakpoint
/// with first member <= tau, and 0 below tau = 1.
struct ProfileCurve {
  std::string algo;
  std::vector<std::pair<double, double>> breakpoints;

  double fraction_at(double tau) const;
};

class ProfileError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iteration profiles, one per algo in sorted order. Ratios use
/// max(iterations, 1); problems nobody solved are left out of the
/// denominator. Throws ProfileError on an empty or incomplete grid.
std::vector<ProfileCurve> performance_profile(const std::vector<BenchResult>& results);

/// One tenth of the area under the curve over [1, 10].
double pi_statistic(const ProfileCurve& curve);

/// Percentage of successful runs. Throws on an empty list.
double rho_statistic(const std::vector<BenchResult>& results);

/// Results of one algo.
std::vector<BenchResult> results_for(const std::vector<BenchResult>& results, const std::string& algo);

std::string results_csv(const std::vector<BenchResult>& results);
std::string profile_csv(const ProfileCurve& curve);
nlohmann::json bench_summary(const std::vector<BenchResult>& results, const std::vector<ProfileCurve>& curves,
                             const SolverConfig& base);

/// Writes results.csv, profile_<algo>.csv and summary.json into `dir`,
/// creating it if needed. Throws std::runtime_error when a file cannot be written.
void write_bench_artifacts(const std::filesystem::path& dir, const std::vector<BenchResult>& results,
                           const std::vector<ProfileCurve>& curves, const SolverConfig& base);

}  // namespace an2c
