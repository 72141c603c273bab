#include "an2c/bench.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "an2c/problems.hpp"
#include "an2c/report.hpp"
#include "an2c/solver.hpp"

namespace an2c {

namespace {

BenchResult run_one(Mode algo, const std::string& id, const SolverConfig& base) {
  BenchResult out;
  out.algo = std::string(to_string(algo));
  out.problem = id;
  try {
    const Problem problem = make_problem(id);
    out.problem = problem.name;
    out.n = problem.n;
    SolverConfig cfg = base;
    cfg.mode = algo;
    cfg.trace = TraceLevel::none;
    const RunRecord run = solve(problem, cfg);
    out.status = std::string(to_string(run.status));
    out.counters = run.counters;
    out.success = run.status == RunStatus::first_order || run.status == RunStatus::second_order;
    if (out.success) out.iterations = run.iterations;
  } catch (const std::exception& e) {
    out.status = std::string("error: ") + e.what();
  }
  return out;
}

auto sort_key(const BenchResult& r) { return std::tie(r.algo, r.problem, r.n); }

}  // namespace

std::vector<BenchResult> run_grid(const std::vector<Mode>& algos, const std::vector<std::string>& problems,
                                  const SolverConfig& base, unsigned workers) {
  if (algos.empty() || problems.empty()) throw std::invalid_argument("run_grid needs at least one algo and problem");
  for (const std::string& id : problems) make_problem(id);  // resolve everything up front

  const std::size_t total = algos.size() * problems.size();
  std::vector<BenchResult> results(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++)
      results[i] = run_one(algos[i / problems.size()], problems[i % problems.size()], base);
  };
  const unsigned threads = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(total));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return sort_key(a) < sort_key(b); });
  return results;
}

double ProfileCurve::fraction_at(double tau) const {
  double f = 0.0;
  for (const auto& [t, frac] : breakpoints) {
    if (t > tau) break;
    f = frac;
  }
  return f;
}

std::vector<ProfileCurve> performance_profile(const std::vector<BenchResult>& results) {
  if (results.empty()) throw ProfileError("performance profile of an empty grid");

  using Key = std::pair<std::string, Eigen::Index>;
  std::set<std::string> algos;
  std::map<Key, std::map<std::string, std::optional<std::int64_t>>> grid;
  for (const BenchResult& r : results) {
    algos.insert(r.algo);
    auto& cell = grid[{r.problem, r.n}];
    if (cell.count(r.algo)) throw ProfileError("duplicate result for " + r.algo + " on " + r.problem);
    cell[r.algo] = r.success ? r.iterations : std::nullopt;
  }

  std::map<std::string, std::vector<double>> ratios;
  std::size_t counted = 0;
  for (const auto& [key, cell] : grid) {
    if (cell.size() != algos.size()) throw ProfileError("incomplete grid at problem " + key.first);
    std::optional<std::int64_t> best;
    for (const auto& [algo, iters] : cell) {
      if (!iters) continue;
      const std::int64_t effort = std::max<std::int64_t>(*iters, 1);
      best = best ? std::min(*best, effort) : effort;
    }
    if (!best) continue;
    ++counted;
    for (const auto& [algo, iters] : cell)
      if (iters) ratios[algo].push_back(static_cast<double>(std::max<std::int64_t>(*iters, 1)) / *best);
  }

  std::vector<ProfileCurve> curves;
  for (const std::string& algo : algos) {
    ProfileCurve curve{algo, {}};
    std::vector<double> r = ratios[algo];
    std::sort(r.begin(), r.end());
    const double denom = static_cast<double>(counted);
    std::size_t i = 0;
    while (i < r.size() && r[i] <= 1.0) ++i;
    curve.breakpoints.emplace_back(1.0, counted ? i / denom : 0.0);
    while (i < r.size()) {
      const double tau = r[i];
      while (i < r.size() && r[i] == tau) ++i;
      curve.breakpoints.emplace_back(tau, i / denom);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

double pi_statistic(const ProfileCurve& curve) {
  constexpr double lo = 1.0, hi = 10.0;
  double area = 0.0;
  const auto& bp = curve.breakpoints;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    const double start = std::max(bp[i].first, lo);
    const double end = i + 1 < bp.size() ? std::min(bp[i + 1].first, hi) : hi;
    if (end > start) area += bp[i].second * (end - start);
  }
  return area / 10.0;
}

double rho_statistic(const std::vector<BenchResult>& results) {
  if (results.empty()) throw std::invalid_argument("rho statistic of an empty result list");
  const auto solved = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.success; });
  return 100.0 * static_cast<double>(solved) / static_cast<double>(results.size());
}

std::vector<BenchResult> results_for(const std::vector<BenchResult>& results, const std::string& algo) {
  std::vector<BenchResult> out;
  std::copy_if(results.begin(), results.end(), std::back_inserter(out), [&](const auto& r) { return r.algo == algo; });
  return out;
}

std::string results_csv(const std::vector<BenchResult>& results) {
  std::ostringstream out;
  out << "algo,problem,n,iterations,success,f_evals,g_evals,H_evals,eigen_solves\n";
  for (const BenchResult& r : results) {
    out << r.algo << ',' << r.problem << ',' << r.n << ',';
    if (r.iterations) out << *r.iterations; else out << "unsolved";
    out << ',' << (r.success ? "true" : "false") << ',' << r.counters.f_evals << ',' << r.counters.g_evals << ','
        << r.counters.H_evals << ',' << r.counters.eigen_solves << '\n';
  }
  return out.str();
}

std::string profile_csv(const ProfileCurve& curve) {
  std::string out = "tau,fraction\n";
  for (const auto& [tau, frac] : curve.breakpoints) out += format_double(tau) + ',' + format_double(frac) + '\n';
  return out;
}

nlohmann::json bench_summary(const std::vector<BenchResult>& results, const std::vector<ProfileCurve>& curves,
                             const SolverConfig& base) {
  nlohmann::json algos = nlohmann::json::array();
  for (const ProfileCurve& curve : curves) {
    const auto mine = results_for(results, curve.algo);
    const auto solved = std::count_if(mine.begin(), mine.end(), [](const auto& r) { return r.success; });
    algos.push_back({{"algo", curve.algo},
                     {"pi", pi_statistic(curve)},
                     {"rho", rho_statistic(mine)},
                     {"solved", solved},
                     {"total", mine.size()}});
  }
  SolverConfig echo = base;
  echo.trace = TraceLevel::none;
  nlohmann::json cfg = config_json(echo);
  cfg.erase("algo");
  return {{"algos", algos}, {"problems", results.size() / std::max<std::size_t>(curves.size(), 1)}, {"config", cfg}};
}

void write_bench_artifacts(const std::filesystem::path& dir, const std::vector<BenchResult>& results,
                           const std::vector<ProfileCurve>& curves, const SolverConfig& base) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    f << text;
    f.close();
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  };
  write("results.csv", results_csv(results));
  for (const ProfileCurve& curve : curves) write("profile_" + curve.algo + ".csv", profile_csv(curve));
  write("summary.json", bench_summary(results, curves, base).dump(2) + "\n");
}

}  // namespace an2c
