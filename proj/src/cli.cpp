#include "an2c/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "an2c/bench.hpp"
#include "an2c/problems.hpp"
#include "an2c/report.hpp"
#include "an2c/solver.hpp"

namespace an2c {

namespace {

constexpr double kGradTolerance = 1e-5;
constexpr double kHessTolerance = 1e-4;

struct SolverFlags {
  SolverConfig cfg;
  std::string trace = "full";
  std::string backend = "direct";
  std::optional<double> theta_sub;
};

void add_solver_flags(CLI::App& app, SolverFlags& f) {
  SolverConfig& c = f.cfg;
  app.add_option("--eps1", c.eps1, "first-order tolerance")->capture_default_str();
  app.add_option("--eps2", c.eps2, "curvature tolerance (second-order modes)")->capture_default_str();
  app.add_option("--max-iter", c.max_iter, "iteration cap")->capture_default_str();
  app.add_option("--sigma0", c.sigma0)->capture_default_str();
  app.add_option("--sigma-min", c.sigma_min)->capture_default_str();
  app.add_option("--kappa-a", c.kappa_a)->capture_default_str();
  app.add_option("--kappa-c", c.kappa_C)->capture_default_str();
  app.add_option("--kappa-theta", c.kappa_theta)->capture_default_str();
  app.add_option("--varsigma1", c.varsigma1)->capture_default_str();
  app.add_option("--varsigma2", c.varsigma2)->capture_default_str();
  app.add_option("--varsigma3", c.varsigma3)->capture_default_str();
  app.add_option("--gamma1", c.gamma1)->capture_default_str();
  app.add_option("--gamma2", c.gamma2)->capture_default_str();
  app.add_option("--gamma3", c.gamma3)->capture_default_str();
  app.add_option("--eta1", c.eta1)->capture_default_str();
  app.add_option("--eta2", c.eta2)->capture_default_str();
  app.add_option("--theta-sub", f.theta_sub, "AR2 subproblem accuracy (default depends on n)");
  app.add_option("--eig-tol", c.eig_tol, "eigen-solver residual tolerance")->capture_default_str();
  app.add_option("--backend", f.backend, "linear solver")->check(CLI::IsMember({"direct", "cg"}))->capture_default_str();
}

SolverConfig finish_flags(const SolverFlags& f) {
  SolverConfig cfg = f.cfg;
  cfg.trace = parse_trace_level(f.trace);
  cfg.backend = f.backend == "cg" ? LinearBackend::conjugate_gradient : LinearBackend::direct;
  cfg.theta_sub = f.theta_sub;
  cfg.validate();
  return cfg;
}

std::vector<std::string> read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read problem list " + path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    line.erase(std::find(line.begin(), line.end(), '#'), line.end());
    std::istringstream words(line);
    std::string id;
    if (words >> id) ids.push_back(id);
  }
  if (ids.empty()) throw std::runtime_error("problem list " + path + " is empty");
  return ids;
}

std::vector<Mode> parse_algos(const std::string& list) {
  std::vector<Mode> algos;
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) algos.push_back(parse_mode(item));
  if (algos.empty()) throw std::invalid_argument("--algos is empty");
  return algos;
}

int status_exit_code(RunStatus status) {
  switch (status) {
    case RunStatus::first_order:
    case RunStatus::second_order: return exit_code::ok;
    case RunStatus::max_iter: return exit_code::max_iter;
    case RunStatus::numeric_failure: return exit_code::numeric_failure;
  }
  return exit_code::numeric_failure;
}

void print_table(std::ostream& out, const std::vector<BenchResult>& results, const std::vector<ProfileCurve>& curves) {
  out << std::left << std::setw(6) << "";
  for (const ProfileCurve& c : curves) out << std::right << std::setw(10) << c.algo;
  out << "\npi    ";
  for (const ProfileCurve& c : curves) out << std::setw(10) << std::fixed << std::setprecision(3) << pi_statistic(c);
  out << "\nrho   ";
  for (const ProfileCurve& c : curves)
    out << std::setw(10) << std::fixed << std::setprecision(2) << rho_statistic(results_for(results, c.algo));
  out << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive regularized Newton solvers with negative curvature"};
  app.require_subcommand(1);

  // solve
  CLI::App* solve_cmd = app.add_subcommand("solve", "run one solver on one problem, JSON record on stdout");
  std::string problem_spec, algo = "an2c";
  std::uint64_t seed = 0;
  bool random_start = false;
  SolverFlags solve_flags;
  solve_cmd->add_option("--problem", problem_spec, "name or name:n")->required();
  solve_cmd->add_option("--algo", algo)->check(CLI::IsMember({"an2c", "an2e", "soan2c", "soan2e", "ar2"}))->capture_default_str();
  solve_cmd->add_option("--trace", solve_flags.trace)->check(CLI::IsMember({"none", "summary", "full"}))->capture_default_str();
  solve_cmd->add_option("--seed", seed, "seed for --random-start")->capture_default_str();
  solve_cmd->add_flag("--random-start", random_start, "perturb x0 by uniform[-1,1] noise");
  add_solver_flags(*solve_cmd, solve_flags);

  // bench
  CLI::App* bench_cmd = app.add_subcommand("bench", "run an algorithm x problem grid and write profiles");
  std::vector<std::string> suite_args{"small"};
  std::string algos_list = "an2c,an2e";
  const char* env_out = std::getenv("AN2C_OUT_DIR");
  std::string out_dir = env_out && *env_out ? env_out : "bench_out";
  unsigned workers = 1;
  SolverFlags bench_flags;
  bench_cmd->add_option("--suite", suite_args, "small | medium | custom-file <path>")->expected(1, 2);
  bench_cmd->add_option("--algos", algos_list, "comma-separated list")->capture_default_str();
  bench_cmd->add_option("--out", out_dir, "output directory (default $AN2C_OUT_DIR or bench_out)")->capture_default_str();
  bench_cmd->add_option("--workers", workers)->check(CLI::PositiveNumber)->capture_default_str();
  add_solver_flags(*bench_cmd, bench_flags);

  // check
  CLI::App* check_cmd = app.add_subcommand("check", "compare analytic derivatives with finite differences");
  check_cmd->set_help_flag("--help", "print this help message and exit");  // --h is the difference step
  std::string check_problem;
  bool check_all = false;
  double h = 1e-5;
  int points = 3;
  std::uint64_t check_seed = 0;
  auto* problem_opt = check_cmd->add_option("--problem", check_problem, "name or name:n");
  auto* all_opt = check_cmd->add_flag("--all", check_all, "every suite problem at its default size");
  problem_opt->excludes(all_opt);
  check_cmd->add_option("--h", h, "difference step")->check(CLI::PositiveNumber)->capture_default_str();
  check_cmd->add_option("--points", points, "probe points (x0 plus random perturbations)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  check_cmd->add_option("--seed", check_seed)->capture_default_str();

  CLI::App* list_cmd = app.add_subcommand("list", "print the problem registry as JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (*check_cmd && !check_all && check_problem.empty()) throw CLI::ValidationError("check needs --problem or --all");
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_code::usage;
  }

  try {
    if (*solve_cmd) {
      SolverConfig cfg = finish_flags(solve_flags);
      cfg.mode = parse_mode(algo);
      Problem problem = make_problem(problem_spec);
      if (random_start) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> noise(-1.0, 1.0);
        for (double& xi : problem.x0) xi += noise(rng);
      }
      const RunRecord run = solve(problem, cfg);
      out << run_json(run, cfg).dump(2) << '\n';
      if (!run.failure_reason.empty()) err << "numeric failure: " << run.failure_reason << '\n';
      return status_exit_code(run.status);
    }

    if (*bench_cmd) {
      SolverConfig cfg = finish_flags(bench_flags);
      std::vector<std::string> ids;
      const std::string& kind = suite_args.at(0);
      if (kind == "small" && suite_args.size() == 1) ids = suite(Tier::small);
      else if (kind == "medium" && suite_args.size() == 1) ids = suite(Tier::medium);
      else if (kind == "custom-file" && suite_args.size() == 2) ids = read_problem_file(suite_args[1]);
      else throw std::invalid_argument("--suite takes small, medium or custom-file <path>");
      const std::vector<Mode> algos = parse_algos(algos_list);

      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec) throw std::runtime_error("cannot create output directory " + out_dir + ": " + ec.message());
      const auto results = run_grid(algos, ids, cfg, workers);
      const auto curves = performance_profile(results);
      write_bench_artifacts(out_dir, results, curves, cfg);
      print_table(out, results, curves);
      return exit_code::ok;
    }

    if (*check_cmd) {
      std::vector<std::string> ids;
      if (check_all) {
        for (const ProblemInfo& info : problem_registry())
          if (!info.fixture) ids.push_back(info.name);
      } else {
        ids.push_back(check_problem);
      }
      std::mt19937_64 rng(check_seed);
      std::uniform_real_distribution<double> noise(-0.5, 0.5);
      int code = exit_code::ok;
      for (const std::string& id : ids) {
        const Problem problem = make_problem(id);
        double grad_err = 0.0, hess_err = 0.0;
        for (int p = 0; p < points; ++p) {
          Vector x = problem.x0;
          if (p > 0)
            for (double& xi : x) xi += noise(rng);
          const DerivativeReport report = check_derivatives(problem, x, h);
          grad_err = std::max(grad_err, report.max_rel_grad_err);
          hess_err = std::max(hess_err, report.max_rel_hess_err);
        }
        const bool ok = grad_err <= kGradTolerance && hess_err <= kHessTolerance;
        out << problem.name << ':' << problem.n << " grad_err=" << format_double(grad_err)
            << " hess_err=" << format_double(hess_err) << (ok ? " ok" : " FAILED") << '\n';
        if (!ok) {
          err << "derivative check failed for " << problem.name << '\n';
          code = exit_code::check_failed;
        }
      }
      return code;
    }

    if (*list_cmd) {
      out << registry_json().dump(2) << '\n';
      return exit_code::ok;
    }
  } catch (const DerivativeCheckError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::check_failed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  }
  return exit_code::usage;
}

}  // namespace an2c
