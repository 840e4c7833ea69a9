// fredlat: guaranteed two-sided enclosures for second-kind Fredholm
// equations with monotone data, via order-preserving fixed-point
// iteration on a discretized function lattice.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "fredlat/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"extremal solutions of phi(t) = f(t) + lambda Int_a^b K(t,s) phi(s) ds\n"
               "by monotone bracketing iteration, with hypothesis checking, a\n"
               "collocation oracle, problem reflection and a lattice self-test"};
  app.require_subcommand(1);
  app.fallthrough();  // --json / --threads may follow the subcommand

  bool json = false;
  int threads = 0;
  app.add_flag("--json", json, "machine-readable summaries");
  app.add_option("--threads", threads,
                 "worker threads for operator application (default: all cores); "
                 "results are identical for any setting");

  fredlat::cli::CheckOptions check_opt;
  auto* check = app.add_subcommand("check", "verify the solvability hypotheses");
  check->add_option("file", check_opt.path, "problem file")->required();

  fredlat::cli::SolveOptions solve_opt;
  double solve_tol = 0.0;
  int solve_n = 0;
  std::string solve_trace;
  auto* solve = app.add_subcommand("solve", "compute the extremal solutions");
  solve->add_option("file", solve_opt.path, "problem file")->required();
  auto* tol_opt = solve->add_option("--tol", solve_tol, "override the stopping tolerance");
  auto* n_opt = solve->add_option("--n", solve_n, "override the grid node count");
  auto* trace_opt = solve->add_option("--trace", solve_trace, "write per-iteration CSV here");
  solve->add_flag("--force", solve_opt.force, "iterate even if the hypotheses fail");
  solve->add_option("-o,--output", solve_opt.output, "solution CSV path")
      ->capture_default_str();

  fredlat::cli::OracleOptions oracle_opt;
  int oracle_n = 0;
  auto* oracle = app.add_subcommand("oracle", "independent collocation solve");
  oracle->add_option("file", oracle_opt.path, "problem file")->required();
  auto* oracle_n_opt = oracle->add_option("--n", oracle_n, "override the grid node count");
  oracle->add_option("-o,--output", oracle_opt.output, "solution CSV path")
      ->capture_default_str();

  fredlat::cli::TransformOptions transform_opt;
  auto* transform = app.add_subcommand("transform", "print the reflected problem file");
  transform->add_option("file", transform_opt.path, "problem file")->required();

  fredlat::cli::SelftestOptions selftest_opt;
  auto* selftest =
      app.add_subcommand("lattice-selftest", "fixed-point battery on random finite lattices");
  selftest->add_option("--seed", selftest_opt.seed, "random seed")->capture_default_str();
  selftest->add_option("--cases", selftest_opt.cases, "number of generated cases")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif

  if (*check) {
    check_opt.json = json;
    return fredlat::cli::cmd_check(check_opt, std::cout, std::cerr);
  }
  if (*solve) {
    solve_opt.json = json;
    if (*tol_opt) solve_opt.tol = solve_tol;
    if (*n_opt) solve_opt.grid_n = solve_n;
    if (*trace_opt) solve_opt.trace_path = solve_trace;
    return fredlat::cli::cmd_solve(solve_opt, std::cout, std::cerr);
  }
  if (*oracle) {
    oracle_opt.json = json;
    if (*oracle_n_opt) oracle_opt.grid_n = oracle_n;
    return fredlat::cli::cmd_oracle(oracle_opt, std::cout, std::cerr);
  }
  if (*transform) {
    return fredlat::cli::cmd_transform(transform_opt, std::cout, std::cerr);
  }
  if (*selftest) {
    selftest_opt.json = json;
    return fredlat::cli::cmd_lattice_selftest(selftest_opt, std::cout, std::cerr);
  }
  return 2;
}
