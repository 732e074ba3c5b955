// Command-line front end: solve | bench | tikhonov.

#include <CLI11.hpp>

#include "gsvd/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Iterative GSVD solvers (Davidson-type and multidirectional)"};
  app.require_subcommand(1);

  gsvd::cli::SolveArgs solve_args;
  std::string solve_out;
  CLI::App* solve = app.add_subcommand("solve", "compute extremal generalized singular pairs");
  solve->add_option("--a", solve_args.a_path, "Matrix Market file for A")->required();
  solve->add_option("--b", solve_args.b_path, "Matrix Market file for B")->required();
  solve->add_option("--which", solve_args.which, "largest|smallest");
  solve->add_option("--count", solve_args.count, "number of pairs");
  solve->add_option("--algorithm", solve_args.algorithm, "gd|bbgd|md");
  solve->add_option("--min-dim", solve_args.min_dim, "restart dimension");
  solve->add_option("--max-dim", solve_args.max_dim, "maximum search dimension");
  solve->add_option("--max-restarts", solve_args.max_restarts, "restart budget");
  solve->add_option("--tol", solve_args.tol, "backward-error tolerance");
  solve->add_option("--seed", solve_args.seed, "RNG seed");
  solve->add_option("--deflation", solve_args.deflation, "transform|restrict");
  solve->add_option("--seed-vectors", solve_args.seed_vectors_path,
                    "Matrix Market file of vectors locked as (1,0) pairs");
  solve->add_flag("--vectors", solve_args.vectors, "emit converged basis vectors");
  solve->add_option("--out", solve_out, "output JSON path (default stdout)");

  gsvd::cli::BenchArgs bench_args;
  std::string bench_out, bench_csv;
  CLI::App* bench = app.add_subcommand("bench", "median matrix-vector counts over seeds");
  bench->add_option("--example", bench_args.example, "1|2a|2b|2c|3a|3b|3c|4")->required();
  bench->add_option("--n", bench_args.n, "problem size");
  bench->add_option("--trials", bench_args.trials, "number of seeded trials");
  bench->add_option("--which", bench_args.which, "largest|smallest");
  bench->add_option("--algorithm", bench_args.algorithm, "gd|md");
  bench->add_option("--min-dim", bench_args.min_dim, "restart dimension");
  bench->add_option("--max-dim", bench_args.max_dim, "maximum search dimension");
  bench->add_option("--max-restarts", bench_args.max_restarts, "restart budget");
  bench->add_option("--tol", bench_args.tol, "value-error target");
  bench->add_option("--seed", bench_args.seed, "base RNG seed");
  bench->add_option("--out", bench_out, "output JSON path (default stdout)");
  bench->add_option("--csv", bench_csv, "per-trial CSV path");

  gsvd::cli::TikhonovArgs tik_args;
  std::string tik_out;
  CLI::App* tik = app.add_subcommand("tikhonov", "truncated-GSVD Tikhonov pipeline");
  tik->add_option("--problem", tik_args.problem,
                  "shaw|baart|deriv2-1|deriv2-2|deriv2-3|gravity-1|gravity-2|gravity-3|"
                  "foxgood|wing|phillips")
      ->required();
  tik->add_option("--n", tik_args.n, "problem size");
  tik->add_option("--pairs", tik_args.pairs, "pairs kept in the truncated GSVD");
  tik->add_option("--noise", tik_args.noise, "relative noise level");
  tik->add_option("--seed", tik_args.seed, "RNG seed");
  tik->add_option("--mode", tik_args.mode, "first|five (converged pairs beyond the seed)");
  tik->add_option("--algorithm", tik_args.algorithm, "gd|md");
  tik->add_option("--tol", tik_args.tol, "backward-error tolerance");
  tik->add_option("--min-dim", tik_args.min_dim, "restart dimension");
  tik->add_option("--max-dim", tik_args.max_dim, "maximum search dimension");
  tik->add_option("--max-restarts", tik_args.max_restarts, "restart budget");
  tik->add_option("--out", tik_out, "output JSON path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    gsvd::cli::CommandResult result;
    if (solve->parsed()) {
      result = gsvd::cli::cmd_solve(solve_args);
      gsvd::cli::emit(result, solve_out);
    } else if (bench->parsed()) {
      result = gsvd::cli::cmd_bench(bench_args, bench_csv);
      gsvd::cli::emit(result, bench_out);
    } else {
      result = gsvd::cli::cmd_tikhonov(tik_args);
      gsvd::cli::emit(result, tik_out);
    }
    return result.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gsvd: %s\n", e.what());
    return gsvd::cli::kExitUsage;
  }
}
