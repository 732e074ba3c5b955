#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>

#include "gsvd/cli.hpp"

using namespace gsvd;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / "gsvd_cli_test";
    std::filesystem::create_directories(path);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

cli::Json strip_timing(cli::Json j) {
  j.erase("wall_ms");
  return j;
}

}  // namespace

TEST_CASE("cmd_solve") {
  TempDir dir;
  write_matrix_market(dir.file("a.mtx"), DiagonalOperator({4.0, 3.0, 2.0, 1.0}));
  write_matrix_market(dir.file("b.mtx"), DiagonalOperator({1.0, 1.0, 1.0, 1.0}));

  cli::SolveArgs args;
  args.a_path = dir.file("a.mtx");
  args.b_path = dir.file("b.mtx");
  args.which = "largest";
  args.min_dim = 2;
  args.max_dim = 4;
  args.tol = 1e-6;
  args.seed = 3;

  SECTION("finds sigma and reports a converged record") {
    cli::CommandResult res = cli::cmd_solve(args);
    CHECK(res.exit_code == cli::kExitOk);
    CHECK(res.json["schema"] == 1);
    CHECK(res.json["converged"] == true);
    CHECK(std::abs(res.json["triplets"][0]["sigma"].get<double>() - 4.0) < 1e-6);
    const auto& record = res.json["record"];
    REQUIRE(record.size() > 0);
    CHECK(record.back()[4].get<double>() <= 1e-6);  // final backward error
  }
  SECTION("identical seeds give byte-identical output apart from timing") {
    const std::string one = strip_timing(cli::cmd_solve(args).json).dump();
    const std::string two = strip_timing(cli::cmd_solve(args).json).dump();
    CHECK(one == two);
    args.seed = 4;
    const std::string three = strip_timing(cli::cmd_solve(args).json).dump();
    CHECK(one != three);
  }
  SECTION("vectors are emitted on request") {
    args.vectors = true;
    cli::CommandResult res = cli::cmd_solve(args);
    REQUIRE(res.json.contains("vectors"));
    CHECK(res.json["vectors"]["w"][0].size() == 4);
  }
  SECTION("missing files surface as errors") {
    args.a_path = dir.file("missing.mtx");
    CHECK_THROWS_AS(cli::cmd_solve(args), mm_parse_error);
  }
  SECTION("unusable flags surface as errors") {
    args.which = "median";
    CHECK_THROWS_AS(cli::cmd_solve(args), std::invalid_argument);
  }
  SECTION("exhausted restarts exit with the not-converged code") {
    args.tol = 1e-300;
    args.max_restarts = 0;
    cli::CommandResult res = cli::cmd_solve(args);
    CHECK(res.exit_code == cli::kExitNotConverged);
    CHECK(res.json["converged"] == false);
  }
  SECTION("multi-pair solve through the deflation driver") {
    args.count = 2;
    args.tol = 1e-8;
    cli::CommandResult res = cli::cmd_solve(args);
    CHECK(res.exit_code == cli::kExitOk);
    REQUIRE(res.json["triplets"].size() == 2);
    CHECK(std::abs(res.json["triplets"][0]["sigma"].get<double>() - 4.0) < 1e-6);
    CHECK(std::abs(res.json["triplets"][1]["sigma"].get<double>() - 3.0) < 1e-6);
  }
  SECTION("seed vectors are locked as (1,0) pairs") {
    // B with a nullspace: first-difference; A diagonal-ish dense
    ProblemInstance inst = gen_regu_problem("deriv2-1", 16);
    write_matrix_market(dir.file("a2.mtx"), *inst.pair.a);
    write_matrix_market(dir.file("b2.mtx"), *inst.pair.b);
    Matrix seeds(16, 1);
    for (int i = 0; i < 16; ++i) seeds(i, 0) = 0.25;
    write_matrix_market(dir.file("seeds.mtx"), DenseOperator(seeds));

    cli::SolveArgs s;
    s.a_path = dir.file("a2.mtx");
    s.b_path = dir.file("b2.mtx");
    s.count = 2;
    s.min_dim = 4;
    s.max_dim = 10;
    s.tol = 1e-7;
    s.seed = 5;
    s.seed_vectors_path = dir.file("seeds.mtx");
    cli::CommandResult res = cli::cmd_solve(s);
    CHECK(res.exit_code == cli::kExitOk);
    CHECK(res.json["triplets"][0]["c"].get<double>() == 1.0);
    CHECK(res.json["triplets"][0]["s"].get<double>() == 0.0);
    CHECK(res.json["triplets"][0]["sigma"].is_null());  // infinity
  }
}

TEST_CASE("cmd_bench") {
  cli::BenchArgs args;
  args.example = "1";
  args.n = 100;
  args.trials = 3;
  args.which = "largest";
  args.algorithm = "gd";
  args.tol = 1e-6;
  args.seed = 2;

  SECTION("single trial median is that trial") {
    args.trials = 1;
    cli::CommandResult res = cli::cmd_bench(args);
    REQUIRE(res.json["mv_per_trial"].size() == 1);
    CHECK(res.json["median_mv"].get<double>() ==
          double(res.json["mv_per_trial"][0].get<std::size_t>()));
  }
  SECTION("csv mirrors the trials with a fixed column layout") {
    TempDir dir;
    cli::CommandResult res = cli::cmd_bench(args, dir.file("bench.csv"));
    std::ifstream csv(dir.file("bench.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "example,algorithm,which,trial,mv");
    int rows = 0;
    std::string line;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 4);  // 3 trials + median row
  }
  SECTION("unknown example ids are rejected") {
    args.example = "9z";
    CHECK_THROWS_AS(cli::cmd_bench(args), std::invalid_argument);
  }
  SECTION("thread count does not change the result") {
    setenv("GSVD_ITER_THREADS", "1", 1);
    const std::string serial = strip_timing(cli::cmd_bench(args).json).dump();
    setenv("GSVD_ITER_THREADS", "2", 1);
    const std::string parallel = strip_timing(cli::cmd_bench(args).json).dump();
    unsetenv("GSVD_ITER_THREADS");
    CHECK(serial == parallel);
  }
}

TEST_CASE("cmd_tikhonov") {
  cli::TikhonovArgs args;
  args.problem = "shaw";
  args.n = 64;
  args.pairs = 8;
  args.noise = 0.01;
  args.seed = 7;
  args.mode = "first";
  args.algorithm = "md";
  args.tol = 1e-6;
  args.min_dim = 8;
  args.max_dim = 24;

  SECTION("pipeline emits the full report") {
    cli::CommandResult res = cli::cmd_tikhonov(args);
    CHECK(res.exit_code == cli::kExitOk);
    CHECK(res.json["converged"] == true);
    CHECK(res.json["mu"].get<double>() > 0.0);
    CHECK(res.json["sin_x2"].get<double>() < 1e-2);
    CHECK(res.json["rel_err_vs_exact_tgsvd"].get<double>() < 1e-2);
    CHECK(res.json["pairs_out"].size() == 8);
    // the seeded pair comes first
    CHECK(res.json["pairs_out"][0]["s"].get<double>() == 0.0);
    // discrepancy sits near the target
    const double target = res.json["eta_eps"].get<double>();
    CHECK(std::abs(res.json["discrepancy"].get<double>() - target) < 0.05 * target);
  }
  SECTION("reports are deterministic per seed") {
    const std::string one = strip_timing(cli::cmd_tikhonov(args).json).dump();
    const std::string two = strip_timing(cli::cmd_tikhonov(args).json).dump();
    CHECK(one == two);
  }
  SECTION("unknown problems are rejected") {
    args.problem = "heat";
    CHECK_THROWS_AS(cli::cmd_tikhonov(args), std::invalid_argument);
  }
  SECTION("five-pair deflation mode") {
    args.mode = "five";
    cli::CommandResult res = cli::cmd_tikhonov(args);
    CHECK(res.exit_code == cli::kExitOk);
    // seed + five converged pairs locked
    int exact_locked = 0;
    for (const auto& t : res.json["pairs_out"])
      exact_locked += !t["backward_error"].is_null() &&
                      t["backward_error"].get<double>() <= args.tol;
    CHECK(exact_locked >= 6);
  }
}
