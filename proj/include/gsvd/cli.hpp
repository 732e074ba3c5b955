// Command implementations behind the gsvd tool: solve (single pair or
// truncated set from Matrix Market files), bench (median matrix-vector
// counts over seeded trials on the generated problem families), and
// tikhonov (truncated-GSVD regularization pipeline with an exact dense
// reference).  Everything returns JSON; the binary in tools/ only parses
// flags and forwards here.

#ifndef GSVD_CLI_HPP
#define GSVD_CLI_HPP

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "gsvd/gsvd.hpp"

namespace gsvd::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

struct CommandResult {
  Json json;
  int exit_code = kExitOk;
};

namespace detail {

inline double wall_ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

inline Target parse_which(const std::string& s) {
  if (s == "largest") return Target::largest;
  if (s == "smallest") return Target::smallest;
  throw std::invalid_argument("--which must be largest or smallest");
}

inline Variant parse_algorithm(const std::string& s) {
  if (s == "gd") return Variant::gd;
  if (s == "bbgd") return Variant::bb_gd;
  if (s == "md") return Variant::md;
  throw std::invalid_argument("--algorithm must be gd, bbgd or md");
}

inline DeflationMode parse_deflation(const std::string& s) {
  if (s == "transform") return DeflationMode::transform;
  if (s == "restrict") return DeflationMode::restrict_;
  throw std::invalid_argument("--deflation must be transform or restrict");
}

inline Json record_json(const ConvergenceRecord& rec) {
  Json out = Json::array();
  for (const IterationStat& it : rec)
    out.push_back({double(it.mv), it.c1, it.s1, it.residual_norm, it.backward_error});
  return out;
}

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json triplets_json(const PartialGsvd& partial) {
  Json out = Json::array();
  for (std::size_t i = 0; i < partial.size(); ++i) {
    Json t;
    t["c"] = partial.c[i];
    t["s"] = partial.s[i];
    t["sigma"] = finite_or_null(partial.sigma(i));
    t["backward_error"] = partial.backward_errors.size() > i
                              ? finite_or_null(partial.backward_errors[i])
                              : Json(nullptr);
    out.push_back(std::move(t));
  }
  return out;
}

inline Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Json col = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) col.push_back(m(i, j));
    out.push_back(std::move(col));
  }
  return out;
}

inline std::size_t bench_threads(std::size_t trials) {
  std::size_t cap = std::thread::hardware_concurrency();
  if (cap == 0) cap = 1;
  if (const char* env = std::getenv("GSVD_ITER_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = std::size_t(v);
  }
  return std::min(cap, trials);
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string a_path, b_path;
  std::string which = "largest";
  std::size_t count = 1;
  std::string algorithm = "gd";
  std::size_t min_dim = 10, max_dim = 30, max_restarts = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  std::string deflation = "restrict";
  std::string seed_vectors_path;  // Matrix Market file of seed columns
  bool vectors = false;           // emit basis vectors in the JSON
};

inline CommandResult cmd_solve(const SolveArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  MatrixPair pair(read_matrix_market(args.a_path), read_matrix_market(args.b_path));

  SolverOptions opts;
  opts.which = detail::parse_which(args.which);
  opts.count = 1;
  opts.min_dim = args.min_dim;
  opts.max_dim = args.max_dim;
  opts.max_restarts = args.max_restarts;
  opts.tol = args.tol;
  opts.seed = args.seed;
  opts.variant = detail::parse_algorithm(args.algorithm);
  opts.deflation = detail::parse_deflation(args.deflation);

  std::optional<Matrix> seeds;
  if (!args.seed_vectors_path.empty()) seeds = densify(*read_matrix_market(args.seed_vectors_path));

  Json out;
  out["schema"] = 1;
  out["command"] = "solve";
  out["options"] = {{"a", args.a_path},
                    {"b", args.b_path},
                    {"which", args.which},
                    {"count", args.count},
                    {"algorithm", args.algorithm},
                    {"min_dim", args.min_dim},
                    {"max_dim", args.max_dim},
                    {"max_restarts", args.max_restarts},
                    {"tol", args.tol},
                    {"seed", args.seed},
                    {"deflation", args.deflation}};

  bool converged = false;
  if (args.count == 1 && !seeds) {
    SolveResult res = opts.variant == Variant::md    ? mdgsvd_solve(pair, opts)
                      : opts.variant == Variant::bb_gd ? bb_gdgsvd_solve(pair, opts)
                                                       : gdgsvd_solve(pair, opts);
    converged = res.converged;
    out["converged"] = res.converged;
    out["triplets"] = detail::triplets_json(res.partial);
    out["mv"] = res.mv;
    out["mv_norm_est"] = res.mv_norm_est;
    out["record"] = detail::record_json(res.record);
    if (args.vectors) {
      out["vectors"] = {{"w", detail::matrix_json(res.partial.w)},
                        {"u", detail::matrix_json(res.partial.u)},
                        {"v", detail::matrix_json(res.partial.v)}};
    }
  } else {
    TgsvdResult res =
        tgsvd_solve(pair, args.count, opts, seeds ? &*seeds : nullptr);
    converged = res.converged;
    PartialGsvd assembled = res.assemble(args.count);
    out["converged"] = res.converged;
    out["triplets"] = detail::triplets_json(assembled);
    out["mv"] = res.mv;
    out["mv_norm_est"] = res.mv_norm_est;
    Json records = Json::array();
    for (const auto& rec : res.records) records.push_back(detail::record_json(rec));
    out["records"] = std::move(records);
    if (args.vectors) {
      out["vectors"] = {{"w", detail::matrix_json(assembled.w)},
                        {"u", detail::matrix_json(assembled.u)},
                        {"v", detail::matrix_json(assembled.v)}};
    }
  }
  out["wall_ms"] = detail::wall_ms_since(t0);
  return {std::move(out), converged ? kExitOk : kExitNotConverged};
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string example = "1";  // 1 | 2a | 2b | 2c | 3a | 3b | 3c | 4
  std::size_t n = 1000;
  std::size_t trials = 25;
  std::string which = "largest";
  std::string algorithm = "gd";
  std::size_t min_dim = 10, max_dim = 30, max_restarts = 100;
  double tol = 1e-6;  // error target against the reference pair
  std::uint64_t seed = 1;
};

inline ProblemInstance bench_instance(const std::string& example, std::size_t n,
                                      std::uint64_t seed) {
  if (example == "1") return gen_diag(n, seed);
  if (example == "2a") return gen_orth(n, 6, seed);
  if (example == "2b") return gen_orth(n, 9, seed);
  if (example == "2c") return gen_orth(n, 12, seed);
  if (example == "3a") return gen_householder(n, 6, seed);
  if (example == "3b") return gen_householder(n, 9, seed);
  if (example == "3c") return gen_householder(n, 12, seed);
  if (example == "4") return gen_sparse_random(n, 1e-1, 1e-2, seed);
  throw std::invalid_argument("unknown example id '" + example + "'");
}

struct BenchOutcome {
  std::vector<std::size_t> mv_per_trial;  // 0 marks a failed trial
  double median_mv = 0.0;
  double ref_c = 0.0, ref_s = 0.0;
  std::size_t failures = 0;
  std::vector<ConvergenceRecord> records;  // per trial, when requested
};

// Median matrix-vector counts until the approximation error against the
// reference pair drops below tol (the iteration keeps going past the
// backward-error test, which is disabled for the measurement).
inline BenchOutcome run_bench(const ProblemInstance& inst, const BenchArgs& args,
                              bool keep_records = false) {
  const Target which = detail::parse_which(args.which);
  const Variant variant = detail::parse_algorithm(args.algorithm);

  double ref_c, ref_s;
  if (inst.exact_c) {
    const std::size_t idx = which == Target::largest ? 0 : inst.exact_c->size() - 1;
    ref_c = (*inst.exact_c)[idx];
    ref_s = (*inst.exact_s)[idx];
  } else {
    // reference from a tight run (generated instances without analytic pairs)
    SolverOptions ref_opts;
    ref_opts.which = which;
    ref_opts.min_dim = args.min_dim;
    ref_opts.max_dim = args.max_dim;
    ref_opts.max_restarts = 2 * args.max_restarts;
    ref_opts.tol = 1e-10;
    ref_opts.seed = args.seed + 97;
    ref_opts.variant = Variant::md;
    SolveResult ref = mdgsvd_solve(inst.pair, ref_opts);
    ref_c = ref.partial.c[0];
    ref_s = ref.partial.s[0];
  }

  BenchOutcome out;
  out.ref_c = ref_c;
  out.ref_s = ref_s;
  out.mv_per_trial.assign(args.trials, 0);
  if (keep_records) out.records.resize(args.trials);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= args.trials) return;
      SolverOptions opts;
      opts.which = which;
      opts.min_dim = args.min_dim;
      opts.max_dim = args.max_dim;
      opts.max_restarts = args.max_restarts;
      opts.tol = 1e-300;  // disabled; the external error test stops the run
      opts.seed = args.seed + 1009 * (t + 1);
      opts.variant = variant;
      opts.external_stop = [&, ref_c, ref_s](const RitzApprox& ritz) {
        return pair_value_gap(ritz.c1, ritz.s1, ref_c, ref_s) < args.tol;
      };
      SolveResult res = variant == Variant::md ? mdgsvd_solve(inst.pair, opts)
                                               : gdgsvd_solve(inst.pair, opts);
      out.mv_per_trial[t] = res.converged ? res.mv : 0;
      if (keep_records) out.records[t] = std::move(res.record);
    }
  };
  const std::size_t nthreads = detail::bench_threads(args.trials);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // failed trials count as +infinity so they weigh on the median instead
  // of silently dropping out
  std::vector<double> all;
  for (std::size_t mv : out.mv_per_trial) {
    if (mv == 0) {
      ++out.failures;
      all.push_back(std::numeric_limits<double>::infinity());
    } else {
      all.push_back(double(mv));
    }
  }
  std::sort(all.begin(), all.end());
  const std::size_t h = all.size() / 2;
  out.median_mv = all.size() % 2 ? all[h] : 0.5 * (all[h - 1] + all[h]);
  return out;
}

inline CommandResult cmd_bench(const BenchArgs& args, std::string csv_path = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemInstance inst = bench_instance(args.example, args.n, args.seed);
  BenchOutcome outcome = run_bench(inst, args);

  Json out;
  out["schema"] = 1;
  out["command"] = "bench";
  out["example"] = args.example;
  out["n"] = args.n;
  out["trials"] = args.trials;
  out["which"] = args.which;
  out["algorithm"] = args.algorithm;
  out["tol"] = args.tol;
  out["seed"] = args.seed;
  out["reference"] = {{"c", outcome.ref_c}, {"s", outcome.ref_s}};
  out["mv_per_trial"] = outcome.mv_per_trial;
  out["median_mv"] = outcome.median_mv;
  out["failures"] = outcome.failures;
  out["wall_ms"] = detail::wall_ms_since(t0);

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error(csv_path + ": cannot open for writing");
    csv << "example,algorithm,which,trial,mv\n";
    for (std::size_t t = 0; t < outcome.mv_per_trial.size(); ++t)
      csv << args.example << "," << args.algorithm << "," << args.which << "," << t << ","
          << outcome.mv_per_trial[t] << "\n";
    csv << args.example << "," << args.algorithm << "," << args.which << ",median,"
        << outcome.median_mv << "\n";
  }
  return {std::move(out), outcome.failures == 0 ? kExitOk : kExitNotConverged};
}

// ---------------------------------------------------------------------------

struct TikhonovArgs {
  std::string problem = "shaw";
  std::size_t n = 256;
  std::size_t pairs = 15;
  double noise = 0.01;
  std::uint64_t seed = 1;
  std::string mode = "first";  // first: converge pair 2; five: pairs 2..6
  std::string algorithm = "md";
  double tol = 1e-6;
  std::size_t min_dim = 15, max_dim = 45, max_restarts = 100;
};

inline CommandResult cmd_tikhonov(const TikhonovArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  if (args.mode != "first" && args.mode != "five")
    throw std::invalid_argument("--mode must be first or five");

  ProblemInstance inst = gen_regu_problem(args.problem, args.n);
  NoisyData noisy = add_noise(*inst.b_clean, args.noise, args.seed + 7);
  const double eta_eps = discrepancy_eta(args.n) * nrm2(noisy.e);

  Matrix seed_basis(args.n, 1);
  for (std::size_t i = 0; i < args.n; ++i) seed_basis(i, 0) = 1.0 / std::sqrt(double(args.n));

  SolverOptions opts;
  opts.which = Target::largest;
  opts.min_dim = args.min_dim;
  opts.max_dim = args.max_dim;
  opts.max_restarts = args.max_restarts;
  opts.tol = args.tol;
  opts.seed = args.seed;
  opts.variant = detail::parse_algorithm(args.algorithm);
  opts.deflation = DeflationMode::restrict_;

  const std::size_t converge_count = args.mode == "first" ? 2 : 6;
  TgsvdResult res = tgsvd_solve(inst.pair, converge_count, opts, &seed_basis);
  PartialGsvd approx = res.assemble(args.pairs);

  // exact reference from the dense factorization
  const Matrix a_dense = static_cast<const DenseOperator&>(*inst.pair.a).matrix();
  const Matrix b_dense = densify(*inst.pair.b);
  DenseGsvd oracle = dense_gsvd(a_dense, b_dense);

  TikhonovProblem prob;
  prob.pair = inst.pair;
  prob.b = noisy.b;
  prob.eta_eps = eta_eps;
  prob.x_star = inst.x_star;

  RegularizedSolution sol = solve_tikhonov(approx, prob);

  FilterTriplets oracle_triplets;
  oracle_triplets.c.assign(oracle.c.begin(), oracle.c.begin() + args.pairs);
  oracle_triplets.s.assign(oracle.s.begin(), oracle.s.begin() + args.pairs);
  oracle_triplets.x = oracle.x.block(0, 0, args.n, args.pairs);
  oracle_triplets.ub.resize(args.pairs);
  for (std::size_t i = 0; i < args.pairs; ++i)
    oracle_triplets.ub[i] = dot(oracle.u.col_vec(i), noisy.b);
  MuSelection oracle_sel = discrepancy_select_mu(oracle_triplets, noisy.b, eta_eps);
  Vector oracle_x = tgsvd_filter_solution(oracle_triplets, oracle_sel.mu);

  auto rel_gap = [](const Vector& a, const Vector& b_ref) {
    Vector d = a;
    axpy(-1.0, b_ref, d);
    return nrm2(d) / nrm2(b_ref);
  };
  auto euclid_sine = [](const Vector& a, const Vector& b_vec) {
    const double cosv =
        std::min(1.0, std::abs(dot(a, b_vec)) / (nrm2(a) * nrm2(b_vec)));
    return std::sqrt(std::max(0.0, 1.0 - cosv * cosv));
  };

  // true data misfit of the reported solution
  Vector misfit = inst.pair.a->apply(sol.x_mu);
  axpy(-1.0, noisy.b, misfit);

  Json out;
  out["schema"] = 1;
  out["command"] = "tikhonov";
  out["problem"] = args.problem;
  out["n"] = args.n;
  out["pairs"] = args.pairs;
  out["mode"] = args.mode;
  out["algorithm"] = args.algorithm;
  out["noise"] = args.noise;
  out["seed"] = args.seed;
  out["tol"] = args.tol;
  out["eta"] = discrepancy_eta(args.n);
  out["eta_eps"] = eta_eps;
  out["converged"] = res.converged;
  out["mu"] = sol.mu;
  out["discrepancy"] = nrm2(misfit);
  out["mu_oracle"] = oracle_sel.mu;
  out["rel_err_vs_xstar"] = sol.rel_err ? Json(*sol.rel_err) : Json(nullptr);
  out["rel_err_vs_exact_tgsvd"] = rel_gap(sol.x_mu, oracle_x);
  out["sin_x2"] = euclid_sine(approx.x_col(1), oracle.x.col_vec(1));
  out["mv"] = res.mv;
  out["mv_norm_est"] = res.mv_norm_est;
  out["pairs_out"] = detail::triplets_json(approx);
  out["wall_ms"] = detail::wall_ms_since(t0);
  return {std::move(out), res.converged ? kExitOk : kExitNotConverged};
}

// ---------------------------------------------------------------------------

inline void emit(const CommandResult& result, const std::string& out_path) {
  const std::string text = result.json.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
    out << text;
  }
}

}  // namespace gsvd::cli

#endif  // GSVD_CLI_HPP
