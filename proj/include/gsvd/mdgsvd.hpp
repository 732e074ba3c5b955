// Multidirectional subspace expansion.  Each iteration appends both
// adjoint images A^T u1 and B^T v1, extracts, and removes the lowest
// quality direction with one Householder reflection per basis (O(nk)
// instead of the O(nk^2) explicit restart).

#ifndef GSVD_MDGSVD_HPP
#define GSVD_MDGSVD_HPP

#include "gsvd/gdgsvd.hpp"

namespace gsvd {

// Reflections aligning the discarded Ritz direction with the last
// coordinate axis of the projected problem.
struct TruncationPlan {
  Reflection p, q, z;
  std::size_t drop_index = 0;
};

inline TruncationPlan plan_truncation(const ProjectedGsvd& g) {
  const std::size_t last = g.size() - 1;
  TruncationPlan plan;
  plan.drop_index = last;
  plan.p = householder_from_target(g.u_t.col_vec(last), last);
  plan.q = householder_from_target(g.v_t.col_vec(last), last);
  plan.z = householder_from_target(g.w_t.col_vec(last), last);
  return plan;
}

// Drop the pair furthest from the target (the last one, given extraction
// ordered toward the target).  Bases are updated by rank-1 reflections;
// the projected factors lose their triangular shape but the state
// invariants A W = U H, B W = V K are preserved.
inline void fast_truncate(SearchState& st, const ProjectedGsvd& g) {
  const std::size_t k = st.dim();
  if (g.size() != k || k < 2) throw dimension_error("fast_truncate: size mismatch");
  TruncationPlan plan = plan_truncation(g);

  apply_reflection_right(st.u, plan.p);
  apply_reflection_right(st.v, plan.q);
  apply_reflection_right(st.w, plan.z);
  apply_reflection_left(st.h, plan.p);
  apply_reflection_right(st.h, plan.z);
  apply_reflection_left(st.k_mat, plan.q);
  apply_reflection_right(st.k_mat, plan.z);

  st.u.drop_last_col();
  st.v.drop_last_col();
  st.w.drop_last_col();
  st.h = st.h.block(0, 0, k - 1, k - 1);
  st.k_mat = st.k_mat.block(0, 0, k - 1, k - 1);
}

// Candidate expansion directions carried between iterations: the raw
// adjoint images of the current best pair, with the pair itself for the
// single-residual fallback.
struct MdCandidates {
  Vector a_dir, b_dir;
  double c1 = 0.0, s1 = 0.0;
  bool fresh_start = true;  // starting vectors, no associated pair yet
};

struct MdExpandReport {
  int appended = 0;
  bool first_dependent = false;
  bool second_dependent = false;
  bool breakdown_substituted = false;
  bool single_residual = false;
};

// Append up to two orthonormalized directions.  With only one free slot
// (dimension max_dim - 1) the combined residual s1 a_dir - c1 b_dir is
// used instead.  Dependent directions are skipped; if everything is
// dependent a random substitute keeps the iteration alive.
inline MdExpandReport md_expand(SearchState& st, const MatrixPair& pair,
                                const MdCandidates& cand, std::size_t max_dim, Rng& rng,
                                std::size_t& mv) {
  MdExpandReport report;
  const std::size_t dim = st.dim();
  if (dim + 2 > max_dim && !cand.fresh_start) {
    // single-slot expansion with the residual direction
    Vector combo(pair.n());
    for (std::size_t i = 0; i < pair.n(); ++i)
      combo[i] = cand.s1 * cand.a_dir[i] - cand.c1 * cand.b_dir[i];
    auto dir = orthonormalize_against(st.w, std::move(combo));
    if (!dir) {
      dir = detail::random_direction_against(st.w, rng);
      report.breakdown_substituted = true;
    }
    append_direction(st, pair, *dir, rng, mv);
    report.appended = 1;
    report.single_residual = true;
    return report;
  }

  auto first = orthonormalize_against(st.w, cand.a_dir);
  if (first) {
    append_direction(st, pair, *first, rng, mv);
    ++report.appended;
  } else {
    report.first_dependent = true;
  }
  auto second = orthonormalize_against(st.w, cand.b_dir);
  if (second) {
    append_direction(st, pair, *second, rng, mv);
    ++report.appended;
  } else {
    report.second_dependent = true;
  }
  if (report.appended == 0) {
    Vector dir = detail::random_direction_against(st.w, rng);
    append_direction(st, pair, dir, rng, mv);
    report.appended = 1;
    report.breakdown_substituted = true;
  }
  return report;
}

inline SolveResult mdgsvd_solve(const MatrixPair& pair, const SolverOptions& opts) {
  detail::validate_options(opts, pair);
  if (opts.count != 1)
    throw std::invalid_argument("mdgsvd_solve computes one pair; use tgsvd_solve for several");
  const GsvdOrder order =
      opts.which == Target::largest ? GsvdOrder::descending_c : GsvdOrder::ascending_c;
  const std::size_t n = pair.n();

  Rng rng(opts.seed + 0x5eedULL);
  PairNorms norms = estimate_pair_norms(pair);

  SolveResult res;
  res.mv_norm_est = norms.mv_used;

  SearchState st;
  MdCandidates cand;
  cand.a_dir = opts.start ? *opts.start : rng.normal_vector(n);
  cand.b_dir = opts.start2 ? *opts.start2 : rng.normal_vector(n);
  cand.fresh_start = true;

  ProjectedGsvd g;
  RitzApprox ritz;
  double bwe = std::numeric_limits<double>::infinity();

  for (std::size_t cycle = 0; cycle <= opts.max_restarts; ++cycle) {
    while (st.dim() < opts.max_dim) {
      MdExpandReport report = md_expand(st, pair, cand, opts.max_dim, rng, res.mv);
      std::tie(g, ritz) = extract(st, order);

      // next candidates and the residual norm come from this extraction
      Vector at_u = pair.a->apply_adjoint(ritz.u1);
      Vector bt_v = pair.b->apply_adjoint(ritz.v1);
      res.mv += 2;
      Vector rdir(n);
      for (std::size_t i = 0; i < n; ++i)
        rdir[i] = ritz.s1 * at_u[i] - ritz.c1 * bt_v[i];
      const double r_dir_norm = nrm2(rdir);

      bwe = backward_error(ritz, r_dir_norm, norms, n);
      res.record.push_back(
          {res.mv, ritz.c1, ritz.s1, ritz.c1 * ritz.s1 * r_dir_norm, bwe});
      if (opts.observer) opts.observer(ritz);
      if (opts.basis_observer) opts.basis_observer(st.w);

      const bool stop_requested = opts.external_stop && opts.external_stop(ritz);
      if (st.dim() >= opts.min_dim && (bwe <= opts.tol || stop_requested)) {
        res.converged = true;
        res.partial = detail::single_pair_partial(ritz, bwe);
        res.final_state = std::move(st);
        res.final_g = std::move(g);
        res.final_ritz = std::move(ritz);
        return res;
      }

      if (report.appended == 2) fast_truncate(st, g);

      cand.a_dir = std::move(at_u);
      cand.b_dir = std::move(bt_v);
      cand.c1 = ritz.c1;
      cand.s1 = ritz.s1;
      cand.fresh_start = false;
    }
    // the loop exits right after a single-residual extraction, so g still
    // matches the state
    thick_restart(st, g, opts.min_dim);
  }

  res.converged = false;
  res.partial = detail::single_pair_partial(ritz, bwe);
  res.final_state = std::move(st);
  res.final_g = std::move(g);
  res.final_ritz = std::move(ritz);
  return res;
}

// ---------------------------------------------------------------------------
// Locally optimal residual-type directions.  Desk-scale diagnostics: the
// columns are materialized, so this is only meant for analysis and tests,
// never inside the iteration.

struct RsMatrices {
  Matrix r;  // n x k, orthogonal to the search space
  Matrix s;  // n x k, orthogonal to both (when defined)
  bool s_defined = false;
};

inline RsMatrices rs_matrices(const SearchState& st, const MatrixPair& pair) {
  const std::size_t k = st.dim();
  Matrix aaw(pair.n(), k), bbw(pair.n(), k);
  for (std::size_t j = 0; j < k; ++j) {
    aaw.set_col(j, pair.a->apply_adjoint(pair.a->apply(st.w.col_vec(j))));
    bbw.set_col(j, pair.b->apply_adjoint(pair.b->apply(st.w.col_vec(j))));
  }
  const Matrix hth = matmul_tn(st.h, st.h);
  const Matrix ktk = matmul_tn(st.k_mat, st.k_mat);
  Matrix m(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) m(i, j) = hth(i, j) + ktk(i, j);

  RsMatrices out;
  out.r = Matrix(pair.n(), k);
  {
    const Matrix mk = lu_solve(m, ktk);
    const Matrix mh = lu_solve(m, hth);
    const Matrix left = matmul(aaw, mk);
    const Matrix right = matmul(bbw, mh);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < pair.n(); ++i)
        out.r(i, j) = left(i, j) - right(i, j);
  }

  const Matrix ra = matmul_tn(out.r, aaw);
  const Matrix rb = matmul_tn(out.r, bbw);
  try {
    Matrix ga(pair.n(), k), gb(pair.n(), k);
    const Matrix wh = matmul(st.w, hth);
    const Matrix wk = matmul(st.w, ktk);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < pair.n(); ++i) {
        ga(i, j) = aaw(i, j) - wh(i, j);
        gb(i, j) = bbw(i, j) - wk(i, j);
      }
    const Matrix sa = lu_solve(ra.transposed(), Matrix::identity(k));
    const Matrix sb = lu_solve(rb.transposed(), Matrix::identity(k));
    const Matrix left = matmul(ga, sa.transposed());
    const Matrix right = matmul(gb, sb.transposed());
    out.s = Matrix(pair.n(), k);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < pair.n(); ++i)
        out.s(i, j) = left(i, j) - right(i, j);
    out.s_defined = true;
  } catch (const singular_pencil_error&) {
    out.s_defined = false;
  }
  return out;
}

}  // namespace gsvd

#endif  // GSVD_MDGSVD_HPP
