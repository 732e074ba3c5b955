// Deflation of converged generalized singular triplets, by restriction
// (projector wrappers, any shapes) or by transformation (Householder
// wrappers shrinking the problem, m,p >= n), plus the multi-pair driver
// that locks triplets one at a time and assembles a truncated GSVD.

#ifndef GSVD_DEFLATION_HPP
#define GSVD_DEFLATION_HPP

#include "gsvd/gdgsvd.hpp"
#include "gsvd/mdgsvd.hpp"

namespace gsvd {

// Locked triplets A W1 = U1 C1 R11, B W1 = V1 S1 R11.  Columns of u1/v1
// are zero when the corresponding diagonal vanishes (the left vector is
// then undefined; projectors skip zero columns naturally).
struct DeflationSet {
  Matrix u1, v1, w1;
  Vector c1, s1;
  Matrix r11;  // upper triangular couplings
  DeflationMode mode = DeflationMode::restrict_;

  std::size_t size() const { return c1.size(); }

  static DeflationSet empty(const MatrixPair& pair, DeflationMode mode) {
    DeflationSet set;
    set.u1 = Matrix(pair.m(), 0);
    set.v1 = Matrix(pair.p(), 0);
    set.w1 = Matrix(pair.n(), 0);
    set.r11 = Matrix(0, 0);
    set.mode = mode;
    return set;
  }
};

namespace detail {

inline void project_block(const Matrix& block, Vector& v) {
  if (block.empty()) return;
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t j = 0; j < block.cols(); ++j) {
      const double* col = block.col(j);
      double h = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) h += col[i] * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= h * col[i];
    }
}

}  // namespace detail

// Restriction wrappers (I - U1 U1^T) A (I - W1 W1^T) and the B analogue.
// Ambient dimensions are unchanged; the locked directions map to zero.
inline MatrixPair deflate_restrict(const MatrixPair& pair, const DeflationSet& set) {
  if (set.size() == 0) return pair;
  auto a = std::make_shared<RestrictedOperator>(pair.a, set.u1, set.w1);
  auto b = std::make_shared<RestrictedOperator>(pair.b, set.v1, set.w1);
  return MatrixPair(std::move(a), std::move(b));
}

// Transformation deflation of one converged triplet: reflections align
// (u1, v1, w1) with the first axis and the wrapper restricts to the
// trailing block of P A Z / Q B Z.  Dimensions shrink by one.
inline MatrixPair deflate_transform(const MatrixPair& pair, const RitzApprox& triplet,
                                    double tol) {
  if (pair.m() < pair.n() || pair.p() < pair.n())
    throw std::invalid_argument("deflate_transform requires m, p >= n");

  // reject non-converged triplets: the defining relations A w = c r11 u
  // and B w = s r11 v must hold to the tolerance
  Vector aw = pair.a->apply(triplet.w1);
  Vector bw = pair.b->apply(triplet.w1);
  Vector da = aw, db = bw;
  axpy(-triplet.c1 * triplet.r11, triplet.u1, da);
  axpy(-triplet.s1 * triplet.r11, triplet.v1, db);
  const double scale = nrm2(aw) + nrm2(bw) + kEps;
  if (nrm2(da) + nrm2(db) > tol * scale)
    throw std::invalid_argument("deflate_transform: triplet residual above tolerance");

  Reflection p = householder_from_target(triplet.u1, 0);
  Reflection q = householder_from_target(triplet.v1, 0);
  Reflection z = householder_from_target(triplet.w1, 0);
  auto a = std::make_shared<TransformDeflatedOperator>(pair.a, p, z);
  auto b = std::make_shared<TransformDeflatedOperator>(pair.b, q, z);
  return MatrixPair(std::move(a), std::move(b));
}

// Implicit restriction: with the locked vectors occupying the leading
// block of the search state, the approximation of the next pair is read
// off the second partition block, and its right vector picks up a
// correction through the locked couplings.  No deflated-operator
// applications are consumed.
inline RitzApprox locked_extract(const SearchState& st, const DeflationSet& set,
                                 GsvdOrder order) {
  const std::size_t d = set.size();
  if (st.dim() <= d) throw dimension_error("locked_extract: state no larger than locked block");
  ProjectedGsvd g = triangular_gsvd(st.h, st.k_mat, order);

  RitzApprox ritz;
  ritz.c1 = g.c_t[d];
  ritz.s1 = g.s_t[d];
  ritz.r11 = g.r_t(d, d);
  ritz.u1 = matvec(st.u, g.u_t.col_vec(d));
  ritz.v1 = matvec(st.v, g.v_t.col_vec(d));
  ritz.w1 = matvec(st.w, g.w_t.col_vec(d));

  if (d == 0) {
    ritz.x1 = ritz.w1;
    if (ritz.r11 != 0.0) scal(1.0 / ritz.r11, ritz.x1);
    return ritz;
  }

  // correction through the locked couplings: the right vector is
  // W (R^{-1} e_{d+1}) whose leading block is -R11^{-1} R12 / rho
  Vector r12(d);
  for (std::size_t i = 0; i < d; ++i) r12[i] = g.r_t(i, d);
  Vector y;
  try {
    y = upper_solve(g.r_t.block(0, 0, d, d), r12);
  } catch (const singular_pencil_error&) {
    throw singular_pencil_error("locked_extract: locked coupling block is singular");
  }
  const Matrix w1 = g.w_t.block(0, 0, st.dim(), d);
  Vector corr = matvec(st.w, matvec(w1, y));
  ritz.x1.resize(st.w.rows());
  for (std::size_t i = 0; i < ritz.x1.size(); ++i) ritz.x1[i] = ritz.w1[i] - corr[i];
  scal(1.0 / ritz.r11, ritz.x1);
  return ritz;
}

// ---------------------------------------------------------------------------
// Multi-pair driver.

struct TgsvdResult {
  PartialGsvd locked;   // converged (and seeded) pairs, in lock order
  PartialGsvd extras;   // additional leading Ritz pairs from the final state
  std::vector<ConvergenceRecord> records;  // one per converged pair
  std::size_t mv = 0;
  std::size_t mv_norm_est = 0;
  bool converged = false;

  // locked pairs followed by extras, capped at total columns
  PartialGsvd assemble(std::size_t total) const;
};

namespace detail {

struct LockAccumulator {
  DeflationSet set;
  explicit LockAccumulator(const MatrixPair& pair, DeflationMode mode)
      : set(DeflationSet::empty(pair, mode)) {}

  // Append a triplet in original coordinates.  Blocks are
  // re-orthonormalized against the existing locks to stop drift; the new
  // coupling column of r11 is recovered from fresh images of w (2 MVs).
  void lock(const MatrixPair& pair, double c, double s, Vector u, Vector v, Vector w,
            std::size_t& mv) {
    const std::size_t d = set.size();
    project_block(set.w1, w);
    const double wn = nrm2(w);
    if (wn <= kEpsHalf) throw singular_pencil_error("lock: right vector inside locked span");
    scal(1.0 / wn, w);

    Vector aw = pair.a->apply(w);
    Vector bw = pair.b->apply(w);
    mv += 2;

    if (u.empty()) {  // seeded pair: left vector from the fresh image
      u = aw;
      project_block(set.u1, u);
      const double un = nrm2(u);
      if (un > kEpsHalf)
        scal(1.0 / un, u);
      else
        u.assign(pair.m(), 0.0);
    } else if (c != 0.0) {
      project_block(set.u1, u);
      const double un = nrm2(u);
      if (un <= 0.5) throw singular_pencil_error("lock: left A-vector inside locked span");
      scal(1.0 / un, u);
    } else {
      u.assign(pair.m(), 0.0);
    }
    if (v.empty() || s == 0.0) {
      v.assign(pair.p(), 0.0);
    } else {
      project_block(set.v1, v);
      const double vn = nrm2(v);
      if (vn <= 0.5) throw singular_pencil_error("lock: left B-vector inside locked span");
      scal(1.0 / vn, v);
    }

    Vector col(d + 1, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      if (set.c1[i] >= set.s1[i])
        col[i] = dot(set.u1.col_vec(i), aw) / set.c1[i];
      else
        col[i] = dot(set.v1.col_vec(i), bw) / set.s1[i];
    }
    col[d] = c >= s ? dot(u, aw) / c : dot(v, bw) / s;

    Matrix r_new(d + 1, d + 1);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i <= j; ++i) r_new(i, j) = set.r11(i, j);
    for (std::size_t i = 0; i <= d; ++i) r_new(i, d) = col[i];
    set.r11 = std::move(r_new);

    set.u1.append_col(u);
    set.v1.append_col(v);
    set.w1.append_col(w);
    set.c1.push_back(c);
    set.s1.push_back(s);
  }
};

inline PartialGsvd partial_from_set(const DeflationSet& set, std::vector<double> bwe) {
  PartialGsvd p;
  p.w = set.w1;
  p.u = set.u1;
  p.v = set.v1;
  p.c = set.c1;
  p.s = set.s1;
  p.r = set.r11;
  p.backward_errors = std::move(bwe);
  return p;
}

}  // namespace detail

inline PartialGsvd TgsvdResult::assemble(std::size_t total) const {
  const std::size_t d0 = locked.size();
  const std::size_t want = std::min(total, d0 + extras.size());
  PartialGsvd out = locked;
  for (std::size_t i = d0; i < want; ++i) {
    const std::size_t e = i - d0;
    out.w.append_col(extras.w.col_vec(e));
    out.u.append_col(extras.u.col_vec(e));
    out.v.append_col(extras.v.col_vec(e));
    out.c.push_back(extras.c[e]);
    out.s.push_back(extras.s[e]);
    out.backward_errors.push_back(extras.backward_errors[e]);
  }
  // extras.r carries the whole coupling chain (leading block == locked.r)
  Matrix r(want, want);
  for (std::size_t j = 0; j < want; ++j)
    for (std::size_t i = 0; i <= j; ++i)
      r(i, j) = j < d0 ? locked.r(i, j) : extras.r(i, j);
  out.r = std::move(r);
  return out;
}

// Sequentially converge and lock `count` extremal pairs (seeded columns
// count toward it) and harvest the remaining leading Ritz pairs of the
// final search state as approximations.  `seed_b_nullspace` columns are
// locked immediately as exact (1, 0) pairs.
inline TgsvdResult tgsvd_solve(const MatrixPair& pair, std::size_t count, SolverOptions opts,
                               const Matrix* seed_b_nullspace = nullptr) {
  if (count < 1 || count > std::min({pair.n(), pair.m(), pair.p()}))
    throw std::invalid_argument("tgsvd_solve: count out of range");
  if (opts.variant == Variant::bb_gd)
    throw std::invalid_argument("tgsvd_solve supports the gd and md variants");

  TgsvdResult res;
  Rng rng(opts.seed + 0xdefULL);
  detail::LockAccumulator acc(pair, opts.deflation);
  std::vector<double> locked_bwe;

  if (seed_b_nullspace) {
    for (std::size_t j = 0; j < seed_b_nullspace->cols(); ++j) {
      Vector w = seed_b_nullspace->col_vec(j);
      acc.lock(pair, 1.0, 0.0, {}, {}, std::move(w), res.mv);
      locked_bwe.push_back(0.0);
    }
  }
  if (acc.set.size() > count)
    throw std::invalid_argument("tgsvd_solve: more seeds than requested pairs");

  // transformation mode keeps a stack of reflections for lifting
  MatrixPair work = pair;
  std::vector<Reflection> lift_p, lift_q, lift_z;
  auto lift = [&](Vector vec, const std::vector<Reflection>& stack) {
    for (std::size_t lvl = stack.size(); lvl-- > 0;) {
      Vector t(vec.size() + 1, 0.0);
      std::copy(vec.begin(), vec.end(), t.begin() + 1);
      apply_reflection(stack[lvl], t);
      vec = std::move(t);
    }
    return vec;
  };

  SolveResult last;
  bool have_state = false;

  while (acc.set.size() < count) {
    SolverOptions sub = opts;
    sub.count = 1;
    sub.seed = opts.seed + 101 * acc.set.size();
    MatrixPair target =
        opts.deflation == DeflationMode::restrict_ ? deflate_restrict(pair, acc.set) : work;

    // starting directions outside the locked span
    Rng start_rng(sub.seed + 0x5eedULL);
    Vector s0 = sub.start ? *sub.start : start_rng.normal_vector(target.n());
    if (opts.deflation == DeflationMode::restrict_) detail::project_block(acc.set.w1, s0);
    sub.start = std::move(s0);
    if (opts.variant == Variant::md) {
      Vector s1 = sub.start2 ? *sub.start2 : start_rng.normal_vector(target.n());
      if (opts.deflation == DeflationMode::restrict_) detail::project_block(acc.set.w1, s1);
      sub.start2 = std::move(s1);
    }

    SolveResult sr = opts.variant == Variant::md ? mdgsvd_solve(target, sub)
                                                 : gdgsvd_solve(target, sub);
    res.mv += sr.mv;
    res.mv_norm_est += sr.mv_norm_est;
    res.records.push_back(sr.record);

    if (!sr.converged) {
      res.converged = false;
      res.locked = detail::partial_from_set(acc.set, locked_bwe);
      return res;
    }

    RitzApprox ritz = sr.final_ritz;
    Vector u = ritz.u1, v = ritz.v1, w = ritz.w1;
    if (opts.deflation == DeflationMode::transform) {
      u = lift(std::move(u), lift_p);
      v = lift(std::move(v), lift_q);
      w = lift(std::move(w), lift_z);
    }
    acc.lock(pair, ritz.c1, ritz.s1, std::move(u), std::move(v), std::move(w), res.mv);
    locked_bwe.push_back(sr.partial.backward_errors[0]);

    if (opts.deflation == DeflationMode::transform && acc.set.size() < count) {
      lift_p.push_back(householder_from_target(ritz.u1, 0));
      lift_q.push_back(householder_from_target(ritz.v1, 0));
      lift_z.push_back(householder_from_target(ritz.w1, 0));
      auto a = std::make_shared<TransformDeflatedOperator>(work.a, lift_p.back(), lift_z.back());
      auto b = std::make_shared<TransformDeflatedOperator>(work.b, lift_q.back(), lift_z.back());
      work = MatrixPair(std::move(a), std::move(b));
    }

    last = std::move(sr);
    have_state = true;
  }

  res.converged = true;
  res.locked = detail::partial_from_set(acc.set, locked_bwe);

  // extras: leading Ritz pairs of the final state beyond the converged one
  res.extras.w = Matrix(pair.n(), 0);
  res.extras.u = Matrix(pair.m(), 0);
  res.extras.v = Matrix(pair.p(), 0);
  if (have_state && last.final_state.dim() > 1) {
    const SearchState& st = last.final_state;
    const ProjectedGsvd& g = last.final_g;
    detail::LockAccumulator ext = acc;  // continue the coupling chain
    std::size_t appended = 0;
    for (std::size_t i = 1; i < g.size(); ++i) {  // index 0 is the converged pair
      Vector u = matvec(st.u, g.u_t.col_vec(i));
      Vector v = matvec(st.v, g.v_t.col_vec(i));
      Vector w = matvec(st.w, g.w_t.col_vec(i));
      if (opts.deflation == DeflationMode::transform) {
        u = lift(std::move(u), lift_p);
        v = lift(std::move(v), lift_q);
        w = lift(std::move(w), lift_z);
      }
      try {
        ext.lock(pair, g.c_t[i], g.s_t[i], std::move(u), std::move(v), std::move(w), res.mv);
      } catch (const singular_pencil_error&) {
        continue;  // degenerate Ritz direction; skip
      }
      ++appended;
    }
    const std::size_t d0 = acc.set.size();
    res.extras.w = ext.set.w1.block(0, d0, pair.n(), appended);
    res.extras.u = ext.set.u1.block(0, d0, pair.m(), appended);
    res.extras.v = ext.set.v1.block(0, d0, pair.p(), appended);
    res.extras.c.assign(ext.set.c1.begin() + d0, ext.set.c1.end());
    res.extras.s.assign(ext.set.s1.begin() + d0, ext.set.s1.end());
    res.extras.r = ext.set.r11;  // full chain; assemble() slices what it needs
    res.extras.backward_errors.assign(appended, std::numeric_limits<double>::infinity());
  }
  return res;
}

}  // namespace gsvd

#endif  // GSVD_DEFLATION_HPP
