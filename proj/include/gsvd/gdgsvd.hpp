// Davidson-type subspace iteration for extremal generalized singular
// values of a matrix pair (A, B).
//
// The solver maintains an orthonormal search basis W together with the
// reduced factorizations A W = U H and B W = V K, extracts approximate
// pairs from the triangular-form GSVD of (H, K), expands with the
// homogeneous-residual direction, and performs thick restarts once the
// basis reaches its maximum dimension.  A B^T B-orthonormal variant that
// works with the SVD of a single projected factor is provided alongside.

#ifndef GSVD_GDGSVD_HPP
#define GSVD_GDGSVD_HPP

#include <functional>

#include "gsvd/dense.hpp"
#include "gsvd/operator.hpp"

namespace gsvd {

enum class Target { largest, smallest };
enum class Variant { gd, bb_gd, md };
enum class DeflationMode { transform, restrict_ };

struct SolverOptions {
  Target which = Target::largest;
  std::size_t count = 1;
  std::size_t min_dim = 10;   // restart dimension
  std::size_t max_dim = 30;   // expansion bound
  std::size_t max_restarts = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  Variant variant = Variant::gd;
  DeflationMode deflation = DeflationMode::restrict_;
  std::optional<Vector> start;   // starting direction (normal random otherwise)
  std::optional<Vector> start2;  // second starting direction (md only)

  // Optional hooks; not part of the numerical contract.
  std::function<bool(const struct RitzApprox&)> external_stop;
  std::function<void(const struct RitzApprox&)> observer;
  std::function<void(const Matrix&)> basis_observer;  // current W (What for bb)
};

struct RitzApprox {
  double c1 = 0.0, s1 = 0.0;  // leading approximate pair, c1^2 + s1^2 = 1
  double r11 = 0.0;
  Vector u1, v1, w1;  // unit approximate singular vectors
  Vector x1;          // right generalized singular vector, w1 / r11

  double sigma() const {
    return s1 == 0.0 ? std::numeric_limits<double>::infinity() : c1 / s1;
  }
};

struct IterationStat {
  std::size_t mv = 0;            // A/B applications consumed so far
  double c1 = 0.0, s1 = 0.0;     // extracted leading pair
  double residual_norm = 0.0;    // |(s1^2 A^T A - c1^2 B^T B) x1|
  double backward_error = 0.0;   // normwise stopping estimate
};

using ConvergenceRecord = std::vector<IterationStat>;

// Converged partial factorization A W = U C R, B W = V S R.
struct PartialGsvd {
  Matrix w, u, v;  // n x d, m x d, p x d (v columns may be zero when s = 0)
  Vector c, s;
  Matrix r;  // d x d upper triangular
  std::vector<double> backward_errors;

  std::size_t size() const { return c.size(); }
  double sigma(std::size_t i) const {
    return s[i] == 0.0 ? std::numeric_limits<double>::infinity() : c[i] / s[i];
  }
  // Right singular vectors X = W R^{-1}, one column per pair.
  Vector x_col(std::size_t i) const {
    Vector e = upper_solve(r, unit(size(), i));
    return matvec(w, e);
  }
  Matrix x() const {
    Matrix out(w.rows(), size());
    for (std::size_t i = 0; i < size(); ++i) out.set_col(i, x_col(i));
    return out;
  }
};

// Cached 1-norm estimates of A^T A and B^T B; constants of the pair.
struct PairNorms {
  double aa = 0.0, bb = 0.0;
  std::size_t mv_used = 0;
};

inline PairNorms estimate_pair_norms(const MatrixPair& pair) {
  PairNorms norms;
  auto gram = [&norms](const OperatorPtr& op) {
    OneNormOperator g;
    g.n = op->cols();
    g.apply = [op, &norms](const Vector& x) {
      norms.mv_used += 2;
      return op->apply_adjoint(op->apply(x));
    };
    g.apply_adjoint = g.apply;  // A^T A is symmetric
    return g;
  };
  norms.aa = one_norm_estimate(gram(pair.a));
  norms.bb = one_norm_estimate(gram(pair.b));
  return norms;
}

// Search state: orthonormal basis W with reduced factorizations
// A W = U H, B W = V K.  H and K start upper triangular and stay so under
// plain expansion; the multidirectional truncation makes them full.
struct SearchState {
  Matrix w;         // n x k
  Matrix u, v;      // m x k, p x k
  Matrix h, k_mat;  // k x k

  std::size_t dim() const { return w.cols(); }
};

namespace detail {

inline void grow_factor(Matrix& f, const Vector& coeff, double diag) {
  const std::size_t k = f.cols();
  Matrix g(k + 1, k + 1);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) g(i, j) = f(i, j);
  for (std::size_t i = 0; i < k; ++i) g(i, k) = coeff[i];
  g(k, k) = diag;
  f = std::move(g);
}

// Append the image vector img to the orthonormal basis q, extending the
// projected factor f.  A numerically dependent image yields an exact zero
// diagonal and a fresh random orthonormal column.
inline void append_image(Matrix& q, Matrix& f, const Vector& img, Rng& rng) {
  Vector wv = img;
  Vector coeff(q.cols(), 0.0);
  double rho = mgs_orthogonalize(q, wv, &coeff);
  if (rho <= kEpsHalf * nrm2(img)) {
    rho = 0.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      wv = rng.normal_vector(q.rows());
      const double nw = mgs_orthogonalize(q, wv, nullptr);
      if (nw > kEpsHalf * std::sqrt(double(q.rows()))) {
        scal(1.0 / nw, wv);
        break;
      }
    }
  } else {
    scal(1.0 / rho, wv);
  }
  q.append_col(wv);
  grow_factor(f, coeff, rho);
}

inline Vector random_direction_against(const Matrix& basis, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vector cand = rng.normal_vector(basis.rows());
    auto dir = orthonormalize_against(basis, std::move(cand));
    if (dir) return *dir;
  }
  throw std::runtime_error("failed to draw a direction outside the search space");
}

}  // namespace detail

// Grow the state by one direction; costs one A and one B application.
inline void append_direction(SearchState& st, const MatrixPair& pair, const Vector& w_new,
                             Rng& rng, std::size_t& mv) {
  if (st.w.rows() == 0) {
    st.w = Matrix(pair.n(), 0);
    st.u = Matrix(pair.m(), 0);
    st.v = Matrix(pair.p(), 0);
    st.h = Matrix(0, 0);
    st.k_mat = Matrix(0, 0);
  }
  st.w.append_col(w_new);
  detail::append_image(st.u, st.h, pair.a->apply(w_new), rng);
  detail::append_image(st.v, st.k_mat, pair.b->apply(w_new), rng);
  mv += 2;
}

// Ritz extraction: triangular-form GSVD of the projected pair, ordered
// toward the target, and the leading approximate singular vectors.
inline std::pair<ProjectedGsvd, RitzApprox> extract(const SearchState& st, GsvdOrder order) {
  if (st.dim() == 0) throw dimension_error("extract: empty search state");
  ProjectedGsvd g = triangular_gsvd(st.h, st.k_mat, order);
  RitzApprox ritz;
  ritz.c1 = g.c_t[0];
  ritz.s1 = g.s_t[0];
  ritz.r11 = g.r_t(0, 0);
  ritz.u1 = matvec(st.u, g.u_t.col_vec(0));
  ritz.v1 = matvec(st.v, g.v_t.col_vec(0));
  ritz.w1 = matvec(st.w, g.w_t.col_vec(0));
  ritz.x1 = ritz.w1;
  if (ritz.r11 != 0.0) scal(1.0 / ritz.r11, ritz.x1);
  return {std::move(g), std::move(ritz)};
}

struct ExpansionVector {
  Vector direction;       // s1 A^T u1 - c1 B^T v1, orthogonal to the basis
  double norm = 0.0;
  bool breakdown = false;  // the direction vanished (converged pair)
};

// Residual-type expansion; costs two adjoint applications.
inline ExpansionVector expansion_vector(const RitzApprox& ritz, const MatrixPair& pair,
                                        std::size_t& mv) {
  Vector at_u = pair.a->apply_adjoint(ritz.u1);
  Vector bt_v = pair.b->apply_adjoint(ritz.v1);
  mv += 2;
  const double scale = ritz.s1 * nrm2(at_u) + ritz.c1 * nrm2(bt_v);
  ExpansionVector out;
  out.direction.resize(pair.n());
  for (std::size_t i = 0; i < pair.n(); ++i)
    out.direction[i] = ritz.s1 * at_u[i] - ritz.c1 * bt_v[i];
  out.norm = nrm2(out.direction);
  out.breakdown = out.norm <= 1e3 * kEps * scale;
  return out;
}

// Normwise backward-error estimate used for stopping:
//   sqrt(n) |r11| |r| / (s1^2 |A^T A|_1 + c1^2 |B^T B|_1),
// where |r| = c1 s1 |expansion direction|.
inline double backward_error(const RitzApprox& ritz, double expansion_norm,
                             const PairNorms& norms, std::size_t n) {
  const double r_norm = ritz.c1 * ritz.s1 * expansion_norm;
  const double denom = ritz.s1 * ritz.s1 * norms.aa + ritz.c1 * ritz.c1 * norms.bb;
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(double(n)) * std::abs(ritz.r11) * r_norm / denom;
}

// Thick restart: keep the leading j pairs of the extracted factorization.
// The retained Ritz values are preserved exactly and no matrix-vector
// products are consumed.
inline void thick_restart(SearchState& st, const ProjectedGsvd& g, std::size_t j) {
  const std::size_t k = st.dim();
  if (j > k) throw dimension_error("thick_restart: keep count exceeds dimension");
  if (j == k) return;
  const Matrix w1 = g.w_t.block(0, 0, k, j);
  const Matrix u1 = g.u_t.block(0, 0, k, j);
  const Matrix v1 = g.v_t.block(0, 0, k, j);
  st.w = matmul(st.w, w1);
  st.u = matmul(st.u, u1);
  st.v = matmul(st.v, v1);
  Matrix h(j, j), k_new(j, j);
  for (std::size_t col = 0; col < j; ++col)
    for (std::size_t row = 0; row <= col; ++row) {
      h(row, col) = g.c_t[row] * g.r_t(row, col);
      k_new(row, col) = g.s_t[row] * g.r_t(row, col);
    }
  st.h = std::move(h);
  st.k_mat = std::move(k_new);
}

struct SolveResult {
  PartialGsvd partial;
  ConvergenceRecord record;
  std::size_t mv = 0;           // A/B applications inside the solve loop
  std::size_t mv_norm_est = 0;  // applications spent on the cached norm estimates
  bool converged = false;

  // Final state for callers that keep iterating (deflation drivers) or
  // harvest additional Ritz pairs.
  SearchState final_state;
  ProjectedGsvd final_g;
  RitzApprox final_ritz;
};

namespace detail {

inline void validate_options(const SolverOptions& opts, const MatrixPair& pair) {
  const std::size_t bound = std::min({pair.n(), pair.m(), pair.p()});
  if (opts.min_dim < 1 || opts.min_dim >= opts.max_dim || opts.max_dim > bound)
    throw std::invalid_argument("solver options: need 1 <= min_dim < max_dim <= min(n,m,p)");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solver options: tol must be positive");
}

inline PartialGsvd single_pair_partial(const RitzApprox& ritz, double bwe) {
  PartialGsvd p;
  p.w = Matrix(ritz.w1.size(), 0);
  p.u = Matrix(ritz.u1.size(), 0);
  p.v = Matrix(ritz.v1.size(), 0);
  p.w.append_col(ritz.w1);
  p.u.append_col(ritz.u1);
  p.v.append_col(ritz.v1);
  p.c = {ritz.c1};
  p.s = {ritz.s1};
  p.r = Matrix(1, 1);
  p.r(0, 0) = ritz.r11;
  p.backward_errors = {bwe};
  return p;
}

}  // namespace detail

// Generalized Davidson iteration for one extremal generalized singular
// pair.  Multi-pair computations go through tgsvd_solve, which locks
// converged triplets by deflation and calls back into this routine.
inline SolveResult gdgsvd_solve(const MatrixPair& pair, const SolverOptions& opts) {
  detail::validate_options(opts, pair);
  if (opts.count != 1)
    throw std::invalid_argument("gdgsvd_solve computes one pair; use tgsvd_solve for several");
  const GsvdOrder order =
      opts.which == Target::largest ? GsvdOrder::descending_c : GsvdOrder::ascending_c;
  const std::size_t n = pair.n();

  Rng rng(opts.seed + 0x5eedULL);
  PairNorms norms = estimate_pair_norms(pair);

  SolveResult res;
  res.mv_norm_est = norms.mv_used;

  SearchState st;
  Vector rdir = opts.start ? *opts.start : rng.normal_vector(n);
  ProjectedGsvd g;
  RitzApprox ritz;
  double bwe = std::numeric_limits<double>::infinity();

  for (std::size_t cycle = 0; cycle <= opts.max_restarts; ++cycle) {
    while (st.dim() < opts.max_dim) {
      auto dir = orthonormalize_against(st.w, rdir);
      if (!dir) dir = detail::random_direction_against(st.w, rng);
      append_direction(st, pair, *dir, rng, res.mv);

      std::tie(g, ritz) = extract(st, order);
      ExpansionVector exp = expansion_vector(ritz, pair, res.mv);
      bwe = backward_error(ritz, exp.norm, norms, n);
      res.record.push_back(
          {res.mv, ritz.c1, ritz.s1, ritz.c1 * ritz.s1 * exp.norm, bwe});
      if (opts.observer) opts.observer(ritz);
      if (opts.basis_observer) opts.basis_observer(st.w);

      const bool stop_requested = opts.external_stop && opts.external_stop(ritz);
      if (st.dim() >= opts.min_dim && (bwe <= opts.tol || stop_requested)) {
        res.converged = bwe <= opts.tol || stop_requested;
        res.partial = detail::single_pair_partial(ritz, bwe);
        res.final_state = std::move(st);
        res.final_g = std::move(g);
        res.final_ritz = std::move(ritz);
        return res;
      }
      rdir = exp.breakdown ? rng.normal_vector(n) : std::move(exp.direction);
    }
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
// B^T B-orthonormal variant.  Maintains a basis What with
// What^T B^T B What = I and Vhat = B What orthonormal, so the projected
// problem is a plain SVD of the triangular factor of A What.

inline SolveResult bb_gdgsvd_solve(const MatrixPair& pair, const SolverOptions& opts) {
  detail::validate_options(opts, pair);
  if (opts.count != 1)
    throw std::invalid_argument("bb_gdgsvd_solve computes one pair at a time");
  const std::size_t n = pair.n();
  const bool want_largest = opts.which == Target::largest;

  Rng rng(opts.seed + 0x5eedULL);
  PairNorms norms = estimate_pair_norms(pair);

  SolveResult res;
  res.mv_norm_est = norms.mv_used;

  Matrix what(n, 0);       // B^T B-orthonormal basis
  Matrix vhat(pair.p(), 0);  // B What, orthonormal
  QrFactor aq;             // A What = Q R
  aq.q = Matrix(pair.m(), 0);
  aq.r = Matrix(0, 0);

  Vector rdir = opts.start ? *opts.start : rng.normal_vector(n);
  Svd svd;
  double sigma1 = 0.0, bwe = std::numeric_limits<double>::infinity();
  RitzApprox ritz;

  auto extract_bb = [&](std::size_t k) -> std::size_t {
    svd = small_svd(aq.r);
    return want_largest ? 0 : k - 1;  // index of the targeted singular value
  };

  for (std::size_t cycle = 0; cycle <= opts.max_restarts; ++cycle) {
    while (what.cols() < opts.max_dim) {
      // Euclidean orthogonalization against What (non-orthonormal basis)
      Vector wv = rdir;
      for (int pass = 0; pass < 2; ++pass) {
        if (what.cols() == 0) break;
        Matrix gram = matmul_tn(what, what);
        Cholesky ch = cholesky(gram);
        if (!ch.ok) throw singular_pencil_error("bb_gdgsvd: basis Gram matrix not SPD");
        Vector coef = chol_solve(ch, matvec_t(what, wv));
        Vector corr = matvec(what, coef);
        for (std::size_t i = 0; i < n; ++i) wv[i] -= corr[i];
      }
      if (nrm2(wv) <= kEpsHalf * nrm2(rdir)) wv = rng.normal_vector(n);

      // B^T B orthogonalization; vv = B wv is maintained alongside
      Vector vv = pair.b->apply(wv);
      res.mv += 1;
      const double v_in = nrm2(vv);
      for (int pass = 0; pass < 2; ++pass) {
        if (vhat.cols() == 0) break;
        Vector coef = matvec_t(vhat, vv);
        Vector wcorr = matvec(what, coef);
        Vector vcorr = matvec(vhat, coef);
        for (std::size_t i = 0; i < n; ++i) wv[i] -= wcorr[i];
        for (std::size_t i = 0; i < vv.size(); ++i) vv[i] -= vcorr[i];
      }
      const double nv = nrm2(vv);
      if (nv <= std::max(kEpsHalf * std::max(v_in, 1e-300), 1e-300))
        throw singular_pencil_error(
            "bb_gdgsvd: B-image collapsed; B^T B is numerically singular "
            "(use the gd variant)");
      scal(1.0 / nv, wv);
      scal(1.0 / nv, vv);
      what.append_col(wv);
      vhat.append_col(vv);

      qr_append(aq, pair.a->apply(wv), rng);
      res.mv += 1;

      const std::size_t k = what.cols();
      const std::size_t idx = extract_bb(k);
      sigma1 = svd.sigma[idx];

      Vector uu = matvec(aq.q, svd.u.col_vec(idx));
      Vector ww = matvec(what, svd.v.col_vec(idx));
      Vector vv1 = matvec(vhat, svd.v.col_vec(idx));

      Vector at_u = pair.a->apply_adjoint(uu);
      Vector bt_v = pair.b->apply_adjoint(vv1);
      res.mv += 2;
      Vector rhat(n);
      for (std::size_t i = 0; i < n; ++i) rhat[i] = at_u[i] - sigma1 * bt_v[i];

      const double r_norm = sigma1 * nrm2(rhat);
      const double w_norm = nrm2(ww);
      bwe = std::sqrt(double(n)) * r_norm /
            ((norms.aa + sigma1 * sigma1 * norms.bb) * std::max(w_norm, 1e-300));

      const double hyp = std::sqrt(1.0 + sigma1 * sigma1);
      ritz.c1 = sigma1 / hyp;
      ritz.s1 = 1.0 / hyp;
      ritz.u1 = uu;
      ritz.v1 = vv1;
      ritz.w1 = ww;
      scal(1.0 / w_norm, ritz.w1);
      ritz.r11 = hyp / w_norm;
      ritz.x1 = ww;
      scal(1.0 / hyp, ritz.x1);
      res.record.push_back({res.mv, ritz.c1, ritz.s1, r_norm, bwe});
      if (opts.observer) opts.observer(ritz);
      if (opts.basis_observer) opts.basis_observer(what);

      const bool stop_requested = opts.external_stop && opts.external_stop(ritz);
      if (k >= opts.min_dim && (bwe <= opts.tol || stop_requested)) {
        res.converged = true;
        res.partial = detail::single_pair_partial(ritz, bwe);
        return res;
      }
      rdir = std::move(rhat);
    }

    // thick restart on the SVD partition of the projected factor
    const std::size_t k = what.cols();
    const std::size_t j = opts.min_dim;
    Matrix u1(k, j), w1(k, j);
    for (std::size_t col = 0; col < j; ++col) {
      const std::size_t src = want_largest ? col : k - j + col;
      u1.set_col(col, svd.u.col_vec(src));
      w1.set_col(col, svd.v.col_vec(src));
    }
    what = matmul(what, w1);
    vhat = matmul(vhat, w1);
    aq.q = matmul(aq.q, u1);
    Matrix sig(j, j);
    for (std::size_t col = 0; col < j; ++col) {
      const std::size_t src = want_largest ? col : k - j + col;
      sig(col, col) = svd.sigma[src];
    }
    aq.r = std::move(sig);
  }

  res.converged = false;
  res.partial = detail::single_pair_partial(ritz, bwe);
  return res;
}

}  // namespace gsvd

#endif  // GSVD_GDGSVD_HPP
