// Dense kernels for the projected problems: incremental Gram-Schmidt QR,
// Householder reflections, one-sided Jacobi SVD, a symmetric Jacobi
// eigensolver, Cholesky, QR/RQ factorizations, the triangular-form GSVD
// of a small matrix pair, and a block 1-norm estimator.
//
// All routines operate on k x k (or n x k with small k) matrices and are
// pure functions on owned data.

#ifndef GSVD_DENSE_HPP
#define GSVD_DENSE_HPP

#include <cassert>
#include <functional>
#include <optional>
#include <utility>

#include "gsvd/core.hpp"

namespace gsvd {

// ---------------------------------------------------------------------------
// Incremental QR via modified Gram-Schmidt with one unconditional
// reorthogonalization pass.

struct QrFactor {
  Matrix q;  // n x k, orthonormal columns
  Matrix r;  // k x k, upper triangular

  std::size_t dim() const { return q.rows(); }
  std::size_t size() const { return q.cols(); }
};

struct AppendOutcome {
  bool dependent = false;   // post-orthogonalization norm fell below eps_half * |v|
  double input_norm = 0.0;
  double residual_norm = 0.0;
};

namespace detail {

// Orthogonalize v in place against the columns of q (MGS, two passes),
// accumulating coefficients into coeff when provided.
inline double mgs_orthogonalize(const Matrix& q, Vector& v, Vector* coeff) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < q.cols(); ++j) {
      const double* qj = q.col(j);
      double h = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) h += qj[i] * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= h * qj[i];
      if (coeff) (*coeff)[j] += h;
    }
  }
  return nrm2(v);
}

}  // namespace detail

// Append one column to a QR factorization.  When the orthogonalized
// residual is numerically zero the column is flagged dependent: the
// diagonal of r gets an exact zero and q receives a fresh orthonormal
// direction drawn from rng so the factor keeps full column count.
inline AppendOutcome qr_append(QrFactor& f, const Vector& v, Rng& rng) {
  const std::size_t n = f.q.rows() == 0 ? v.size() : f.q.rows();
  if (v.size() != n) throw dimension_error("qr_append: length mismatch");
  const std::size_t k = f.q.cols();
  if (k >= n) throw dimension_error("qr_append: factor already square");

  AppendOutcome out;
  out.input_norm = nrm2(v);

  Vector w = v;
  Vector h(k, 0.0);
  double rho = detail::mgs_orthogonalize(f.q, w, &h);
  out.residual_norm = rho;
  out.dependent = rho <= kEpsHalf * out.input_norm;

  if (out.dependent) {
    rho = 0.0;
    // replacement direction; keeps q orthonormal, contributes nothing to r
    for (int attempt = 0; attempt < 64; ++attempt) {
      w = rng.normal_vector(n);
      const double nw = detail::mgs_orthogonalize(f.q, w, nullptr);
      if (nw > kEpsHalf * std::sqrt(double(n))) {
        scal(1.0 / nw, w);
        break;
      }
    }
  } else {
    scal(1.0 / rho, w);
  }

  // grow r by one column and one (implicit zero) row
  Matrix r_new(k + 1, k + 1);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i <= j; ++i) r_new(i, j) = f.r(i, j);
  for (std::size_t i = 0; i < k; ++i) r_new(i, k) = h[i];
  r_new(k, k) = rho;

  f.q.append_col(w);
  f.r = std::move(r_new);
  return out;
}

// Orthonormalize v against an explicit basis; returns the unit residual
// direction, or nullopt when v is numerically inside the span.
inline std::optional<Vector> orthonormalize_against(const Matrix& basis, Vector v) {
  const double nv = nrm2(v);
  const double rho = detail::mgs_orthogonalize(basis, v, nullptr);
  if (nv == 0.0 || rho <= kEpsHalf * nv) return std::nullopt;
  scal(1.0 / rho, v);
  return v;
}

// ---------------------------------------------------------------------------
// Householder reflection mapping a pivot axis onto a target unit vector.

struct Reflection {
  Vector z;  // empty means identity
  bool identity() const { return z.empty(); }
};

// Build z with (I - 2 z z^T / z^T z) e_pivot = w for unit w.  Near-identity
// targets (|w - e_pivot| < 1e-8) degenerate to the identity marker.
inline Reflection householder_from_target(const Vector& w, std::size_t pivot) {
  const double nw = nrm2(w);
  if (std::abs(nw - 1.0) > 1e-12)
    throw std::invalid_argument("householder_from_target: target not unit");
  if (pivot >= w.size())
    throw std::invalid_argument("householder_from_target: pivot out of range");
  Vector z(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) z[i] = -w[i];
  z[pivot] += 1.0;
  if (nrm2(z) < 1e-8) return Reflection{};
  return Reflection{std::move(z)};
}

inline void apply_reflection(const Reflection& refl, Vector& v) {
  if (refl.identity()) return;
  const double zz = dot(refl.z, refl.z);
  const double a = 2.0 * dot(refl.z, v) / zz;
  axpy(-a, refl.z, v);
}

// m <- m * (I - 2 z z^T / z^T z): rank-1 update of the columns.
inline void apply_reflection_right(Matrix& m, const Reflection& refl) {
  if (refl.identity()) return;
  const Vector& z = refl.z;
  const double zz = dot(z, z);
  Vector mz(m.rows(), 0.0);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double zj = z[j];
    if (zj == 0.0) continue;
    const double* cj = m.col(j);
    for (std::size_t i = 0; i < m.rows(); ++i) mz[i] += cj[i] * zj;
  }
  scal(2.0 / zz, mz);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double zj = z[j];
    if (zj == 0.0) continue;
    double* cj = m.col(j);
    for (std::size_t i = 0; i < m.rows(); ++i) cj[i] -= mz[i] * zj;
  }
}

// m <- (I - 2 z z^T / z^T z) * m
inline void apply_reflection_left(Matrix& m, const Reflection& refl) {
  if (refl.identity()) return;
  const Vector& z = refl.z;
  const double zz = dot(z, z);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double* cj = m.col(j);
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += z[i] * cj[i];
    s *= 2.0 / zz;
    for (std::size_t i = 0; i < m.rows(); ++i) cj[i] -= s * z[i];
  }
}

inline Matrix reflection_matrix(const Reflection& refl, std::size_t n) {
  Matrix m = Matrix::identity(n);
  apply_reflection_left(m, refl);
  return m;
}

// ---------------------------------------------------------------------------
// Householder QR (thin) of a general m x n matrix, m >= n not required.

struct Qr {
  Matrix q;  // m x min(m,n)
  Matrix r;  // min(m,n) x n, upper trapezoidal
};

inline Qr qr_factor(const Matrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  const std::size_t k = std::min(m, n);
  Matrix r = a;
  std::vector<Vector> vs;
  vs.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    // Householder vector for column j below the diagonal
    double alpha = 0.0;
    for (std::size_t i = j; i < m; ++i) alpha += r(i, j) * r(i, j);
    alpha = std::sqrt(alpha);
    Vector v(m, 0.0);
    if (alpha > 0.0) {
      const double beta = r(j, j) >= 0.0 ? -alpha : alpha;
      for (std::size_t i = j; i < m; ++i) v[i] = r(i, j);
      v[j] -= beta;
      const double vv = dot(v, v);
      if (vv > 0.0) {
        for (std::size_t c = j; c < n; ++c) {
          double s = 0.0;
          for (std::size_t i = j; i < m; ++i) s += v[i] * r(i, c);
          s *= 2.0 / vv;
          for (std::size_t i = j; i < m; ++i) r(i, c) -= s * v[i];
        }
      }
      r(j, j) = beta;
      for (std::size_t i = j + 1; i < m; ++i) r(i, j) = 0.0;
    }
    vs.push_back(std::move(v));
  }
  // accumulate thin Q by applying reflectors to the leading k identity cols
  Matrix q(m, k);
  for (std::size_t j = 0; j < k; ++j) q(j, j) = 1.0;
  for (std::size_t j = k; j-- > 0;) {
    const Vector& v = vs[j];
    const double vv = dot(v, v);
    if (vv == 0.0) continue;
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < m; ++i) s += v[i] * q(i, c);
      s *= 2.0 / vv;
      for (std::size_t i = j; i < m; ++i) q(i, c) -= s * v[i];
    }
  }
  Matrix r_out(k, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < std::min(k, j + 1); ++i) r_out(i, j) = r(i, j);
  return {std::move(q), std::move(r_out)};
}

// RQ factorization f = r * q with r upper triangular (nonnegative
// diagonal) and q orthogonal; square inputs only.
struct Rq {
  Matrix r;
  Matrix q;
};

inline Rq rq_factor(const Matrix& f) {
  const std::size_t k = f.rows();
  if (f.cols() != k) throw dimension_error("rq_factor: square input required");
  // reverse rows, transpose, QR, undo
  Matrix g(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) g(j, i) = f(k - 1 - i, j);  // g = (J f)^T
  Qr qr = qr_factor(g);
  Matrix r(k, k), q(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      q(i, j) = qr.q(j, k - 1 - i);                    // q = J qhat^T
      if (i <= j) r(i, j) = qr.r(k - 1 - j, k - 1 - i);  // r = J rhat^T J
    }
  // sign-fix: nonnegative diagonal of r, signs absorbed into q
  for (std::size_t i = 0; i < k; ++i) {
    if (r(i, i) < 0.0) {
      for (std::size_t l = 0; l <= i; ++l) r(l, i) = -r(l, i);
      for (std::size_t j = 0; j < k; ++j) q(i, j) = -q(i, j);
    }
  }
  return {std::move(r), std::move(q)};
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD.  Accurate for the small factors used here; m >= n
// is handled directly and m < n via the transpose.

struct Svd {
  Matrix u;      // m x n (thin)
  Vector sigma;  // descending, nonnegative
  Matrix v;      // n x n
};

namespace detail {

// deterministic orthonormal completion of column j of u against the
// columns in (j, end)
inline void complete_column_suffix(Matrix& u, std::size_t j, std::size_t end) {
  const std::size_t m = u.rows();
  Vector best;
  double best_norm = -1.0;
  for (std::size_t basis = 0; basis < m; ++basis) {
    Vector w = unit(m, basis);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t c = j + 1; c < end; ++c) {
        const double* qc = u.col(c);
        double h = 0.0;
        for (std::size_t i = 0; i < m; ++i) h += qc[i] * w[i];
        for (std::size_t i = 0; i < m; ++i) w[i] -= h * qc[i];
      }
    const double nw = nrm2(w);
    if (nw > 0.7) {
      scal(1.0 / nw, w);
      u.set_col(j, w);
      return;
    }
    if (nw > best_norm) {
      best_norm = nw;
      best = std::move(w);
    }
  }
  scal(1.0 / best_norm, best);
  u.set_col(j, best);
}

// deterministic orthonormal completion of column j of u against cols < j
inline void complete_column(Matrix& u, std::size_t j) {
  const std::size_t m = u.rows();
  Vector best;
  double best_norm = -1.0;
  for (std::size_t basis = 0; basis < m; ++basis) {
    Vector w = unit(m, basis);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t c = 0; c < j; ++c) {
        const double* qc = u.col(c);
        double h = 0.0;
        for (std::size_t i = 0; i < m; ++i) h += qc[i] * w[i];
        for (std::size_t i = 0; i < m; ++i) w[i] -= h * qc[i];
      }
    const double nw = nrm2(w);
    if (nw > 0.7) {  // good enough, stop scanning
      scal(1.0 / nw, w);
      u.set_col(j, w);
      return;
    }
    if (nw > best_norm) {
      best_norm = nw;
      best = std::move(w);
    }
  }
  scal(1.0 / best_norm, best);
  u.set_col(j, best);
}

}  // namespace detail

inline Svd small_svd(const Matrix& a) {
  if (a.rows() < a.cols()) {
    Svd t = small_svd(a.transposed());
    return Svd{std::move(t.v), std::move(t.sigma), std::move(t.u)};
  }
  const std::size_t m = a.rows(), n = a.cols();
  Matrix g = a;
  Matrix v = Matrix::identity(n);

  const int max_sweeps = 42;
  const double tol = 1e-15;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        const double* gp = g.col(p);
        const double* gq = g.col(q);
        for (std::size_t i = 0; i < m; ++i) {
          app += gp[i] * gp[i];
          aqq += gq[i] * gq[i];
          apq += gp[i] * gq[i];
        }
        if (std::abs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        double* gpm = g.col(p);
        double* gqm = g.col(q);
        for (std::size_t i = 0; i < m; ++i) {
          const double x = gpm[i], y = gqm[i];
          gpm[i] = c * x - s * y;
          gqm[i] = s * x + c * y;
        }
        double* vp = v.col(p);
        double* vq = v.col(q);
        for (std::size_t i = 0; i < n; ++i) {
          const double x = vp[i], y = vq[i];
          vp[i] = c * x - s * y;
          vq[i] = s * x + c * y;
        }
      }
    if (!rotated) break;
  }

  Vector sigma(n);
  Matrix u(m, n);
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) {
    sigma[j] = nrm2(g.col_vec(j));
    order[j] = j;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  Svd out;
  out.sigma.resize(n);
  out.u = Matrix(m, n);
  out.v = Matrix(n, n);
  const double smax = sigma.empty() ? 0.0 : sigma[order[0]];
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.sigma[j] = sigma[src];
    out.v.set_col(j, v.col_vec(src));
    if (sigma[src] > smax * n * kEps && sigma[src] > 0.0) {
      Vector col = g.col_vec(src);
      scal(1.0 / sigma[src], col);
      out.u.set_col(j, col);
    } else {
      detail::complete_column(out.u, j);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symmetric Jacobi eigensolver (descending eigenvalues) and Cholesky.

struct SymEig {
  Vector lambda;   // descending
  Matrix vectors;  // columns
};

inline SymEig sym_eig(Matrix a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw dimension_error("sym_eig: square input required");
  Matrix v = Matrix::identity(n);
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    double diag = 0.0;
    for (std::size_t p = 0; p < n; ++p) diag = std::max(diag, std::abs(a(p, p)));
    if (off <= 1e-15 * std::max(diag, 1e-300)) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-18 * std::max(diag, 1e-300)) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double x = a(i, p), y = a(i, q);
          a(i, p) = c * x - s * y;
          a(i, q) = s * x + c * y;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double x = a(p, i), y = a(q, i);
          a(p, i) = c * x - s * y;
          a(q, i) = s * x + c * y;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double x = v(i, p), y = v(i, q);
          v(i, p) = c * x - s * y;
          v(i, q) = s * x + c * y;
        }
      }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymEig out;
  out.lambda.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.lambda[j] = a(order[j], order[j]);
    out.vectors.set_col(j, v.col_vec(order[j]));
  }
  return out;
}

struct Cholesky {
  Matrix l;  // lower triangular, a = l l^T
  bool ok = false;
};

inline Cholesky cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  Cholesky out;
  out.l = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= out.l(j, k) * out.l(j, k);
    if (d <= 0.0) return out;  // ok stays false
    out.l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= out.l(i, k) * out.l(j, k);
      out.l(i, j) = s / out.l(j, j);
    }
  }
  out.ok = true;
  return out;
}

inline Vector chol_solve(const Cholesky& ch, Vector b) {
  const std::size_t n = ch.l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= ch.l(i, k) * b[k];
    b[i] /= ch.l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= ch.l(k, i) * b[k];
    b[i] /= ch.l(i, i);
  }
  return b;
}

// Back-substitution x = r^{-1} b for upper-triangular r.
inline Vector upper_solve(const Matrix& r, Vector b) {
  const std::size_t n = r.rows();
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= r(i, k) * b[k];
    if (r(i, i) == 0.0) throw singular_pencil_error("upper_solve: zero pivot");
    b[i] /= r(i, i);
  }
  return b;
}

// X = A^{-1} B by Gaussian elimination with partial pivoting.
inline Matrix lu_solve(Matrix a, Matrix b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n) throw dimension_error("lu_solve: dims");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (a(piv, col) == 0.0) throw singular_pencil_error("lu_solve: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = a(i, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(col, j);
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = b(col, j);
      for (std::size_t k = col + 1; k < n; ++k) s -= a(col, k) * b(k, j);
      b(col, j) = s / a(col, col);
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Triangular-form GSVD of a small pair (h, k): h = u_t C r_t w_t^T and
// k = v_t S r_t w_t^T with orthogonal u_t, v_t, w_t, nonnegative diagonals
// satisfying C^2 + S^2 = I, and upper-triangular r_t.
//
// Route: QR of the stacked [h; k], CS-style splitting of the orthonormal
// factor, RQ split of the remaining square factor.  The pair (c_i, s_i) is
// always read off the smaller of the two blocks to avoid cancellation.

enum class GsvdOrder { descending_c, ascending_c };

struct ProjectedGsvd {
  Matrix u_t, v_t, w_t;  // k x k orthogonal
  Vector c_t, s_t;       // nonnegative diagonals, c^2 + s^2 = 1
  Matrix r_t;            // k x k upper triangular, nonnegative diagonal
  GsvdOrder order = GsvdOrder::descending_c;

  std::size_t size() const { return c_t.size(); }
  double sigma(std::size_t i) const {
    return s_t[i] == 0.0 ? std::numeric_limits<double>::infinity() : c_t[i] / s_t[i];
  }
};

inline ProjectedGsvd reorder_gsvd(const ProjectedGsvd& g, const std::vector<std::size_t>& perm);

namespace detail {

// Sign canonicalization: flip (u, v, w) columns jointly so the dominant
// entry of each w column is positive.  r_t transforms as D r_t D, which
// keeps it upper triangular with the same nonnegative diagonal.
inline void canonicalize_signs(ProjectedGsvd& g) {
  const std::size_t k = g.size();
  std::vector<double> d(k, 1.0);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < k; ++i)
      if (std::abs(g.w_t(i, j)) > std::abs(g.w_t(arg, j))) arg = i;
    if (g.w_t(arg, j) < 0.0) d[j] = -1.0;
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (d[j] < 0.0)
      for (std::size_t i = 0; i < k; ++i) {
        g.u_t(i, j) = -g.u_t(i, j);
        g.v_t(i, j) = -g.v_t(i, j);
        g.w_t(i, j) = -g.w_t(i, j);
      }
    for (std::size_t i = 0; i <= j; ++i) g.r_t(i, j) *= d[i] * d[j];
  }
}

}  // namespace detail

inline ProjectedGsvd triangular_gsvd(const Matrix& h, const Matrix& k_mat,
                                     GsvdOrder order = GsvdOrder::descending_c) {
  const std::size_t k = h.cols();
  if (h.rows() != k || k_mat.rows() != k || k_mat.cols() != k)
    throw dimension_error("triangular_gsvd: square factors of equal size required");
  if (k == 0) throw dimension_error("triangular_gsvd: empty input");

  // stacked QR
  Matrix stack(2 * k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      stack(i, j) = h(i, j);
      stack(k + i, j) = k_mat(i, j);
    }
  Qr sqr = qr_factor(stack);
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    dmax = std::max(dmax, std::abs(sqr.r(i, i)));
    dmin = std::min(dmin, std::abs(sqr.r(i, i)));
  }
  if (dmax == 0.0 || dmin <= 64.0 * kEps * dmax)
    throw singular_pencil_error(
        "triangular_gsvd: stacked factor is numerically rank deficient "
        "(null(A) and null(B) intersect)");

  Matrix q1 = sqr.q.block(0, 0, k, k);
  Matrix q2 = sqr.q.block(k, 0, k, k);

  // CS split: the SVD of the top block fixes the shared right factor z and
  // the large c values; every pair with c > 1/sqrt(2) is then re-resolved
  // through the SVD of the bottom block, where those pairs are well
  // separated (on the top side their c values collapse against 1 and the
  // right factor cannot distinguish them).
  Svd top = small_svd(q1);
  Vector c = top.sigma;
  for (double& ci : c) ci = std::min(ci, 1.0);
  Matrix z = std::move(top.v);
  Matrix u_t = std::move(top.u);
  Matrix gz = matmul(q2, z);

  std::size_t split = 0;
  while (split < k && c[split] > 0.70710678118654752) ++split;
  if (split > 0) {
    Svd bottom = small_svd(gz.block(0, 0, k, split));
    Matrix zb(split, split);  // reversed columns: s ascending across the block
    for (std::size_t j = 0; j < split; ++j) zb.set_col(j, bottom.v.col_vec(split - 1 - j));
    Matrix z_new = matmul(z.block(0, 0, k, split), zb);
    for (std::size_t j = 0; j < split; ++j) {
      z.set_col(j, z_new.col_vec(j));
      // exact product with the rotated right factor
      Vector col = bottom.u.col_vec(split - 1 - j);
      scal(bottom.sigma[split - 1 - j], col);
      gz.set_col(j, col);
      // left factor renormalized through the well-conditioned c
      Vector ucol = matvec(q1, z.col_vec(j));
      const double norm = nrm2(ucol);
      if (norm > 16.0 * kEps) {
        scal(1.0 / norm, ucol);
        u_t.set_col(j, ucol);
      }
    }
  }

  // orthonormalize the bottom columns largest-first; their norms are the
  // small diagonals
  Matrix v_t(k, k);
  Vector s(k, 0.0);
  for (std::size_t rev = k; rev-- > 0;) {
    Vector col = gz.col_vec(rev);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = k; j-- > rev + 1;) {
        const double* vj = v_t.col(j);
        double hcoef = 0.0;
        for (std::size_t i = 0; i < k; ++i) hcoef += vj[i] * col[i];
        for (std::size_t i = 0; i < k; ++i) col[i] -= hcoef * vj[i];
      }
    const double norm = nrm2(col);
    s[rev] = norm;
    if (norm > 16.0 * kEps) {
      scal(1.0 / norm, col);
      v_t.set_col(rev, col);
    } else {
      // vanishing s: any direction completing the basis works
      detail::complete_column_suffix(v_t, rev, k);
    }
  }

  // read each pair from its smaller component
  for (std::size_t i = 0; i < k; ++i) {
    if (c[i] <= 0.70710678118654752) {
      s[i] = std::sqrt(std::max(0.0, 1.0 - c[i] * c[i]));
    } else {
      s[i] = std::min(s[i], 1.0);
      c[i] = std::sqrt(std::max(0.0, 1.0 - s[i] * s[i]));
    }
  }

  // remaining square factor splits into triangular x orthogonal
  Matrix f = matmul_tn(z, sqr.r);  // z^T t
  Rq rq = rq_factor(f);

  ProjectedGsvd out;
  out.u_t = std::move(u_t);
  out.v_t = std::move(v_t);
  out.w_t = rq.q.transposed();
  out.c_t = std::move(c);
  out.s_t = std::move(s);
  out.r_t = std::move(rq.r);
  out.order = GsvdOrder::descending_c;
  detail::canonicalize_signs(out);

  if (order == GsvdOrder::ascending_c) {
    std::vector<std::size_t> rev(k);
    for (std::size_t i = 0; i < k; ++i) rev[i] = k - 1 - i;
    out = reorder_gsvd(out, rev);
    out.order = GsvdOrder::ascending_c;
  }
  return out;
}

// Permute the diagonal pairs of a projected GSVD; the triangular factor is
// restored by an RQ split whose orthogonal part is absorbed into w_t.
inline ProjectedGsvd reorder_gsvd(const ProjectedGsvd& g, const std::vector<std::size_t>& perm) {
  const std::size_t k = g.size();
  if (perm.size() != k) throw std::invalid_argument("reorder_gsvd: bad permutation");
  bool is_identity = true;
  std::vector<bool> seen(k, false);
  for (std::size_t i = 0; i < k; ++i) {
    if (perm[i] >= k || seen[perm[i]])
      throw std::invalid_argument("reorder_gsvd: bad permutation");
    seen[perm[i]] = true;
    if (perm[i] != i) is_identity = false;
  }
  if (is_identity) return g;

  ProjectedGsvd out;
  out.order = g.order;
  out.u_t = Matrix(k, k);
  out.v_t = Matrix(k, k);
  out.c_t.resize(k);
  out.s_t.resize(k);
  Matrix pr(k, k);  // P^T r_t: row i of result is row perm[i] of r_t
  for (std::size_t i = 0; i < k; ++i) {
    out.u_t.set_col(i, g.u_t.col_vec(perm[i]));
    out.v_t.set_col(i, g.v_t.col_vec(perm[i]));
    out.c_t[i] = g.c_t[perm[i]];
    out.s_t[i] = g.s_t[perm[i]];
    for (std::size_t j = 0; j < k; ++j) pr(i, j) = g.r_t(perm[i], j);
  }
  Rq rq = rq_factor(pr);
  out.r_t = std::move(rq.r);
  out.w_t = matmul(g.w_t, rq.q.transposed());
  detail::canonicalize_signs(out);
  return out;
}

// ---------------------------------------------------------------------------
// Block 1-norm estimator (Higham-Tisseur style block power method).
// Returns a lower bound, never exceeding the true norm beyond roundoff.

struct OneNormOperator {
  std::size_t n = 0;
  std::function<Vector(const Vector&)> apply;          // x -> M x
  std::function<Vector(const Vector&)> apply_adjoint;  // x -> M^T x
};

inline double one_norm_estimate(const OneNormOperator& m, int t = 2,
                                std::uint64_t seed = 0x1f2e3d4c) {
  const std::size_t n = m.n;
  if (n == 0) throw dimension_error("one_norm_estimate: empty operator");
  t = std::max(1, std::min<int>(t, int(n)));
  Rng rng(seed);

  std::vector<Vector> x(t, Vector(n, 1.0 / double(n)));
  for (int j = 1; j < t; ++j)
    for (std::size_t i = 0; i < n; ++i)
      x[j][i] = (rng.uniform() < 0.5 ? -1.0 : 1.0) / double(n);

  std::vector<char> used(n, 0);
  std::vector<Vector> s_old;
  double est = 0.0;

  const int max_iter = 5;
  for (int iter = 0; iter < max_iter; ++iter) {
    double est_new = 0.0;
    for (int j = 0; j < t; ++j) {
      Vector y = m.apply(x[j]);
      double a1 = 0.0;
      for (double yi : y) a1 += std::abs(yi);
      est_new = std::max(est_new, a1);
      x[j] = std::move(y);  // reuse as sign source
    }
    if (iter > 0 && est_new <= est) break;
    est = std::max(est, est_new);

    std::vector<Vector> s(t, Vector(n));
    for (int j = 0; j < t; ++j)
      for (std::size_t i = 0; i < n; ++i) s[j][i] = x[j][i] >= 0.0 ? 1.0 : -1.0;
    if (!s_old.empty()) {
      bool all_parallel = true;
      for (int j = 0; j < t && all_parallel; ++j) {
        bool parallel = false;
        for (const Vector& so : s_old)
          if (std::abs(dot(s[j], so)) == double(n)) {
            parallel = true;
            break;
          }
        all_parallel = all_parallel && parallel;
      }
      if (all_parallel) break;
    }
    s_old = s;

    Vector h(n, 0.0);
    for (int j = 0; j < t; ++j) {
      Vector z = m.apply_adjoint(s[j]);
      for (std::size_t i = 0; i < n; ++i) h[i] = std::max(h[i], std::abs(z[i]));
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return h[a] > h[b]; });
    int placed = 0;
    bool fresh = false;
    for (std::size_t r = 0; r < n && placed < t; ++r) {
      if (used[idx[r]]) continue;
      x[placed] = unit(n, idx[r]);
      used[idx[r]] = 1;
      ++placed;
      fresh = true;
    }
    if (!fresh) break;
    for (; placed < t; ++placed) x[placed] = x[placed > 0 ? placed - 1 : 0];
  }
  return est;
}

}  // namespace gsvd

#endif  // GSVD_DENSE_HPP
