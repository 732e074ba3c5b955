// General-form Tikhonov regularization through a (truncated) GSVD:
// filtered solution assembly, discrepancy-principle parameter selection,
// and the nullspace splitting that eliminates the unpenalized block.

#ifndef GSVD_REGULARIZATION_HPP
#define GSVD_REGULARIZATION_HPP

#include "gsvd/gdgsvd.hpp"

namespace gsvd {

struct TikhonovProblem {
  MatrixPair pair;
  Vector b;            // measured data
  double eta_eps = 0;  // discrepancy target
  std::optional<Vector> x_star;  // exact solution, for error reporting
};

struct RegularizedSolution {
  Vector x_mu;
  double mu = 0.0;
  double discrepancy = 0.0;
  bool bracketed = true;  // the discrepancy target was attainable
  std::optional<double> rel_err;  // vs x_star when available
};

// Generic triplet view used by the filtered sum: (c_i, s_i), the right
// vector x_i, and the coefficient u_i^T b.
struct FilterTriplets {
  Vector c, s;
  Matrix x;       // n x d right singular vectors
  Vector ub;      // u_i^T b

  static FilterTriplets from_partial(const PartialGsvd& partial, const Vector& b) {
    FilterTriplets t;
    t.c = partial.c;
    t.s = partial.s;
    t.x = partial.x();
    t.ub = matvec_t(partial.u, b);
    return t;
  }
};

// x_mu = sum_i c_i / (c_i^2 + mu s_i^2) * x_i * (u_i^T b), over the
// supplied pairs only.  Terms with a vanishing denominator (mu = 0 and
// c_i = 0) are skipped.
inline Vector tgsvd_filter_solution(const FilterTriplets& t, double mu,
                                    std::size_t* skipped = nullptr) {
  if (mu < 0.0) throw std::invalid_argument("tgsvd_filter_solution: mu must be nonnegative");
  const std::size_t n = t.x.rows();
  Vector out(n, 0.0);
  if (skipped) *skipped = 0;
  for (std::size_t i = 0; i < t.c.size(); ++i) {
    const double denom = t.c[i] * t.c[i] + mu * t.s[i] * t.s[i];
    if (denom == 0.0) {
      if (skipped) ++*skipped;
      continue;
    }
    const double f = t.c[i] / denom * t.ub[i];
    const double* xi = t.x.col(i);
    for (std::size_t r = 0; r < n; ++r) out[r] += f * xi[r];
  }
  return out;
}

inline Vector tgsvd_filter_solution(const PartialGsvd& partial, const Vector& b, double mu) {
  return tgsvd_filter_solution(FilterTriplets::from_partial(partial, b), mu);
}

// |A x_mu - b| as a function of mu, evaluated through the triplets:
// A x_i = c_i u_i, so the misfit splits into per-pair terms plus the
// constant component of b outside the span of the u_i.
inline double tgsvd_discrepancy(const FilterTriplets& t, const Vector& b, double mu) {
  double inside = 0.0, captured = 0.0;
  for (std::size_t i = 0; i < t.c.size(); ++i) {
    const double denom = t.c[i] * t.c[i] + mu * t.s[i] * t.s[i];
    const double fc = denom == 0.0 ? 0.0 : t.c[i] * t.c[i] / denom;
    inside += (1.0 - fc) * (1.0 - fc) * t.ub[i] * t.ub[i];
    captured += t.ub[i] * t.ub[i];
  }
  const double outside = std::max(0.0, dot(b, b) - captured);
  return std::sqrt(inside + outside);
}

struct MuSelection {
  double mu = 0.0;
  double discrepancy = 0.0;
  bool bracketed = true;
  int bisections = 0;
};

// Bisection on log mu: the discrepancy is monotone nondecreasing in mu,
// so the target eta_eps is bracketed unless it lies outside the
// attainable range, in which case the nearer boundary is returned with
// the flag cleared.
inline MuSelection discrepancy_select_mu(const FilterTriplets& t, const Vector& b,
                                         double eta_eps) {
  if (!(eta_eps > 0.0)) throw std::invalid_argument("discrepancy target must be positive");
  const double lo_exp = -16.0, hi_exp = 16.0;
  MuSelection sel;

  const double d_lo = tgsvd_discrepancy(t, b, std::pow(10.0, lo_exp));
  const double d_hi = tgsvd_discrepancy(t, b, std::pow(10.0, hi_exp));
  if (eta_eps <= d_lo) {
    sel.mu = std::pow(10.0, lo_exp);
    sel.discrepancy = d_lo;
    sel.bracketed = false;
    return sel;
  }
  if (eta_eps >= d_hi) {
    sel.mu = std::pow(10.0, hi_exp);
    sel.discrepancy = d_hi;
    sel.bracketed = false;
    return sel;
  }

  double lo = lo_exp, hi = hi_exp;
  double mid = 0.0, d_mid = 0.0;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    d_mid = tgsvd_discrepancy(t, b, std::pow(10.0, mid));
    ++sel.bisections;
    if (std::abs(d_mid - eta_eps) <= 1e-8 * eta_eps) break;
    (d_mid < eta_eps ? lo : hi) = mid;
  }
  sel.mu = std::pow(10.0, mid);
  sel.discrepancy = d_mid;
  return sel;
}

inline RegularizedSolution solve_tikhonov(const PartialGsvd& partial,
                                          const TikhonovProblem& prob) {
  FilterTriplets t = FilterTriplets::from_partial(partial, prob.b);
  MuSelection sel = discrepancy_select_mu(t, prob.b, prob.eta_eps);
  RegularizedSolution out;
  out.x_mu = tgsvd_filter_solution(t, sel.mu);
  out.mu = sel.mu;
  out.discrepancy = sel.discrepancy;
  out.bracketed = sel.bracketed;
  if (prob.x_star) {
    Vector diff = out.x_mu;
    axpy(-1.0, *prob.x_star, diff);
    out.rel_err = nrm2(diff) / nrm2(*prob.x_star);
  }
  return out;
}

// Splitting for a penalty with known nullspace: given the penalized
// component x2 (in ambient coordinates, orthogonal to the nullspace
// basis w1), the unpenalized coordinates are recovered from
// y1 = R11^{-1} U1^T (b - A x2), where A W1 = U1 R11 is the thin QR of
// the nullspace image.  Returns x = W1 y1 + x2.
inline Vector split_nullspace_solution(const MatrixPair& pair, const Vector& b,
                                       const Matrix& w1, const Vector& x2) {
  if (w1.cols() == 0) return x2;
  Matrix aw1(pair.m(), w1.cols());
  for (std::size_t j = 0; j < w1.cols(); ++j) aw1.set_col(j, pair.a->apply(w1.col_vec(j)));
  Qr qr = qr_factor(aw1);
  for (std::size_t i = 0; i < w1.cols(); ++i)
    if (qr.r(i, i) == 0.0)
      throw singular_pencil_error("split_nullspace_solution: A is singular on the nullspace");

  Vector resid = b;
  axpy(-1.0, pair.a->apply(x2), resid);
  Vector y1 = upper_solve(qr.r, matvec_t(qr.q, resid));
  Vector x = matvec(w1, y1);
  axpy(1.0, x2, x);
  return x;
}

}  // namespace gsvd

#endif  // GSVD_REGULARIZATION_HPP
