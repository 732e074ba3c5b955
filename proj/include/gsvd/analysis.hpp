// Rayleigh-Ritz error-bound evaluators for the symmetric positive
// definite pencil N x = lambda M x: angles measured in the M-norm
// (computable without a square root of M), and a suite of a-priori and
// residual bounds used by the test harness and the diagnostics output.

#ifndef GSVD_ANALYSIS_HPP
#define GSVD_ANALYSIS_HPP

#include <functional>
#include <string>

#include "gsvd/dense.hpp"

namespace gsvd {

using MApply = std::function<Vector(const Vector&)>;

inline double m_cos(const Vector& w, const Vector& x, const MApply& m_apply) {
  const Vector mw = m_apply(w);
  const Vector mx = m_apply(x);
  const double ww = dot(w, mw), xx = dot(x, mx);
  if (ww <= 0.0 || xx <= 0.0)
    throw singular_pencil_error("m_cos: M-degenerate vector");
  return std::min(1.0, std::abs(dot(w, mx)) / std::sqrt(ww * xx));
}

// Computed through the projection residual, which stays accurate when the
// angle is small.
inline double m_sin(const Vector& w, const Vector& x, const MApply& m_apply) {
  const Vector mw = m_apply(w);
  const double ww = dot(w, mw);
  if (ww <= 0.0) throw singular_pencil_error("m_sin: M-degenerate vector");
  const double coef = dot(w, m_apply(x)) / ww;
  Vector y = x;
  axpy(-coef, w, y);
  const Vector my = m_apply(y);
  const Vector mx = m_apply(x);
  const double xx = dot(x, mx);
  if (xx <= 0.0) throw singular_pencil_error("m_sin: M-degenerate vector");
  return std::min(1.0, std::sqrt(std::max(0.0, dot(y, my)) / xx));
}

inline double m_tan(const Vector& w, const Vector& x, const MApply& m_apply) {
  const double c = m_cos(w, x, m_apply);
  const double s = m_sin(w, x, m_apply);
  return c == 0.0 ? std::numeric_limits<double>::infinity() : s / c;
}

// Angle between a subspace (columns of w) and a vector, via the oblique
// projector with Gram matrix W^T M W solved directly.
inline double m_sin_subspace(const Matrix& w, const Vector& x, const MApply& m_apply) {
  const std::size_t k = w.cols();
  if (k == 0) throw dimension_error("m_sin_subspace: empty basis");
  Matrix mw(w.rows(), k);
  for (std::size_t j = 0; j < k; ++j) mw.set_col(j, m_apply(w.col_vec(j)));
  Matrix gram = matmul_tn(w, mw);
  Cholesky ch = cholesky(gram);
  if (!ch.ok) throw singular_pencil_error("m_sin_subspace: Gram matrix is rank deficient");
  Vector rhs = matvec_t(mw, x);
  Vector a = chol_solve(ch, rhs);
  Vector y = x;
  Vector proj = matvec(w, a);
  axpy(-1.0, proj, y);
  const Vector my = m_apply(y);
  const Vector mx = m_apply(x);
  const double xx = dot(x, mx);
  if (xx <= 0.0) throw singular_pencil_error("m_sin_subspace: M-degenerate vector");
  return std::min(1.0, std::sqrt(std::max(0.0, dot(y, my)) / xx));
}

// |r|_{M^{-1}} via a direct solve (desk scale).
inline double m_inv_norm(const Matrix& m, const Vector& r) {
  Cholesky ch = cholesky(m);
  if (!ch.ok) throw singular_pencil_error("m_inv_norm: M not positive definite");
  Vector y = chol_solve(ch, r);
  return std::sqrt(std::max(0.0, dot(r, y)));
}

// ---------------------------------------------------------------------------

struct PencilSpectrum {
  Vector lambdas;      // descending eigenvalues of (N, M)
  double theta1 = 0.0;  // leading Ritz value of the search space
};

// Angle data the bounds consume; all M-angles unless stated otherwise.
struct BoundInputs {
  double sin_w1_x1 = 0.0;        // leading Ritz vector vs x1
  double tan_w1_x1 = 0.0;
  double sin_W_x1 = 0.0;         // search space vs x1
  double tan_W_x1 = 0.0;
  double delta_w = 0.0;          // min over Ritz vectors of sin_M(w_j, x1)
  double rho_w1 = 0.0;           // |(N - theta1 M) w1|_{M^{-1}}
  double cond_m = 1.0;           // kappa(M)
  double sin_euclid_w1_x1 = 0.0; // plain Euclidean sine, for the sandwich
};

struct BoundCheck {
  std::string name;
  bool applicable = false;
  double lhs = 0.0, rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool holds = true;   // applicable implies slack >= -tolerance
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  bool all_hold = true;
};

inline double asym_rate(double kappa) {
  if (kappa < 1.0) throw std::invalid_argument("asym_rate: kappa >= 1 required");
  const double f = (kappa - 1.0) / (kappa + 1.0);
  return f * f;
}

inline BoundReport bound_suite(const PencilSpectrum& spec, const BoundInputs& in,
                               std::size_t subspace_dim, double tolerance = 1e-10) {
  const std::size_t n = spec.lambdas.size();
  if (n < 2) throw std::invalid_argument("bound_suite: pencil too small");
  const double l1 = spec.lambdas[0];
  const double l2 = spec.lambdas[1];
  const double ln = spec.lambdas[n - 1];
  const double gap12 = l1 - l2;
  const double gap1n = l1 - ln;
  const double theta = spec.theta1;

  BoundReport report;
  auto push = [&](std::string name, bool applicable, double lhs, double rhs) {
    BoundCheck c;
    c.name = std::move(name);
    c.applicable = applicable;
    c.lhs = lhs;
    c.rhs = rhs;
    c.slack = rhs - lhs;
    c.holds = !applicable || c.slack >= -tolerance;
    report.all_hold = report.all_hold && c.holds;
    report.checks.push_back(std::move(c));
  };

  // (i) gap bound on the Ritz vector angle
  push("ritz-angle-gap", gap12 > 0.0, in.sin_w1_x1 * in.sin_w1_x1, (l1 - theta) / gap12);

  // (ii) value error bounded by the subspace angle
  push("value-subspace", true, l1 - theta, gap1n * in.sin_W_x1 * in.sin_W_x1);

  // (iii) corollary: Ritz vector angle bounded by the subspace angle
  push("ritz-angle-subspace", gap12 > 0.0, in.sin_w1_x1 * in.sin_w1_x1,
       gap1n / gap12 * in.sin_W_x1 * in.sin_W_x1);

  // (iv) sharp bound on the best Ritz-vector angle
  {
    const double eps = in.sin_W_x1;
    const double kappa = gap12 > 0.0 ? (l2 - ln) * (l2 - ln) / (gap1n * gap12) : 0.0;
    const double operand = (1.0 - eps * eps) * (1.0 - eps * eps) - kappa * eps * eps;
    const bool applicable = gap12 > 0.0 && gap1n > 0.0 && subspace_dim >= 2 &&
                            subspace_dim <= n - 1 && eps < gap12 / gap1n && operand >= 0.0;
    const double delta2 =
        applicable ? 0.5 * (1.0 + eps * eps) - 0.5 * std::sqrt(operand) : 0.0;
    push("sharp-delta", applicable, in.delta_w * in.delta_w, delta2);
    push("sharp-corollary", applicable, in.sin_w1_x1 * in.sin_w1_x1,
         eps * eps + 0.5 * kappa * in.tan_W_x1 * in.tan_W_x1);
  }

  // (v) sandwich between the M-angle and the Euclidean angle
  {
    const double s2 = in.sin_euclid_w1_x1 * in.sin_euclid_w1_x1;
    const double sm2 = in.sin_w1_x1 * in.sin_w1_x1;
    push("sandwich-lower", true, s2 / in.cond_m, sm2);
    push("sandwich-upper", true, sm2, 0.25 * (in.cond_m + 1.0) * (in.cond_m + 1.0) * s2);
  }

  // (vi) residual bounds, valid when theta1 is closer to lambda1 than to
  // lambda2
  {
    const bool applicable = (l1 - theta) < (theta - l2);
    const double denom = theta - l2;
    push("residual-sine-lower", applicable && gap1n > 0.0, in.rho_w1 / gap1n, in.sin_w1_x1);
    push("residual-tangent-upper", applicable && denom > 0.0, in.tan_w1_x1,
         denom > 0.0 ? in.rho_w1 / denom : 0.0);
    push("residual-value-lower", applicable && gap1n > 0.0, in.rho_w1 * in.rho_w1 / gap1n,
         l1 - theta);
    push("residual-value-upper", applicable && denom > 0.0, l1 - theta,
         denom > 0.0 ? in.rho_w1 * in.rho_w1 / denom : 0.0);
  }

  return report;
}

// Residual-based inclusion bound: some exact pair (c*, s*) satisfies
// |st^2 c*^2 - ct^2 s*^2| <= |X|^2 |r| / |x|.
inline double bauer_fike_gsvd(const Vector& x_approx, const Vector& residual,
                              double x_factor_norm) {
  const double xn = nrm2(x_approx);
  if (xn == 0.0) throw std::invalid_argument("bauer_fike_gsvd: zero vector");
  return x_factor_norm * x_factor_norm * nrm2(residual) / xn;
}

// Left-hand side of the inclusion bound for a candidate exact pair.
inline double pair_value_gap(double c_t, double s_t, double c_star, double s_star) {
  return std::abs(s_t * s_t * c_star * c_star - c_t * c_t * s_star * s_star);
}

}  // namespace gsvd

#endif  // GSVD_ANALYSIS_HPP
