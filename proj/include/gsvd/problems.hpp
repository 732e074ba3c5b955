// Deterministic problem generators: the synthetic families used by the
// solver benchmarks (diagonal, orthogonally mixed, Householder-composed,
// sparse random with prescribed conditioning) and classic discrete
// ill-posed regularization problems with a first-difference penalty.
// Also houses the desk-scale direct GSVD used as an exact reference.

#ifndef GSVD_PROBLEMS_HPP
#define GSVD_PROBLEMS_HPP

#include <cstring>
#include <functional>
#include <string>

#include "gsvd/operator.hpp"

namespace gsvd {

// Exact factors A = U C R W^T, B = V S R W^T with diagonal R (the
// generated families all have one).
struct ExactGsvdFactors {
  Matrix u, v, w;
  Vector c, s;
  Vector r_diag;
};

struct ProblemInstance {
  MatrixPair pair;
  std::string label;

  // analytic generalized singular pairs, descending sigma, when known
  std::optional<Vector> exact_c, exact_s;
  // singular values of the stacked [A; B] (the scaling diagonal of the
  // generated families), unsorted
  std::optional<Vector> stack_spectrum;
  // full factors, kept at desk scale only
  std::optional<ExactGsvdFactors> exact;

  // regularization data
  std::optional<Vector> b_clean, x_star;
};

namespace detail {

// c_j = (n - j + 1) / (2n), s_j = sqrt(1 - c_j^2), d_j = ceil(j/(n/4)) + r_j
struct DiagCore {
  Vector c, s, d;
};

inline DiagCore diag_core(std::size_t n, Rng& rng) {
  if (n < 4 || n % 4 != 0)
    throw std::invalid_argument("generator needs n >= 4 divisible by 4");
  DiagCore core;
  core.c.resize(n);
  core.s.resize(n);
  core.d.resize(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const double c = double(n - j + 1) / double(2 * n);
    core.c[j - 1] = c;
    core.s[j - 1] = std::sqrt(1.0 - c * c);
    core.d[j - 1] = double((j + n / 4 - 1) / (n / 4)) + rng.uniform();
  }
  return core;
}

inline Vector shifted_d(const Vector& d, int kappa_exp) {
  double dmin = d[0];
  for (double x : d) dmin = std::min(dmin, x);
  Vector out(d.size());
  const double floor = std::pow(10.0, -double(kappa_exp));
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i] - dmin + floor;
  return out;
}

// Haar-like random orthogonal factor: QR of a standard normal matrix with
// the R diagonal sign fixed.
inline Matrix random_orthogonal(std::size_t n, Rng& rng) {
  Matrix g(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) g(i, j) = rng.normal();
  Qr qr = qr_factor(g);
  for (std::size_t j = 0; j < n; ++j)
    if (qr.r(j, j) < 0.0)
      for (std::size_t i = 0; i < n; ++i) qr.q(i, j) = -qr.q(i, j);
  return qr.q;
}

inline Vector random_unit(std::size_t n, Rng& rng) {
  Vector v = rng.normal_vector(n);
  scal(1.0 / nrm2(v), v);
  return v;
}

// A' = A * diag(v) column scaling
inline Matrix scale_cols(Matrix a, const Vector& v) {
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double* col = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) col[i] *= v[j];
  }
  return a;
}

}  // namespace detail

// Diagonal pair A = C D, B = S D.
inline ProblemInstance gen_diag(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  detail::DiagCore core = detail::diag_core(n, rng);
  Vector da(n), db(n);
  for (std::size_t i = 0; i < n; ++i) {
    da[i] = core.c[i] * core.d[i];
    db[i] = core.s[i] * core.d[i];
  }
  ProblemInstance inst;
  inst.pair = MatrixPair(std::make_shared<DiagonalOperator>(da),
                         std::make_shared<DiagonalOperator>(db));
  inst.label = "diag(n=" + std::to_string(n) + ")";
  inst.exact_c = core.c;
  inst.exact_s = core.s;
  inst.stack_spectrum = core.d;
  if (n <= 400) {
    ExactGsvdFactors f;
    f.u = Matrix::identity(n);
    f.v = Matrix::identity(n);
    f.w = Matrix::identity(n);
    f.c = core.c;
    f.s = core.s;
    f.r_diag = core.d;
    inst.exact = std::move(f);
  }
  return inst;
}

// Orthogonally mixed pair A = U C D~ W^T, B = V S D~ W^T.
inline ProblemInstance gen_orth(std::size_t n, int kappa_exp, std::uint64_t seed) {
  Rng rng(seed);
  detail::DiagCore core = detail::diag_core(n, rng);
  Vector dt = detail::shifted_d(core.d, kappa_exp);
  Matrix u = detail::random_orthogonal(n, rng);
  Matrix v = detail::random_orthogonal(n, rng);
  Matrix w = detail::random_orthogonal(n, rng);

  Vector da(n), db(n);
  for (std::size_t i = 0; i < n; ++i) {
    da[i] = core.c[i] * dt[i];
    db[i] = core.s[i] * dt[i];
  }
  Matrix wt = w.transposed();
  Matrix a = matmul(detail::scale_cols(u, da), wt);
  Matrix b = matmul(detail::scale_cols(v, db), wt);

  ProblemInstance inst;
  inst.pair = MatrixPair(std::make_shared<DenseOperator>(std::move(a)),
                         std::make_shared<DenseOperator>(std::move(b)));
  inst.label = "orth(n=" + std::to_string(n) + ",kappa=1e-" + std::to_string(kappa_exp) + ")";
  inst.exact_c = core.c;
  inst.exact_s = core.s;
  inst.stack_spectrum = dt;
  if (n <= 400) {
    ExactGsvdFactors f;
    f.u = u;
    f.v = v;
    f.w = w;
    f.c = core.c;
    f.s = core.s;
    f.r_diag = dt;
    inst.exact = std::move(f);
  }
  return inst;
}

// Householder-composed pair, stored matrix-free.
inline ProblemInstance gen_householder(std::size_t n, int kappa_exp, std::uint64_t seed) {
  Rng rng(seed);
  detail::DiagCore core = detail::diag_core(n, rng);
  Vector dt = detail::shifted_d(core.d, kappa_exp);
  Vector f = detail::random_unit(n, rng);
  Vector g = detail::random_unit(n, rng);
  Vector h = detail::random_unit(n, rng);

  Vector da(n), db(n);
  for (std::size_t i = 0; i < n; ++i) {
    da[i] = core.c[i] * dt[i];
    db[i] = core.s[i] * dt[i];
  }
  auto a_core = std::make_shared<DiagonalOperator>(da);
  auto b_core = std::make_shared<DiagonalOperator>(db);

  ProblemInstance inst;
  inst.pair = MatrixPair(std::make_shared<HouseholderComposedOperator>(f, a_core, h),
                         std::make_shared<HouseholderComposedOperator>(g, b_core, h));
  inst.label = "householder(n=" + std::to_string(n) + ",kappa=1e-" + std::to_string(kappa_exp) + ")";
  inst.exact_c = core.c;
  inst.exact_s = core.s;
  inst.stack_spectrum = dt;
  if (n <= 400) {
    ExactGsvdFactors fac;
    fac.u = reflection_matrix(Reflection{f}, n);
    fac.v = reflection_matrix(Reflection{g}, n);
    fac.w = reflection_matrix(Reflection{h}, n);
    fac.c = core.c;
    fac.s = core.s;
    fac.r_diag = dt;
    inst.exact = std::move(fac);
  }
  return inst;
}

// Sparse random matrix with prescribed density and reciprocal condition
// number.  Entries start as a randomly placed diagonal carrying a
// geometric singular-value profile from 1 down to rc; random plane
// rotations on rows and columns spread the pattern until the density
// target is met.  Rotations leave the singular values untouched, so the
// condition number is exact by construction.
inline OperatorPtr gen_sprand_matrix(std::size_t n, double density, double rc, Rng& rng) {
  if (density <= 0.0 || density > 1.0) throw std::invalid_argument("density in (0,1] required");
  if (rc <= 0.0 || rc > 1.0) throw std::invalid_argument("rc in (0,1] required");

  // rows as sorted (col, value) lists
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  std::vector<std::size_t> rperm(n), cperm(n);
  for (std::size_t i = 0; i < n; ++i) rperm[i] = cperm[i] = i;
  for (std::size_t i = n; i-- > 1;) {
    std::swap(rperm[i], rperm[rng.below(i + 1)]);
    std::swap(cperm[i], cperm[rng.below(i + 1)]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma = n == 1 ? 1.0 : std::pow(rc, double(i) / double(n - 1));
    rows[rperm[i]].push_back({cperm[i], sigma});
  }
  std::size_t nnz = n;
  const std::size_t target = std::size_t(density * double(n) * double(n));

  auto rotate_rows = [&](std::size_t i, std::size_t j, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<std::pair<std::size_t, double>> ri, rj;
    ri.reserve(rows[i].size() + rows[j].size());
    rj.reserve(rows[i].size() + rows[j].size());
    std::size_t a = 0, b = 0;
    while (a < rows[i].size() || b < rows[j].size()) {
      std::size_t col;
      double vi = 0.0, vj = 0.0;
      if (b >= rows[j].size() || (a < rows[i].size() && rows[i][a].first < rows[j][b].first)) {
        col = rows[i][a].first;
        vi = rows[i][a].second;
        ++a;
      } else if (a >= rows[i].size() || rows[j][b].first < rows[i][a].first) {
        col = rows[j][b].first;
        vj = rows[j][b].second;
        ++b;
      } else {
        col = rows[i][a].first;
        vi = rows[i][a].second;
        vj = rows[j][b].second;
        ++a;
        ++b;
      }
      const double ni = c * vi - s * vj;
      const double nj = s * vi + c * vj;
      if (ni != 0.0) ri.push_back({col, ni});
      if (nj != 0.0) rj.push_back({col, nj});
    }
    nnz += ri.size() + rj.size() - rows[i].size() - rows[j].size();
    rows[i] = std::move(ri);
    rows[j] = std::move(rj);
  };

  auto transpose_rows = [&]() {
    std::vector<std::vector<std::pair<std::size_t, double>>> cols(n);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& [j, v] : rows[i]) cols[j].push_back({i, v});
    rows = std::move(cols);
  };

  const std::size_t max_rounds = 64;
  for (std::size_t round = 0; round < max_rounds && nnz < target; ++round) {
    for (std::size_t step = 0; step < n / 2 && nnz < target; ++step) {
      std::size_t i = rng.below(n), j = rng.below(n);
      if (i == j) continue;
      rotate_rows(i, j, rng.uniform() * 6.283185307179586);
    }
    transpose_rows();  // switch between row and column rotations
  }

  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  entries.reserve(nnz);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, v] : rows[i]) entries.emplace_back(i, j, v);
  return std::make_shared<CsrOperator>(n, n, std::move(entries));
}

inline ProblemInstance gen_sparse_random(std::size_t n, double density, double rc,
                                         std::uint64_t seed) {
  Rng rng(seed);
  ProblemInstance inst;
  OperatorPtr a = gen_sprand_matrix(n, density, 1.0, rng);
  OperatorPtr b = gen_sprand_matrix(n, density, rc, rng);
  inst.pair = MatrixPair(std::move(a), std::move(b));
  inst.label = "sprand(n=" + std::to_string(n) + ")";
  return inst;
}

// ---------------------------------------------------------------------------
// Discrete ill-posed problems (midpoint quadrature of the classic first
// kind Fredholm kernels) with the (n-1) x n first-difference penalty.

namespace detail {

inline ProblemInstance quadrature_problem(std::size_t n, const std::string& name, double lo,
                                          double hi, double s_lo, double s_hi,
                                          const std::function<double(double, double)>& kernel,
                                          const std::function<double(double)>& solution) {
  const double ht = (hi - lo) / double(n);
  const double hs = (s_hi - s_lo) / double(n);
  Matrix a(n, n);
  Vector x(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = lo + (double(j) + 0.5) * ht;
    x[j] = solution(t);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = s_lo + (double(i) + 0.5) * hs;
      a(i, j) = ht * kernel(s, t);
    }
  }
  ProblemInstance inst;
  auto a_op = std::make_shared<DenseOperator>(std::move(a));
  inst.b_clean = a_op->apply(x);
  inst.x_star = std::move(x);
  inst.pair = MatrixPair(std::move(a_op), std::make_shared<DifferenceOperator>(n));
  inst.label = name + "(n=" + std::to_string(n) + ")";
  return inst;
}

}  // namespace detail

// Supported names: shaw, baart, deriv2-1, deriv2-2, deriv2-3, gravity-1,
// gravity-2, gravity-3, foxgood, wing, phillips.
inline ProblemInstance gen_regu_problem(const std::string& name, std::size_t n) {
  const double pi = 3.14159265358979323846;
  if (name == "shaw") {
    return detail::quadrature_problem(
        n, name, -pi / 2, pi / 2, -pi / 2, pi / 2,
        [pi](double s, double t) {
          const double u = pi * (std::sin(s) + std::sin(t));
          const double sinc = u == 0.0 ? 1.0 : std::sin(u) / u;
          const double cc = std::cos(s) + std::cos(t);
          return cc * cc * sinc * sinc;
        },
        [](double t) {
          return 2.0 * std::exp(-6.0 * (t - 0.8) * (t - 0.8)) +
                 std::exp(-2.0 * (t + 0.5) * (t + 0.5));
        });
  }
  if (name == "baart") {
    // Simpson in t with exact s-cell integrals of exp(s cos t); the
    // roundoff tail of a plain midpoint rule lands a couple of ranks
    // short of the classic construction
    const double hs = pi / (2.0 * double(n)), ht = pi / double(n);
    auto s_cell = [&](std::size_t i, double co) {
      const double s0 = double(i) * hs, s1 = double(i + 1) * hs;
      if (std::abs(co) < 1e-14) return s1 - s0;
      return (std::exp(s1 * co) - std::exp(s0 * co)) / co;
    };
    Matrix a(n, n);
    Vector x(n);
    const double scale = 1.0 / (3.0 * std::sqrt(2.0));
    for (std::size_t j = 0; j < n; ++j) {
      const double t_mid = (double(j) + 0.5) * ht;
      x[j] = std::sin(t_mid);
      const double co1 = std::cos(double(j) * ht);
      const double co2 = std::cos(t_mid);
      const double co3 = std::cos(double(j + 1) * ht);
      for (std::size_t i = 0; i < n; ++i)
        a(i, j) = scale * (s_cell(i, co1) + 4.0 * s_cell(i, co2) + s_cell(i, co3));
    }
    ProblemInstance inst;
    auto a_op = std::make_shared<DenseOperator>(std::move(a));
    inst.b_clean = a_op->apply(x);
    inst.x_star = std::move(x);
    inst.pair = MatrixPair(std::move(a_op), std::make_shared<DifferenceOperator>(n));
    inst.label = "baart(n=" + std::to_string(n) + ")";
    return inst;
  }
  if (name.rfind("deriv2-", 0) == 0) {
    const int variant = name.back() - '0';
    if (variant < 1 || variant > 3) throw std::invalid_argument("unknown problem " + name);
    auto solution = [variant](double t) {
      if (variant == 1) return t;
      if (variant == 2) return std::exp(t);
      return t < 0.5 ? t : 1.0 - t;
    };
    return detail::quadrature_problem(
        n, name, 0.0, 1.0, 0.0, 1.0,
        [](double s, double t) { return s < t ? s * (t - 1.0) : t * (s - 1.0); }, solution);
  }
  if (name.rfind("gravity-", 0) == 0) {
    const int variant = name.back() - '0';
    if (variant < 1 || variant > 3) throw std::invalid_argument("unknown problem " + name);
    const double depth = 0.25;
    auto solution = [variant, pi](double t) {
      if (variant == 1) return std::sin(pi * t) + 0.5 * std::sin(2.0 * pi * t);
      if (variant == 2) return t < 1.0 / 3.0 ? 2.0 : 1.0;
      return 2.0 * std::min(t, 1.0 - t);
    };
    return detail::quadrature_problem(
        n, name, 0.0, 1.0, 0.0, 1.0,
        [depth](double s, double t) {
          const double d2 = depth * depth + (s - t) * (s - t);
          return depth / (d2 * std::sqrt(d2));
        },
        solution);
  }
  if (name == "foxgood") {
    return detail::quadrature_problem(
        n, name, 0.0, 1.0, 0.0, 1.0,
        [](double s, double t) { return std::sqrt(s * s + t * t); },
        [](double t) { return t; });
  }
  if (name == "wing") {
    return detail::quadrature_problem(
        n, name, 0.0, 1.0, 0.0, 1.0,
        [](double s, double t) { return t * std::exp(-s * t * t); },
        [](double t) { return t > 1.0 / 3.0 && t < 2.0 / 3.0 ? 1.0 : 0.0; });
  }
  if (name == "phillips") {
    auto phi = [pi](double u) {
      return std::abs(u) < 3.0 ? 1.0 + std::cos(pi * u / 3.0) : 0.0;
    };
    return detail::quadrature_problem(
        n, name, -6.0, 6.0, -6.0, 6.0,
        [phi](double s, double t) { return phi(s - t); }, phi);
  }
  throw std::invalid_argument("unknown problem " + name);
}

// Additive Gaussian noise with the realized norm pinned to level * |b|.
struct NoisyData {
  Vector b, e;
};

inline NoisyData add_noise(const Vector& b_clean, double level, std::uint64_t seed) {
  if (!(level > 0.0)) throw std::invalid_argument("noise level must be positive");
  Rng rng(seed);
  NoisyData out;
  out.e = rng.normal_vector(b_clean.size());
  scal(level * nrm2(b_clean) / nrm2(out.e), out.e);
  out.b = b_clean;
  axpy(1.0, out.e, out.b);
  return out;
}

// Discrepancy-principle safety factor: |e| <= eta * eps with probability
// 0.999 for Gaussian noise of expected norm eps.
inline double discrepancy_eta(std::size_t n) {
  return 1.0 + 3.090232 / std::sqrt(2.0 * double(n));
}

// Cheap content hash for determinism checks: probes both operators with a
// fixed vector and hashes the result bytes.
inline std::uint64_t instance_hash(const ProblemInstance& inst) {
  Rng rng(0xabcdef);
  Vector probe = rng.normal_vector(inst.pair.n());
  Vector ya = inst.pair.a->apply(probe);
  Vector yb = inst.pair.b->apply(probe);
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const Vector& v) {
    for (double x : v) {
      std::uint64_t bits;
      static_assert(sizeof bits == sizeof x);
      std::memcpy(&bits, &x, sizeof bits);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xff;
        h *= 1099511628211ULL;
      }
    }
  };
  mix(ya);
  mix(yb);
  return h;
}

// ---------------------------------------------------------------------------
// Desk-scale direct GSVD (stacked QR + CS splitting), the exact reference
// for the truncated-GSVD pipeline.  Pairs come out in descending sigma.

struct DenseGsvd {
  Vector c, s;
  Matrix u;  // m x n
  Matrix v;  // p x n, zero columns where s vanishes
  Matrix w;  // n x n
  Matrix r;  // n x n upper triangular
  Matrix x;  // right singular vectors W R^{-1}

  std::size_t size() const { return c.size(); }
};

inline DenseGsvd dense_gsvd(const Matrix& a, const Matrix& b) {
  const std::size_t m = a.rows(), p = b.rows(), n = a.cols();
  if (b.cols() != n) throw dimension_error("dense_gsvd: column mismatch");
  Matrix stack(m + p, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) stack(i, j) = a(i, j);
    for (std::size_t i = 0; i < p; ++i) stack(m + i, j) = b(i, j);
  }
  Qr sqr = qr_factor(stack);
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(sqr.r(i, i)));
  for (std::size_t i = 0; i < n; ++i)
    if (dmax == 0.0 || std::abs(sqr.r(i, i)) <= 64.0 * kEps * dmax)
      throw singular_pencil_error("dense_gsvd: null(A) and null(B) intersect");

  Matrix q1 = sqr.q.block(0, 0, m, n);
  Matrix q2 = sqr.q.block(m, 0, p, n);

  Svd top = small_svd(q1);
  Vector c = top.sigma;
  for (double& ci : c) ci = std::min(ci, 1.0);
  Matrix z = std::move(top.v);
  Matrix u = std::move(top.u);
  Matrix gz = matmul(q2, z);

  // pairs with c > 1/sqrt(2) are re-resolved through the bottom block,
  // where they are well separated; same splitting as the projected kernel
  std::size_t split = 0;
  while (split < n && c[split] > 0.70710678118654752) ++split;
  if (split > 0) {
    Svd bottom = small_svd(gz.block(0, 0, p, split));
    const std::size_t rank_b = std::min<std::size_t>(split, p);
    // right factor of the block in natural order; columns beyond the
    // bottom rank (p < n leaves n - p exact-zero pairs) get an orthonormal
    // completion
    Matrix zb_nat(split, split);
    for (std::size_t j = 0; j < rank_b; ++j) zb_nat.set_col(j, bottom.v.col_vec(j));
    for (std::size_t j = rank_b; j < split; ++j) gsvd::detail::complete_column(zb_nat, j);
    Matrix zb(split, split);
    for (std::size_t j = 0; j < split; ++j)
      zb.set_col(j, zb_nat.col_vec(split - 1 - j));  // s ascending

    Matrix z_new = matmul(z.block(0, 0, n, split), zb);
    for (std::size_t j = 0; j < split; ++j) {
      z.set_col(j, z_new.col_vec(j));
      const std::size_t src = split - 1 - j;
      Vector col(p, 0.0);
      if (src < rank_b) {
        col = bottom.u.col_vec(src);
        scal(bottom.sigma[src], col);
      }
      gz.set_col(j, col);
      Vector ucol = matvec(q1, z.col_vec(j));
      const double norm = nrm2(ucol);
      if (norm > 16.0 * kEps) {
        scal(1.0 / norm, ucol);
        u.set_col(j, ucol);
      }
    }
  }

  // orthonormalize in order of descending s (reverse of descending c)
  Matrix v(p, n);
  Vector s(n, 0.0);
  for (std::size_t rev = n; rev-- > 0;) {
    Vector col = gz.col_vec(rev);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = n; j-- > rev + 1;) {
        if (s[j] == 0.0) continue;
        const double* vj = v.col(j);
        double h = 0.0;
        for (std::size_t i = 0; i < p; ++i) h += vj[i] * col[i];
        for (std::size_t i = 0; i < p; ++i) col[i] -= h * vj[i];
      }
    const double norm = nrm2(col);
    if (norm > 16.0 * kEps) {
      s[rev] = norm;
      scal(1.0 / norm, col);
      v.set_col(rev, col);
    }  // else: zero column, s stays 0
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (c[i] <= 0.70710678118654752) {
      s[i] = std::sqrt(std::max(0.0, 1.0 - c[i] * c[i]));
    } else {
      s[i] = std::min(s[i], 1.0);
      c[i] = std::sqrt(std::max(0.0, 1.0 - s[i] * s[i]));
    }
  }

  Matrix f = matmul_tn(z, sqr.r);
  Rq rq = rq_factor(f);

  DenseGsvd out;
  out.c = std::move(c);
  out.s = std::move(s);
  out.u = std::move(u);
  out.v = std::move(v);
  out.w = rq.q.transposed();
  out.r = std::move(rq.r);
  out.x = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j)
    out.x.set_col(j, matvec(out.w, upper_solve(out.r, unit(n, j))));
  return out;
}

}  // namespace gsvd

#endif  // GSVD_PROBLEMS_HPP
