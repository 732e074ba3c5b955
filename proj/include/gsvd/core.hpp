// Small dense linear-algebra toolkit shared by the GSVD solvers: a
// column-major matrix type, BLAS-1 style vector helpers, and a
// reproducible RNG.  Everything here is kept deliberately simple; the
// matrices involved are search-space bases (n x k, k small) and the
// k x k projected factors.

#ifndef GSVD_CORE_HPP
#define GSVD_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsvd {

using Vector = std::vector<double>;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
// Half-precision unit roundoff; threshold below which an orthogonalized
// column is considered numerically dependent.
inline constexpr double kEpsHalf = 1.4901161193847656e-08;  // 2^-26

struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct singular_pencil_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Column-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  double* col(std::size_t j) { return data_.data() + j * rows_; }
  const double* col(std::size_t j) const { return data_.data() + j * rows_; }

  Vector col_vec(std::size_t j) const {
    return Vector(col(j), col(j) + rows_);
  }
  void set_col(std::size_t j, const Vector& v) {
    std::copy(v.begin(), v.end(), col(j));
  }
  void append_col(const Vector& v) {
    if (rows_ == 0) rows_ = v.size();
    if (v.size() != rows_) throw dimension_error("append_col: length mismatch");
    data_.insert(data_.end(), v.begin(), v.end());
    ++cols_;
  }
  void drop_last_col() {
    data_.resize(data_.size() - rows_);
    --cols_;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix out(nr, nc);
    for (std::size_t j = 0; j < nc; ++j)
      for (std::size_t i = 0; i < nr; ++i) out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
  }

  Matrix transposed() const {
    Matrix out(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) out(j, i) = (*this)(i, j);
    return out;
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vector data_;
};

// ---- vector helpers ----

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double nrm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scal(double alpha, Vector& x) {
  for (double& v : x) v *= alpha;
}

inline Vector unit(std::size_t n, std::size_t i) {
  Vector e(n, 0.0);
  e[i] = 1.0;
  return e;
}

// ---- matrix products (small sizes; clarity over blocking) ----

// C = A * B
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw dimension_error("matmul: inner dims");
  Matrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double blj = b(l, j);
      if (blj == 0.0) continue;
      const double* acol = a.col(l);
      double* ccol = c.col(j);
      for (std::size_t i = 0; i < a.rows(); ++i) ccol[i] += acol[i] * blj;
    }
  return c;
}

// C = A^T * B
inline Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw dimension_error("matmul_tn: inner dims");
  Matrix c(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double* acol = a.col(i);
      const double* bcol = b.col(j);
      double s = 0.0;
      for (std::size_t l = 0; l < a.rows(); ++l) s += acol[l] * bcol[l];
      c(i, j) = s;
    }
  return c;
}

// y = A * x
inline Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) throw dimension_error("matvec: dims");
  Vector y(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const double* acol = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += acol[i] * xj;
  }
  return y;
}

// y = A^T * x
inline Vector matvec_t(const Matrix& a, const Vector& x) {
  if (a.rows() != x.size()) throw dimension_error("matvec_t: dims");
  Vector y(a.cols(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double* acol = a.col(j);
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += acol[i] * x[i];
    y[j] = s;
  }
  return y;
}

inline double norm_fro(const Matrix& a) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

inline double max_abs(const Matrix& a) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) s = std::max(s, std::abs(a(i, j)));
  return s;
}

// max |Q^T Q - I|; orthogonality defect of the columns of q.
inline double orthogonality_defect(const Matrix& q) {
  Matrix g = matmul_tn(q, q);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return max_abs(g);
}

// ---- reproducible RNG ----
//
// mt19937_64 with hand-rolled uniform/normal transforms so that streams
// are bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    // xorshift* — small, fast, reproducible
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dULL;
  }

  // uniform on [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0, 1); never returns 0 (safe for logs)
  double uniform_open() {
    double u;
    do { u = uniform(); } while (u == 0.0);
    return u;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  std::uint64_t below(std::uint64_t bound) { return next_u64() % bound; }

  Vector normal_vector(std::size_t n) {
    Vector v(n);
    for (double& x : v) x = normal();
    return v;
  }

  Vector uniform_vector(std::size_t n) {
    Vector v(n);
    for (double& x : v) x = uniform();
    return v;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gsvd

#endif  // GSVD_CORE_HPP
