// Matrix-free linear operators.  An operator exposes forward and adjoint
// application; concrete kinds cover dense and CSR storage, diagonals,
// Householder-composed products, first-difference stencils, and the
// deflation wrappers used by the multi-pair solvers.
//
// Operators are immutable after construction and safe to share across
// threads; apply is reentrant.

#ifndef GSVD_OPERATOR_HPP
#define GSVD_OPERATOR_HPP

#include <memory>
#include <tuple>

#include "gsvd/core.hpp"
#include "gsvd/dense.hpp"

namespace gsvd {

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  virtual const char* kind() const = 0;

  Vector apply(const Vector& x) const {
    if (x.size() != cols_) throw dimension_error("apply: expected length-cols input");
    Vector y(rows_, 0.0);
    do_apply(x.data(), y.data());
    return y;
  }

  Vector apply_adjoint(const Vector& y) const {
    if (y.size() != rows_) throw dimension_error("apply_adjoint: expected length-rows input");
    Vector x(cols_, 0.0);
    do_apply_adjoint(y.data(), x.data());
    return x;
  }

 protected:
  LinearOperator(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}
  virtual void do_apply(const double* x, double* y) const = 0;
  virtual void do_apply_adjoint(const double* y, double* x) const = 0;

 private:
  std::size_t rows_, cols_;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix a)
      : LinearOperator(a.rows(), a.cols()), a_(std::move(a)) {}

  const char* kind() const override { return "dense"; }
  const Matrix& matrix() const { return a_; }

 private:
  void do_apply(const double* x, double* y) const override {
    for (std::size_t j = 0; j < a_.cols(); ++j) {
      const double xj = x[j];
      if (xj == 0.0) continue;
      const double* col = a_.col(j);
      for (std::size_t i = 0; i < a_.rows(); ++i) y[i] += col[i] * xj;
    }
  }
  void do_apply_adjoint(const double* y, double* x) const override {
    for (std::size_t j = 0; j < a_.cols(); ++j) {
      const double* col = a_.col(j);
      double s = 0.0;
      for (std::size_t i = 0; i < a_.rows(); ++i) s += col[i] * y[i];
      x[j] = s;
    }
  }

  Matrix a_;
};

// Compressed sparse row storage; adjoint application scatters row-wise.
class CsrOperator final : public LinearOperator {
 public:
  // Triplets may repeat; duplicates are summed.
  CsrOperator(std::size_t rows, std::size_t cols,
              std::vector<std::tuple<std::size_t, std::size_t, double>> entries)
      : LinearOperator(rows, cols) {
    for (auto& [i, j, v] : entries) {
      if (i >= rows || j >= cols) throw dimension_error("csr: entry out of range");
    }
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                              : std::get<1>(a) < std::get<1>(b);
    });
    row_ptr_.assign(rows + 1, 0);
    std::size_t last_row = std::size_t(-1);
    for (const auto& [i, j, v] : entries) {
      if (!col_.empty() && i == last_row && j == col_.back()) {
        val_.back() += v;  // duplicate entries sum
      } else {
        last_row = i;
        col_.push_back(j);
        val_.push_back(v);
        ++row_ptr_[i + 1];
      }
    }
    for (std::size_t i = 0; i < rows; ++i) row_ptr_[i + 1] += row_ptr_[i];
  }

  const char* kind() const override { return "csr-sparse"; }
  std::size_t nnz() const { return val_.size(); }

  // (row, col, value) triplets in row-major order
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries() const {
    std::vector<std::tuple<std::size_t, std::size_t, double>> out;
    out.reserve(val_.size());
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e)
        out.emplace_back(i, col_[e], val_[e]);
    return out;
  }

 private:
  void do_apply(const double* x, double* y) const override {
    for (std::size_t i = 0; i < rows(); ++i) {
      double s = 0.0;
      for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) s += val_[e] * x[col_[e]];
      y[i] = s;
    }
  }
  void do_apply_adjoint(const double* y, double* x) const override {
    for (std::size_t i = 0; i < rows(); ++i) {
      const double yi = y[i];
      if (yi == 0.0) continue;
      for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) x[col_[e]] += val_[e] * yi;
    }
  }

  std::vector<std::size_t> row_ptr_, col_;
  Vector val_;
};

class DiagonalOperator final : public LinearOperator {
 public:
  DiagonalOperator(std::size_t rows, std::size_t cols, Vector d)
      : LinearOperator(rows, cols), d_(std::move(d)) {
    if (d_.size() != std::min(rows, cols)) throw dimension_error("diagonal: length mismatch");
  }
  explicit DiagonalOperator(Vector d) : LinearOperator(d.size(), d.size()), d_(std::move(d)) {}

  const char* kind() const override { return "diagonal"; }
  const Vector& diagonal() const { return d_; }

 private:
  void do_apply(const double* x, double* y) const override {
    for (std::size_t i = 0; i < d_.size(); ++i) y[i] = d_[i] * x[i];
  }
  void do_apply_adjoint(const double* y, double* x) const override {
    for (std::size_t i = 0; i < d_.size(); ++i) x[i] = d_[i] * y[i];
  }

  Vector d_;
};

// (I - 2 f f^T) M (I - 2 h h^T) for unit f, h; either reflection may be
// absent.  M is any inner operator.
class HouseholderComposedOperator final : public LinearOperator {
 public:
  HouseholderComposedOperator(Vector f, OperatorPtr inner, Vector h)
      : LinearOperator(inner->rows(), inner->cols()),
        f_(std::move(f)),
        h_(std::move(h)),
        inner_(std::move(inner)) {
    if (!f_.empty() && f_.size() != rows()) throw dimension_error("reflector f: length");
    if (!h_.empty() && h_.size() != cols()) throw dimension_error("reflector h: length");
  }

  const char* kind() const override { return "householder-composed"; }

 private:
  static void reflect(const Vector& z, Vector& v) {
    if (z.empty()) return;
    const double a = 2.0 * dot(z, v) / dot(z, z);
    axpy(-a, z, v);
  }

  void do_apply(const double* x, double* y) const override {
    Vector t(x, x + cols());
    reflect(h_, t);
    Vector u = inner_->apply(t);
    reflect(f_, u);
    std::copy(u.begin(), u.end(), y);
  }
  void do_apply_adjoint(const double* y, double* x) const override {
    Vector t(y, y + rows());
    reflect(f_, t);
    Vector u = inner_->apply_adjoint(t);
    reflect(h_, u);
    std::copy(u.begin(), u.end(), x);
  }

  Vector f_, h_;
  OperatorPtr inner_;
};

// (n-1) x n forward difference: y_i = x_i - x_{i+1}.
class DifferenceOperator final : public LinearOperator {
 public:
  explicit DifferenceOperator(std::size_t n) : LinearOperator(n - 1, n) {
    if (n < 2) throw dimension_error("difference operator needs n >= 2");
  }

  const char* kind() const override { return "difference-operator"; }

 private:
  void do_apply(const double* x, double* y) const override {
    for (std::size_t i = 0; i + 1 < cols(); ++i) y[i] = x[i] - x[i + 1];
  }
  void do_apply_adjoint(const double* y, double* x) const override {
    x[0] = y[0];
    for (std::size_t i = 1; i + 1 < cols(); ++i) x[i] = y[i] - y[i - 1];
    x[cols() - 1] = -y[cols() - 2];
  }
};

// Restriction deflation: (I - U1 U1^T) A (I - W1 W1^T).  Same ambient
// dimensions as the parent; locked directions are annihilated.  Columns of
// the projector blocks may be zero (pairs whose left vector is undefined).
class RestrictedOperator final : public LinearOperator {
 public:
  RestrictedOperator(OperatorPtr parent, Matrix left_block, Matrix right_block)
      : LinearOperator(parent->rows(), parent->cols()),
        parent_(std::move(parent)),
        left_(std::move(left_block)),
        right_(std::move(right_block)) {
    if (!left_.empty() && left_.rows() != rows()) throw dimension_error("restricted: left block");
    if (!right_.empty() && right_.rows() != cols()) throw dimension_error("restricted: right block");
  }

  const char* kind() const override { return "deflated-wrapper"; }

 private:
  static void project_out(const Matrix& b, Vector& v) {
    if (b.empty()) return;
    for (std::size_t j = 0; j < b.cols(); ++j) {
      const double* col = b.col(j);
      double h = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) h += col[i] * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= h * col[i];
    }
  }

  void do_apply(const double* x, double* y) const override {
    Vector t(x, x + cols());
    project_out(right_, t);
    Vector u = parent_->apply(t);
    project_out(left_, u);
    std::copy(u.begin(), u.end(), y);
  }
  void do_apply_adjoint(const double* y, double* x) const override {
    Vector t(y, y + rows());
    project_out(left_, t);
    Vector u = parent_->apply_adjoint(t);
    project_out(right_, u);
    std::copy(u.begin(), u.end(), x);
  }

  OperatorPtr parent_;
  Matrix left_, right_;
};

// Transformation deflation: the trailing principal block of P A Z after
// Householder reflections align a converged triplet with the first axis.
// Shrinks both dimensions by one.
class TransformDeflatedOperator final : public LinearOperator {
 public:
  TransformDeflatedOperator(OperatorPtr parent, Reflection p, Reflection z)
      : LinearOperator(parent->rows() - 1, parent->cols() - 1),
        parent_(std::move(parent)),
        p_(std::move(p)),
        z_(std::move(z)) {}

  const char* kind() const override { return "deflated-wrapper"; }

  // lift reduced-space vectors back to parent coordinates
  Vector lift_right(const Vector& x) const {
    Vector t(cols() + 1, 0.0);
    std::copy(x.begin(), x.end(), t.begin() + 1);
    apply_reflection(z_, t);
    return t;
  }
  Vector lift_left(const Vector& y) const {
    Vector t(rows() + 1, 0.0);
    std::copy(y.begin(), y.end(), t.begin() + 1);
    apply_reflection(p_, t);
    return t;
  }

 private:
  void do_apply(const double* x, double* y) const override {
    Vector t(cols() + 1, 0.0);
    std::copy(x, x + cols(), t.begin() + 1);
    apply_reflection(z_, t);
    Vector u = parent_->apply(t);
    apply_reflection(p_, u);
    std::copy(u.begin() + 1, u.end(), y);
  }
  void do_apply_adjoint(const double* y, double* x) const override {
    Vector t(rows() + 1, 0.0);
    std::copy(y, y + rows(), t.begin() + 1);
    apply_reflection(p_, t);
    Vector u = parent_->apply_adjoint(t);
    apply_reflection(z_, u);
    std::copy(u.begin() + 1, u.end(), x);
  }

  OperatorPtr parent_;
  Reflection p_, z_;
};

// The pair (A, B) with a shared column dimension.  Trivial intersection of
// the nullspaces is a caller contract; a violation surfaces later as a
// singular projected pencil.
struct MatrixPair {
  OperatorPtr a;
  OperatorPtr b;

  MatrixPair() = default;
  MatrixPair(OperatorPtr a_in, OperatorPtr b_in) : a(std::move(a_in)), b(std::move(b_in)) {
    if (a->cols() != b->cols()) throw dimension_error("matrix pair: column mismatch");
  }

  std::size_t n() const { return a->cols(); }
  std::size_t m() const { return a->rows(); }
  std::size_t p() const { return b->rows(); }
};

// Materialize an operator column by column (tests and desk-scale oracles).
inline Matrix densify(const LinearOperator& op) {
  Matrix out(op.rows(), op.cols());
  for (std::size_t j = 0; j < op.cols(); ++j) out.set_col(j, op.apply(unit(op.cols(), j)));
  return out;
}

// Max adjoint-consistency gap |<Ax,y> - <x,A^T y>| over random probes,
// normalized by the probe magnitudes.
inline double adjoint_probe(const LinearOperator& op, int probes, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    Vector x = rng.normal_vector(op.cols());
    Vector y = rng.normal_vector(op.rows());
    const Vector ax = op.apply(x);
    const Vector aty = op.apply_adjoint(y);
    const double lhs = dot(ax, y);
    const double rhs = dot(x, aty);
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace gsvd

#endif  // GSVD_OPERATOR_HPP
