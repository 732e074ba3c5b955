#include <catch2/catch_amalgamated.hpp>

#include "gsvd/operator.hpp"
#include "oracles.hpp"

using namespace gsvd;

TEST_CASE("apply basics") {
  SECTION("identity") {
    auto id = std::make_shared<DiagonalOperator>(Vector{1.0, 1.0, 1.0});
    CHECK(id->apply({1.0, 2.0, 3.0}) == Vector{1.0, 2.0, 3.0});
  }
  SECTION("diagonal with a zero") {
    DiagonalOperator d(Vector{2.0, 0.0});
    CHECK(d.apply({1.0, 1.0}) == Vector{2.0, 0.0});
  }
  SECTION("dimension mismatch throws") {
    DiagonalOperator d(Vector{1.0, 2.0});
    CHECK_THROWS_AS(d.apply({1.0, 2.0, 3.0}), dimension_error);
    CHECK_THROWS_AS(d.apply_adjoint({1.0}), dimension_error);
  }
}

TEST_CASE("apply_adjoint basics") {
  SECTION("rectangular dense") {
    Matrix a(2, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    DenseOperator op(a);
    CHECK(op.apply_adjoint({1.0, 1.0}) == Vector{1.0, 1.0, 0.0});
  }
  SECTION("inner-product probe on a random dense operator") {
    Rng rng(5);
    Matrix a(9, 6);
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t i = 0; i < 9; ++i) a(i, j) = rng.normal();
    DenseOperator op(a);
    CHECK(adjoint_probe(op, 50, 99) < 1e-12);
  }
}

TEST_CASE("csr matches a dense replica") {
  Rng rng(17);
  const std::size_t m = 20, n = 10;
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  Matrix dense(m, n);
  for (int e = 0; e < 60; ++e) {
    const std::size_t i = rng.below(m), j = rng.below(n);
    const double v = rng.normal();
    entries.emplace_back(i, j, v);
    dense(i, j) += v;  // duplicates sum
  }
  CsrOperator sparse(m, n, entries);
  DenseOperator ref(dense);

  Vector x = rng.normal_vector(n);
  Vector ys = sparse.apply(x);
  Vector yd = ref.apply(x);
  for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(ys[i] - yd[i]) < 1e-14);

  Vector y = rng.normal_vector(m);
  Vector xs = sparse.apply_adjoint(y);
  Vector xd = ref.apply_adjoint(y);
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(xs[j] - xd[j]) < 1e-14);
}

TEST_CASE("adjoint consistency holds for every operator kind") {
  Rng rng(23);
  std::vector<OperatorPtr> ops;

  Matrix a(12, 8);
  for (std::size_t j = 0; j < 8; ++j)
    for (std::size_t i = 0; i < 12; ++i) a(i, j) = rng.normal();
  ops.push_back(std::make_shared<DenseOperator>(a));

  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  for (int e = 0; e < 40; ++e) entries.emplace_back(rng.below(12), rng.below(8), rng.normal());
  ops.push_back(std::make_shared<CsrOperator>(12, 8, entries));

  ops.push_back(std::make_shared<DiagonalOperator>(10, 8, rng.normal_vector(8)));
  ops.push_back(std::make_shared<DifferenceOperator>(9));

  Vector f = rng.normal_vector(8);
  scal(1.0 / nrm2(f), f);
  Vector h = rng.normal_vector(8);
  scal(1.0 / nrm2(h), h);
  auto core = std::make_shared<DiagonalOperator>(rng.normal_vector(8));
  ops.push_back(std::make_shared<HouseholderComposedOperator>(f, core, h));

  // deflation wrappers around the dense operator
  Matrix u1(12, 1), w1(8, 1);
  Vector uc = rng.normal_vector(12);
  scal(1.0 / nrm2(uc), uc);
  u1.set_col(0, uc);
  Vector wc = rng.normal_vector(8);
  scal(1.0 / nrm2(wc), wc);
  w1.set_col(0, wc);
  ops.push_back(std::make_shared<RestrictedOperator>(ops[0], u1, w1));

  Vector p = rng.normal_vector(12);
  scal(1.0 / nrm2(p), p);
  Vector z = rng.normal_vector(8);
  scal(1.0 / nrm2(z), z);
  ops.push_back(std::make_shared<TransformDeflatedOperator>(
      ops[0], householder_from_target(p, 0), householder_from_target(z, 0)));

  for (const auto& op : ops) {
    INFO(op->kind());
    CHECK(adjoint_probe(*op, 25, 7) < 1e-12);
  }
}

TEST_CASE("householder-composed equals the explicit dense product") {
  Rng rng(31);
  const std::size_t n = 50;
  Vector f = rng.normal_vector(n);
  scal(1.0 / nrm2(f), f);
  Vector h = rng.normal_vector(n);
  scal(1.0 / nrm2(h), h);
  Vector d = rng.normal_vector(n);
  auto core = std::make_shared<DiagonalOperator>(d);
  HouseholderComposedOperator op(f, core, h);

  Eigen::VectorXd fe = oracle::to_eigen(f), he = oracle::to_eigen(h);
  Eigen::MatrixXd explicit_mat =
      (Eigen::MatrixXd::Identity(n, n) - 2.0 * fe * fe.transpose()) *
      oracle::to_eigen(d).asDiagonal() *
      (Eigen::MatrixXd::Identity(n, n) - 2.0 * he * he.transpose());

  Vector x = rng.normal_vector(n);
  Eigen::VectorXd ref = explicit_mat * oracle::to_eigen(x);
  Vector y = op.apply(x);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - ref(i)) < 1e-12);
}

TEST_CASE("difference operator stencil and adjoint") {
  DifferenceOperator b(5);
  CHECK(b.apply({1.0, 1.0, 1.0, 1.0, 1.0}) == Vector{0.0, 0.0, 0.0, 0.0});
  CHECK(b.apply({1.0, 2.0, 4.0, 7.0, 11.0}) == Vector{-1.0, -2.0, -3.0, -4.0});
  CHECK(adjoint_probe(b, 20, 3) < 1e-13);
}

TEST_CASE("matrix pair validates shared column count") {
  auto a = std::make_shared<DiagonalOperator>(Vector{1.0, 2.0});
  auto b = std::make_shared<DiagonalOperator>(Vector{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(MatrixPair(a, b), dimension_error);
}
