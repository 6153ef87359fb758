#include <gtest/gtest.h>

#include <sstream>

#include "ckin/error.hpp"
#include "ckin/sparse.hpp"
#include "test_support.hpp"

namespace ckin {
namespace {

using testing::Gen;

TEST(SparseMatrix, CanonicalizesDuplicatesAndZeros) {
  const SparseMatrix m(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 2, 3.0}, {0, 0, 1.0}, {0, 0, -1.0}});
  EXPECT_EQ(m.nnz(), 2u);
  EXPECT_EQ(m.at(0, 1), 2.0);
  EXPECT_EQ(m.at(1, 2), 4.0);
  EXPECT_EQ(m.at(0, 0), 0.0);
  const auto t = m.triplets();
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].row, 0u);
  EXPECT_EQ(t[1].row, 1u);
}

TEST(SparseMatrix, RejectsOutOfRangeAndNonFinite) {
  EXPECT_THROW(SparseMatrix(2, 2, {{2, 0, 1.0}}), ShapeMismatch);
  EXPECT_THROW(SparseMatrix(2, 2, {{0, 0, std::nan("")}}), InvalidArgument);
  EXPECT_THROW(SparseMatrix(2, 2, {{0, 0, INFINITY}}), InvalidArgument);
}

TEST(SparseMatrix, DenseRoundTrip) {
  const testing::Dense d{{1, 0, 2}, {0, 0, 0}, {0, -3, 0}};
  const auto m = SparseMatrix::from_dense(d);
  EXPECT_EQ(m.nnz(), 3u);
  EXPECT_EQ(m.to_dense(), d);
  EXPECT_EQ(m.transpose().at(1, 2), -3.0);
}

TEST(Kron, TwoByTwoByHand) {
  const auto a = SparseMatrix::from_dense({{1, 2}, {3, 4}});
  const auto b = SparseMatrix::from_dense({{0, 5}, {6, 7}});
  const testing::Dense expected{
      {0, 5, 0, 10}, {6, 7, 12, 14}, {0, 15, 0, 20}, {18, 21, 24, 28}};
  EXPECT_EQ(kron(a, b).to_dense(), expected);
}

TEST(Kron, IdentityAndEmptyFactors) {
  EXPECT_EQ(kron(identity(2), identity(3)), identity(6));
  const auto k = kron(SparseMatrix(2, 3), identity(2));
  EXPECT_EQ(k.rows(), 4u);
  EXPECT_EQ(k.cols(), 6u);
  EXPECT_EQ(k.nnz(), 0u);
}

TEST(Kron, MatchesDenseOracleOnRandomMatrices) {
  Gen g(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = g.sparse(g.index(1, 4), g.index(1, 4), 0.5);
    const auto b = g.sparse(g.index(1, 4), g.index(1, 4), 0.5);
    const auto k = kron(a, b);
    EXPECT_EQ(k.to_dense(), testing::dense_kron(a.to_dense(), b.to_dense()));
    EXPECT_EQ(k.nnz(), a.nnz() * b.nnz());
  }
}

TEST(Kron, MixedProductProperty) {
  // (A kron B)(x kron y) = (A x) kron (B y)
  Gen g(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = g.sparse(3, g.index(1, 4), 0.6);
    const auto b = g.sparse(2, g.index(1, 4), 0.6);
    const auto x = g.vector(a.cols());
    const auto y = g.vector(b.cols());
    const auto lhs = spmv(kron(a, b), kron_vec(x, y));
    const auto rhs = kron_vec(spmv(a, x), spmv(b, y));
    EXPECT_LE(testing::max_abs_diff(lhs, rhs), 1e-14);
  }
}

TEST(Kron, Associative) {
  Gen g(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = g.sparse(2, 2, 0.7), b = g.sparse(2, 3, 0.7), c = g.sparse(3, 2, 0.7);
    const auto l = kron(kron(a, b), c).to_dense();
    const auto r = kron(a, kron(b, c)).to_dense();
    for (std::size_t i = 0; i < l.size(); ++i) EXPECT_LE(testing::max_abs_diff(l[i], r[i]), 1e-15);
  }
}

TEST(Arithmetic, AddScaleSpmv) {
  const auto a = SparseMatrix::from_dense({{1, 0}, {0, 2}});
  const auto b = SparseMatrix::from_dense({{-1, 1}, {0, 0}});
  const auto s = add(a, b);
  EXPECT_EQ(s.nnz(), 2u);  // the (0,0) entry cancels
  EXPECT_EQ(s.at(0, 1), 1.0);
  EXPECT_EQ(scale(a, 3.0).at(1, 1), 6.0);
  EXPECT_EQ(spmv(a, Vector{2, 3}), (Vector{2, 6}));
  EXPECT_THROW(add(a, SparseMatrix(2, 3)), ShapeMismatch);
  EXPECT_THROW(spmv(a, Vector{1}), ShapeMismatch);

  Vector y{1, 1};
  spmv_accumulate(a, Vector{1, 1}, 0.5, y);
  EXPECT_EQ(y, (Vector{1.5, 2.0}));
  EXPECT_EQ(norm_inf(Vector{-4, 3}), 4.0);
}

TEST(BlockMatrix, ShapesAndFlatten) {
  BlockMatrix m({0, 2, 5});
  EXPECT_EQ(m.dim(), 5u);
  EXPECT_EQ(m.block_size(1), 3u);
  m.set_block(0, 0, identity(2));
  m.set_block(0, 1, SparseMatrix(2, 3, {{1, 2, 7.0}}));
  m.set_block(1, 1, scale(identity(3), 2.0));
  EXPECT_THROW(m.set_block(1, 0, identity(2)), ShapeMismatch);
  EXPECT_TRUE(m.is_upper_block_triangular());
  const auto f = m.flatten();
  EXPECT_EQ(f.at(1, 4), 7.0);
  EXPECT_EQ(f.at(3, 3), 2.0);
  EXPECT_EQ(m.nnz(), f.nnz());
  const Vector v{1, 2, 3, 4, 5};
  EXPECT_EQ(m.multiply(v), spmv(f, v));

  m.set_block(1, 0, SparseMatrix(3, 2, {{0, 0, 1.0}}));
  EXPECT_FALSE(m.is_upper_block_triangular());
}

TEST(MatrixMarket, RoundTripIsExact) {
  Gen g(14);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = g.sparse(g.index(1, 8), g.index(1, 8), 0.4);
    std::stringstream ss;
    write_matrix_market(ss, m);
    EXPECT_EQ(read_matrix_market(ss), m);
  }
}

TEST(MatrixMarket, HeaderAndIndexing) {
  std::stringstream ss;
  write_matrix_market(ss, SparseMatrix(2, 3, {{1, 2, 0.5}}));
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "%%MatrixMarket matrix coordinate real general");
  std::getline(ss, line);
  EXPECT_EQ(line, "2 3 1");
  std::getline(ss, line);
  EXPECT_EQ(line, "2 3 0.5");
}

}  // namespace
}  // namespace ckin
