#include <gtest/gtest.h>

#include "ckin/error.hpp"
#include "ckin/poly_ode.hpp"
#include "test_support.hpp"

namespace ckin {
namespace {

using testing::Gen;

TEST(PolynomialSystem, ValidatesShapes) {
  EXPECT_THROW(PolynomialSystem(2, {SparseMatrix(2, 3)}), ShapeMismatch);
  EXPECT_THROW(PolynomialSystem(2, {SparseMatrix(2, 2), SparseMatrix(2, 2)}), ShapeMismatch);
  const PolynomialSystem ok(2, {SparseMatrix(2, 2), SparseMatrix(2, 4)});
  EXPECT_EQ(ok.degree(), 2u);
  EXPECT_EQ(ok.coeff(2).cols(), 4u);
}

TEST(KronPower, SmallCases) {
  const Vector x{2, 3};
  EXPECT_EQ(kron_power(x, 1), x);
  EXPECT_EQ(kron_power(x, 2), (Vector{4, 6, 6, 9}));
  EXPECT_EQ(kron_power(x, 3).size(), 8u);
  EXPECT_EQ(kron_power(x, 3)[7], 27.0);
}

TEST(Monomial, EncodeDecodeRoundTrip) {
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    for (std::size_t j = 1; j <= 3; ++j) {
      std::size_t width = 1;
      for (std::size_t k = 0; k < j; ++k) width *= n;
      std::vector<std::size_t> d(j);
      for (std::size_t c = 0; c < width; ++c) {
        decode_monomial(c, n, d);
        EXPECT_EQ(encode_monomial(d, n), c);
      }
    }
  }
  std::vector<std::size_t> d(2);
  decode_monomial(5, 3, d);  // 5 = 1*3 + 2
  EXPECT_EQ(d, (std::vector<std::size_t>{1, 2}));
}

TEST(EvalRhs, ScalarQuadratic) {
  const PolynomialSystem s(1, {SparseMatrix(1, 1), SparseMatrix(1, 1, {{0, 0, -1.0}})});
  EXPECT_EQ(eval_rhs(s, Vector{3.0}), (Vector{-9.0}));
}

TEST(EvalRhs, MatchesExplicitKroneckerPowers) {
  Gen g(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sys = g.system(g.index(1, 4), g.index(1, 3));
    const auto x = g.vector(sys.n_state());
    Vector ref(sys.n_state(), 0.0);
    for (std::size_t j = 1; j <= sys.degree(); ++j) {
      spmv_accumulate(sys.coeff(j), kron_power(x, j), 1.0, ref);
      EXPECT_LE(testing::max_abs_diff(eval_term(sys, j, x), spmv(sys.coeff(j), kron_power(x, j))),
                1e-14);
    }
    EXPECT_LE(testing::max_abs_diff(eval_rhs(sys, x), ref), 1e-13);
  }
}

TEST(Jacobian, MatchesCentralDifferences) {
  Gen g(32);
  for (int trial = 0; trial < 40; ++trial) {
    const auto sys = g.system(g.index(1, 4), g.index(1, 3));
    const std::size_t n = sys.n_state();
    const auto x = g.vector(n);
    const auto j = jacobian(sys, x);
    const double h = 1e-6;
    for (std::size_t c = 0; c < n; ++c) {
      Vector xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      const auto fp = eval_rhs(sys, xp), fm = eval_rhs(sys, xm);
      for (std::size_t r = 0; r < n; ++r) {
        EXPECT_NEAR(j.at(r, c), (fp[r] - fm[r]) / (2 * h), 1e-7);
      }
    }
  }
}

TEST(Jacobian, ExactForPolynomialWithRepeatedFactor) {
  // f = 2 x0^2 x1 -> df/dx0 = 4 x0 x1, df/dx1 = 2 x0^2
  const std::size_t col = encode_monomial(std::vector<std::size_t>{0, 0, 1}, 2);
  const PolynomialSystem s(2, {SparseMatrix(2, 2), SparseMatrix(2, 4), SparseMatrix(2, 8, {{0, col, 2.0}})});
  const auto j = jacobian(s, Vector{3.0, 5.0});
  EXPECT_EQ(j.at(0, 0), 60.0);
  EXPECT_EQ(j.at(0, 1), 18.0);
  EXPECT_EQ(j.at(1, 0), 0.0);
}

}  // namespace
}  // namespace ckin
