#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ckin/sparse.hpp"

namespace ckin {

/// Residual tolerance the direct solvers are held to:
/// ||m x - rhs||_inf / max(1, ||rhs||_inf).
inline constexpr double kSolverTolerance = 1e-10;

/// A pivot smaller than this times the matrix max-norm is treated as zero.
inline constexpr double kPivotThreshold = 1e-14;

/// Left-looking sparse LU with partial (row) pivoting, P A = L U.
///
/// L is unit lower triangular and U upper triangular, both stored by column.
/// Each column is computed by a sparse triangular solve whose nonzero pattern
/// comes from a depth-first reach over the graph of L.
class SparseLU {
 public:
  /// Throws SingularMatrix when a pivot falls below the threshold.
  explicit SparseLU(const SparseMatrix& a);

  std::size_t dim() const noexcept { return n_; }
  std::size_t nnz_l() const noexcept { return l_val_.size(); }
  std::size_t nnz_u() const noexcept { return u_val_.size(); }

  Vector solve(std::span<const double> rhs) const;
  /// Overwrites `x` (holding the right-hand side) with the solution.
  void solve_in_place(std::span<double> x) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> pinv_;  // original row -> pivot position
  std::vector<std::size_t> l_ptr_, l_idx_;
  std::vector<double> l_val_;
  std::vector<std::size_t> u_ptr_, u_idx_;
  std::vector<double> u_val_;
};

/// Direct solve of a general sparse system. Throws SingularMatrix.
Vector solve_sparse_lu(const SparseMatrix& m, std::span<const double> rhs);

/// Solver for block upper-triangular systems.
///
/// Diagonal blocks are factorized once at construction; `solve` runs block
/// back-substitution from the last block row upward and may be called
/// repeatedly (and concurrently) on the same instance.
class BlockUpperTriangularSolver {
 public:
  /// Throws InvalidArgument if `m` has blocks below the diagonal and
  /// SingularBlock if a diagonal block is (numerically) singular.
  explicit BlockUpperTriangularSolver(BlockMatrix m);

  const BlockMatrix& matrix() const noexcept { return m_; }
  Vector solve(std::span<const double> rhs) const;

 private:
  BlockMatrix m_;
  std::vector<SparseLU> diag_;
};

Vector solve_block_upper_triangular(const BlockMatrix& m, std::span<const double> rhs);

/// ||m x - rhs||_inf / max(1, ||rhs||_inf)
double relative_residual(const SparseMatrix& m, std::span<const double> x,
                         std::span<const double> rhs);
double relative_residual(const BlockMatrix& m, std::span<const double> x,
                         std::span<const double> rhs);

}  // namespace ckin
