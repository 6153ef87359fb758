#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace ckin {

using Vector = std::vector<double>;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed-row sparse matrix with an explicit shape.
///
/// Construction canonicalizes its input: duplicate (row, col) pairs are
/// summed, exact zeros produced by the sum are dropped, and entries are stored
/// row-major with ascending columns. Values must be finite. Instances are
/// immutable.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

  static SparseMatrix identity(std::size_t n);
  static SparseMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static SparseMatrix from_dense(const std::vector<Vector>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Entry lookup by binary search; zero when absent.
  double at(std::size_t row, std::size_t col) const;

  /// Row-major list of stored entries.
  std::vector<Triplet> triplets() const;
  std::vector<Vector> to_dense() const;

  /// Largest stored magnitude (0 for an empty matrix).
  double max_abs() const noexcept;

  SparseMatrix transpose() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

inline SparseMatrix identity(std::size_t n) { return SparseMatrix::identity(n); }

/// Kronecker product; entry (ia*b.rows+ib, ja*b.cols+jb) = a(ia,ja) * b(ib,jb).
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);

/// Kronecker product of two dense vectors.
Vector kron_vec(std::span<const double> a, std::span<const double> b);

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix scale(const SparseMatrix& a, double factor);

Vector spmv(const SparseMatrix& m, std::span<const double> v);

/// y += alpha * m * v
void spmv_accumulate(const SparseMatrix& m, std::span<const double> v, double alpha,
                     std::span<double> y);

double norm_inf(std::span<const double> v) noexcept;

/// Square-or-rectangular matrix partitioned into blocks.
///
/// Offsets are cumulative boundaries `[0, n0, n0+n1, ...]`, shared by block
/// rows and block columns. Absent blocks are zero.
class BlockMatrix {
 public:
  using Key = std::pair<std::size_t, std::size_t>;

  BlockMatrix() = default;
  explicit BlockMatrix(std::vector<std::size_t> offsets);

  void set_block(std::size_t block_row, std::size_t block_col, SparseMatrix block);

  std::size_t block_count() const noexcept { return offsets_.size() - 1; }
  std::size_t dim() const noexcept { return offsets_.back(); }
  std::size_t block_size(std::size_t b) const { return offsets_.at(b + 1) - offsets_.at(b); }
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  const std::map<Key, SparseMatrix>& blocks() const noexcept { return blocks_; }

  bool has_block(std::size_t block_row, std::size_t block_col) const;
  const SparseMatrix& block(std::size_t block_row, std::size_t block_col) const;

  bool is_upper_block_triangular() const;
  std::size_t nnz() const;

  SparseMatrix flatten() const;
  Vector multiply(std::span<const double> v) const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::map<Key, SparseMatrix> blocks_;
};

/// MatrixMarket coordinate real general, 1-based, row-major entry order.
void write_matrix_market(std::ostream& os, const SparseMatrix& m);
SparseMatrix read_matrix_market(std::istream& is);

}  // namespace ckin
