#include "ckin/sparse.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ckin/error.hpp"

namespace ckin {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
  for (const auto& e : entries) {
    if (e.row >= rows || e.col >= cols) {
      throw ShapeMismatch("sparse entry (" + std::to_string(e.row) + ", " +
                          std::to_string(e.col) + ") outside " + std::to_string(rows) + "x" +
                          std::to_string(cols));
    }
    if (!std::isfinite(e.value)) {
      throw InvalidArgument("sparse entry (" + std::to_string(e.row) + ", " +
                            std::to_string(e.col) + ") is not finite");
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  row_ptr_.assign(rows + 1, 0);
  col_idx_.reserve(entries.size());
  values_.reserve(entries.size());
  std::vector<std::size_t> row_of;
  row_of.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size();) {
    const std::size_t r = entries[k].row;
    const std::size_t c = entries[k].col;
    double sum = 0.0;
    for (; k < entries.size() && entries[k].row == r && entries[k].col == c; ++k) {
      sum += entries[k].value;
    }
    if (sum != 0.0) {
      col_idx_.push_back(c);
      values_.push_back(sum);
      ++row_ptr_[r + 1];
    }
  }
  for (std::size_t r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  if (n == 0) throw InvalidArgument("identity: n must be at least 1");
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return {n, n, std::move(t)};
}

SparseMatrix SparseMatrix::from_dense(const std::vector<Vector>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw ShapeMismatch("from_dense: ragged rows");
    for (std::size_t j = 0; j < c; ++j) {
      if (rows[i][j] != 0.0) t.push_back({i, j, rows[i][j]});
    }
  }
  return {r, c, std::move(t)};
}

double SparseMatrix::at(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) throw ShapeMismatch("at: index out of range");
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      out.push_back({r, col_idx_[p], values_[p]});
    }
  }
  return out;
}

std::vector<Vector> SparseMatrix::to_dense() const {
  std::vector<Vector> d(rows_, Vector(cols_, 0.0));
  for (const auto& t : triplets()) d[t.row][t.col] = t.value;
  return d;
}

double SparseMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (const auto& e : triplets()) t.push_back({e.col, e.row, e.value});
  return {cols_, rows_, std::move(t)};
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  const std::size_t rows = detail::checked_mul(a.rows(), b.rows(), "kron rows");
  const std::size_t cols = detail::checked_mul(a.cols(), b.cols(), "kron cols");
  std::vector<Triplet> t;
  t.reserve(detail::checked_mul(a.nnz(), b.nnz(), "kron nnz"));
  const auto a_ptr = a.row_ptr();
  const auto a_col = a.col_idx();
  const auto a_val = a.values();
  const auto b_ptr = b.row_ptr();
  const auto b_col = b.col_idx();
  const auto b_val = b.values();
  // Emitted in row-major order already.
  for (std::size_t ia = 0; ia < a.rows(); ++ia) {
    for (std::size_t ib = 0; ib < b.rows(); ++ib) {
      const std::size_t r = ia * b.rows() + ib;
      for (std::size_t pa = a_ptr[ia]; pa < a_ptr[ia + 1]; ++pa) {
        for (std::size_t pb = b_ptr[ib]; pb < b_ptr[ib + 1]; ++pb) {
          t.push_back({r, a_col[pa] * b.cols() + b_col[pb], a_val[pa] * b_val[pb]});
        }
      }
    }
  }
  return {rows, cols, std::move(t)};
}

Vector kron_vec(std::span<const double> a, std::span<const double> b) {
  Vector out(detail::checked_mul(a.size(), b.size(), "kron_vec length"));
  std::size_t k = 0;
  for (double x : a) {
    for (double y : b) out[k++] = x * y;
  }
  return out;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch("add: shapes differ");
  }
  auto t = a.triplets();
  auto tb = b.triplets();
  t.insert(t.end(), tb.begin(), tb.end());
  return {a.rows(), a.cols(), std::move(t)};
}

SparseMatrix scale(const SparseMatrix& a, double factor) {
  auto t = a.triplets();
  for (auto& e : t) e.value *= factor;
  return {a.rows(), a.cols(), std::move(t)};
}

void spmv_accumulate(const SparseMatrix& m, std::span<const double> v, double alpha,
                     std::span<double> y) {
  if (v.size() != m.cols() || y.size() != m.rows()) {
    throw ShapeMismatch("spmv: matrix is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", vector length " +
                        std::to_string(v.size()));
  }
  const auto ptr = m.row_ptr();
  const auto col = m.col_idx();
  const auto val = m.values();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (std::size_t p = ptr[r]; p < ptr[r + 1]; ++p) s += val[p] * v[col[p]];
    y[r] += alpha * s;
  }
}

Vector spmv(const SparseMatrix& m, std::span<const double> v) {
  Vector y(m.rows(), 0.0);
  spmv_accumulate(m, v, 1.0, y);
  return y;
}

double norm_inf(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

BlockMatrix::BlockMatrix(std::vector<std::size_t> offsets) : offsets_(std::move(offsets)) {
  if (offsets_.empty() || offsets_.front() != 0) {
    throw InvalidArgument("block offsets must start at 0");
  }
  if (!std::is_sorted(offsets_.begin(), offsets_.end())) {
    throw InvalidArgument("block offsets must be nondecreasing");
  }
}

void BlockMatrix::set_block(std::size_t block_row, std::size_t block_col, SparseMatrix block) {
  if (block_row >= block_count() || block_col >= block_count()) {
    throw ShapeMismatch("set_block: block index out of range");
  }
  if (block.rows() != block_size(block_row) || block.cols() != block_size(block_col)) {
    throw ShapeMismatch("set_block(" + std::to_string(block_row) + ", " +
                        std::to_string(block_col) + "): block is " +
                        std::to_string(block.rows()) + "x" + std::to_string(block.cols()) +
                        ", layout needs " + std::to_string(block_size(block_row)) + "x" +
                        std::to_string(block_size(block_col)));
  }
  blocks_.insert_or_assign(Key{block_row, block_col}, std::move(block));
}

bool BlockMatrix::has_block(std::size_t block_row, std::size_t block_col) const {
  return blocks_.contains(Key{block_row, block_col});
}

const SparseMatrix& BlockMatrix::block(std::size_t block_row, std::size_t block_col) const {
  const auto it = blocks_.find(Key{block_row, block_col});
  if (it == blocks_.end()) throw InvalidArgument("block not present");
  return it->second;
}

bool BlockMatrix::is_upper_block_triangular() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const auto& kv) { return kv.first.second >= kv.first.first; });
}

std::size_t BlockMatrix::nnz() const {
  std::size_t n = 0;
  for (const auto& [key, b] : blocks_) n += b.nnz();
  return n;
}

SparseMatrix BlockMatrix::flatten() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (const auto& [key, b] : blocks_) {
    const std::size_t r0 = offsets_[key.first];
    const std::size_t c0 = offsets_[key.second];
    for (const auto& e : b.triplets()) t.push_back({r0 + e.row, c0 + e.col, e.value});
  }
  return {dim(), dim(), std::move(t)};
}

Vector BlockMatrix::multiply(std::span<const double> v) const {
  if (v.size() != dim()) throw ShapeMismatch("block multiply: vector length mismatch");
  Vector y(dim(), 0.0);
  for (const auto& [key, b] : blocks_) {
    spmv_accumulate(b, v.subspan(offsets_[key.second], block_size(key.second)), 1.0,
                    std::span<double>(y).subspan(offsets_[key.first], block_size(key.first)));
  }
  return y;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_matrix_market(std::ostream& os, const SparseMatrix& m) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (const auto& t : m.triplets()) {
    os << t.row + 1 << ' ' << t.col + 1 << ' ' << format_double(t.value) << '\n';
  }
}

SparseMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0) {
    throw InvalidArgument("MatrixMarket: missing banner");
  }
  if (line.find("coordinate") == std::string::npos || line.find("real") == std::string::npos) {
    throw InvalidArgument("MatrixMarket: only 'coordinate real' is supported");
  }
  while (std::getline(is, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream header(line);
  std::size_t rows = 0, cols = 0, count = 0;
  if (!(header >> rows >> cols >> count)) throw InvalidArgument("MatrixMarket: bad size line");
  std::vector<Triplet> t;
  t.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t r = 0, c = 0;
    double v = 0.0;
    if (!(is >> r >> c >> v) || r == 0 || c == 0) {
      throw InvalidArgument("MatrixMarket: bad entry " + std::to_string(k + 1));
    }
    t.push_back({r - 1, c - 1, v});
  }
  return {rows, cols, std::move(t)};
}

}  // namespace ckin
