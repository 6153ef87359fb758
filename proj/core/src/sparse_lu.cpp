#include "ckin/sparse_lu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ckin/error.hpp"

namespace ckin {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

SparseLU::SparseLU(const SparseMatrix& a) : n_(a.rows()) {
  if (a.rows() != a.cols()) {
    throw ShapeMismatch("SparseLU: matrix is " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + ", not square");
  }
  // Row j of the transpose is column j of a.
  const SparseMatrix at = a.transpose();
  const auto ap = at.row_ptr();
  const auto ai = at.col_idx();
  const auto ax = at.values();
  const double threshold = kPivotThreshold * a.max_abs();

  pinv_.assign(n_, kNone);
  l_ptr_.assign(n_ + 1, 0);
  u_ptr_.assign(n_ + 1, 0);
  l_idx_.reserve(a.nnz() + n_);
  l_val_.reserve(a.nnz() + n_);
  u_idx_.reserve(a.nnz() + n_);
  u_val_.reserve(a.nnz() + n_);

  Vector x(n_, 0.0);
  std::vector<std::size_t> xi(n_), stack(n_), pstack(n_);
  std::vector<std::size_t> mark(n_, kNone);

  // Nodes reachable from j in the graph of the partial L, pushed onto
  // xi[top..n) in topological order.
  auto dfs = [&](std::size_t j, std::size_t k, std::size_t top) {
    std::ptrdiff_t head = 0;
    stack[0] = j;
    while (head >= 0) {
      j = stack[static_cast<std::size_t>(head)];
      const std::size_t jcol = pinv_[j];
      if (mark[j] != k) {
        mark[j] = k;
        pstack[static_cast<std::size_t>(head)] = jcol == kNone ? 0 : l_ptr_[jcol];
      }
      bool done = true;
      const std::size_t end = jcol == kNone ? 0 : l_ptr_[jcol + 1];
      for (std::size_t p = pstack[static_cast<std::size_t>(head)]; p < end; ++p) {
        const std::size_t i = l_idx_[p];
        if (mark[i] == k) continue;
        pstack[static_cast<std::size_t>(head)] = p + 1;
        stack[static_cast<std::size_t>(++head)] = i;
        done = false;
        break;
      }
      if (done) {
        --head;
        xi[--top] = j;
      }
    }
    return top;
  };

  for (std::size_t k = 0; k < n_; ++k) {
    l_ptr_[k] = l_val_.size();
    u_ptr_[k] = u_val_.size();

    std::size_t top = n_;
    for (std::size_t p = ap[k]; p < ap[k + 1]; ++p) {
      if (mark[ai[p]] != k) top = dfs(ai[p], k, top);
    }
    for (std::size_t p = top; p < n_; ++p) x[xi[p]] = 0.0;
    for (std::size_t p = ap[k]; p < ap[k + 1]; ++p) x[ai[p]] = ax[p];

    // x = L \ a(:, k) restricted to the reach.
    for (std::size_t px = top; px < n_; ++px) {
      const std::size_t j = xi[px];
      const std::size_t jcol = pinv_[j];
      if (jcol == kNone) continue;
      const double xj = x[j];
      for (std::size_t p = l_ptr_[jcol] + 1; p < l_ptr_[jcol + 1]; ++p) {
        x[l_idx_[p]] -= l_val_[p] * xj;
      }
    }

    std::size_t ipiv = kNone;
    double amax = -1.0;
    for (std::size_t px = top; px < n_; ++px) {
      const std::size_t i = xi[px];
      if (pinv_[i] == kNone) {
        if (std::abs(x[i]) > amax) {
          amax = std::abs(x[i]);
          ipiv = i;
        }
      } else {
        u_idx_.push_back(pinv_[i]);
        u_val_.push_back(x[i]);
      }
    }
    if (ipiv == kNone || amax <= threshold) {
      throw SingularMatrix("SparseLU: pivot " + std::to_string(std::max(amax, 0.0)) +
                           " below threshold in column " + std::to_string(k));
    }

    const double pivot = x[ipiv];
    u_idx_.push_back(k);
    u_val_.push_back(pivot);
    pinv_[ipiv] = k;
    l_idx_.push_back(ipiv);
    l_val_.push_back(1.0);
    for (std::size_t px = top; px < n_; ++px) {
      const std::size_t i = xi[px];
      if (pinv_[i] == kNone) {
        l_idx_.push_back(i);
        l_val_.push_back(x[i] / pivot);
      }
      x[i] = 0.0;
    }
  }
  l_ptr_[n_] = l_val_.size();
  u_ptr_[n_] = u_val_.size();
  for (auto& i : l_idx_) i = pinv_[i];
}

void SparseLU::solve_in_place(std::span<double> x) const {
  if (x.size() != n_) throw ShapeMismatch("SparseLU::solve: rhs length mismatch");
  Vector y(n_);
  for (std::size_t i = 0; i < n_; ++i) y[pinv_[i]] = x[i];
  for (std::size_t j = 0; j < n_; ++j) {
    const double yj = y[j];
    if (yj == 0.0) continue;
    for (std::size_t p = l_ptr_[j] + 1; p < l_ptr_[j + 1]; ++p) y[l_idx_[p]] -= l_val_[p] * yj;
  }
  for (std::size_t j = n_; j-- > 0;) {
    y[j] /= u_val_[u_ptr_[j + 1] - 1];
    const double yj = y[j];
    if (yj == 0.0) continue;
    for (std::size_t p = u_ptr_[j]; p + 1 < u_ptr_[j + 1]; ++p) y[u_idx_[p]] -= u_val_[p] * yj;
  }
  std::copy(y.begin(), y.end(), x.begin());
}

Vector SparseLU::solve(std::span<const double> rhs) const {
  Vector x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

Vector solve_sparse_lu(const SparseMatrix& m, std::span<const double> rhs) {
  if (rhs.size() != m.rows()) throw ShapeMismatch("solve_sparse_lu: rhs length mismatch");
  return SparseLU(m).solve(rhs);
}

BlockUpperTriangularSolver::BlockUpperTriangularSolver(BlockMatrix m) : m_(std::move(m)) {
  if (!m_.is_upper_block_triangular()) {
    throw InvalidArgument("block solver: matrix has blocks below the block diagonal");
  }
  diag_.reserve(m_.block_count());
  for (std::size_t b = 0; b < m_.block_count(); ++b) {
    if (!m_.has_block(b, b)) {
      throw SingularBlock(b, "block solver: diagonal block " + std::to_string(b) + " is absent");
    }
    try {
      diag_.emplace_back(m_.block(b, b));
    } catch (const SingularMatrix& e) {
      throw SingularBlock(b, "block solver: diagonal block " + std::to_string(b) +
                                 " is singular (" + e.what() + ")");
    }
  }
}

Vector BlockUpperTriangularSolver::solve(std::span<const double> rhs) const {
  if (rhs.size() != m_.dim()) throw ShapeMismatch("block solver: rhs length mismatch");
  Vector x(rhs.begin(), rhs.end());
  const auto& off = m_.offsets();
  const auto& blocks = m_.blocks();
  for (std::size_t b = m_.block_count(); b-- > 0;) {
    std::span<double> xb = std::span<double>(x).subspan(off[b], m_.block_size(b));
    // Blocks of row b are contiguous in the map, ordered by column.
    for (auto it = blocks.lower_bound({b, b + 1}); it != blocks.end() && it->first.first == b;
         ++it) {
      const std::size_t c = it->first.second;
      spmv_accumulate(it->second,
                      std::span<const double>(x).subspan(off[c], m_.block_size(c)), -1.0, xb);
    }
    diag_[b].solve_in_place(xb);
  }
  return x;
}

Vector solve_block_upper_triangular(const BlockMatrix& m, std::span<const double> rhs) {
  return BlockUpperTriangularSolver(m).solve(rhs);
}

double relative_residual(const SparseMatrix& m, std::span<const double> x,
                         std::span<const double> rhs) {
  Vector r = spmv(m, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
  return norm_inf(r) / std::max(1.0, norm_inf(rhs));
}

double relative_residual(const BlockMatrix& m, std::span<const double> x,
                         std::span<const double> rhs) {
  Vector r = m.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
  return norm_inf(r) / std::max(1.0, norm_inf(rhs));
}

}  // namespace ckin
