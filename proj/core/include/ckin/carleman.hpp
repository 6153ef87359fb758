#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "ckin/poly_ode.hpp"
#include "ckin/sparse.hpp"

namespace ckin {

/// Total lifted dimension sum_{k=1..n_t} n^k. Throws DimensionOverflow.
std::size_t carleman_dimension(std::size_t n_state, std::size_t n_t);

/// Block boundaries [0, n, n + n^2, ...] of a lifted vector.
std::vector<std::size_t> carleman_offsets(std::size_t n_state, std::size_t n_t);

/// Transfer block coupling x^(kron i+j-1) into d/dt x^(kron i):
///   T^1 = A_j,  T^i = A_j (kron) I_{n^(i-1)} + I_n (kron) T^(i-1).
/// Shape n^i x n^(i+j-1).
SparseMatrix transfer_block(const SparseMatrix& a_j, std::size_t j, std::size_t i,
                            std::size_t n_state);

/// Truncated Carleman lift of a polynomial system.
///
/// Block (i, i+j-1) holds the transfer block of A_j for every j with
/// i+j-1 <= n_t (1-based block indices); couplings that would land beyond
/// n_t are dropped. The result is block upper-triangular with bandwidth
/// degree-1.
class CarlemanSystem {
 public:
  CarlemanSystem(PolynomialSystem base, std::size_t n_t);

  const PolynomialSystem& base() const noexcept { return base_; }
  std::size_t n_state() const noexcept { return base_.n_state(); }
  std::size_t truncation_order() const noexcept { return n_t_; }
  std::size_t dim() const noexcept { return a_c_.dim(); }
  const std::vector<std::size_t>& offsets() const noexcept { return a_c_.offsets(); }
  const BlockMatrix& matrix() const noexcept { return a_c_; }

 private:
  PolynomialSystem base_;
  std::size_t n_t_;
  BlockMatrix a_c_;
};

CarlemanSystem assemble(const PolynomialSystem& sys, std::size_t n_t);

/// (x, x(kron)x, ..., x^(kron n_t)) concatenated.
Vector lift(std::span<const double> x, std::size_t n_t);

/// First block of a lifted vector.
Vector readout(std::span<const double> lifted, std::size_t n_state);

/// Max over blocks of ||block_i - readout^(kron i)||_inf.
double consistency_defect(std::span<const double> lifted, std::size_t n_state,
                          std::size_t n_t);

/// System in z = x / gamma: A_j <- gamma^(j-1) A_j.
PolynomialSystem rescale_system(const PolynomialSystem& sys, double gamma);

/// Block offsets sidecar written next to a MatrixMarket dump of A_c.
void write_block_offsets(std::ostream& os, const CarlemanSystem& cs);

}  // namespace ckin
