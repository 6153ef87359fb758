#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ckin/sparse.hpp"

namespace ckin {

/// Right-hand side F(x) = sum_j A_j x^(kron j), j = 1..degree.
///
/// A_j has shape n_state x n_state^j. Column c of A_j addresses the monomial
/// x[d_1] * ... * x[d_j] where (d_1..d_j) are the base-n_state digits of c,
/// most significant first. There is no constant term.
class PolynomialSystem {
 public:
  PolynomialSystem() = default;
  PolynomialSystem(std::size_t n_state, std::vector<SparseMatrix> coeffs);

  std::size_t n_state() const noexcept { return n_state_; }
  std::size_t degree() const noexcept { return coeffs_.size(); }
  const std::vector<SparseMatrix>& coeffs() const noexcept { return coeffs_; }
  /// A_j for 1 <= j <= degree.
  const SparseMatrix& coeff(std::size_t j) const { return coeffs_.at(j - 1); }

  friend bool operator==(const PolynomialSystem&, const PolynomialSystem&) = default;

 private:
  std::size_t n_state_ = 0;
  std::vector<SparseMatrix> coeffs_;
};

/// x (kron) x (kron) ... i times; length n^i.
Vector kron_power(std::span<const double> x, std::size_t i);

/// Contribution of the single term A_j x^(kron j).
Vector eval_term(const PolynomialSystem& sys, std::size_t j, std::span<const double> x);

Vector eval_rhs(const PolynomialSystem& sys, std::span<const double> x);

/// Analytic dF/dx.
SparseMatrix jacobian(const PolynomialSystem& sys, std::span<const double> x);

/// Base-n digits of a Kronecker column index, most significant first.
void decode_monomial(std::size_t col, std::size_t n, std::span<std::size_t> digits);
std::size_t encode_monomial(std::span<const std::size_t> digits, std::size_t n);

}  // namespace ckin
