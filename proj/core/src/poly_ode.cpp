#include "ckin/poly_ode.hpp"

#include <string>

#include "ckin/error.hpp"

namespace ckin {

PolynomialSystem::PolynomialSystem(std::size_t n_state, std::vector<SparseMatrix> coeffs)
    : n_state_(n_state), coeffs_(std::move(coeffs)) {
  if (n_state_ == 0) throw InvalidArgument("PolynomialSystem: n_state must be at least 1");
  if (coeffs_.empty()) throw InvalidArgument("PolynomialSystem: degree must be at least 1");
  std::size_t width = 1;
  for (std::size_t j = 1; j <= coeffs_.size(); ++j) {
    width = detail::checked_mul(width, n_state_, "PolynomialSystem column count");
    const auto& a = coeffs_[j - 1];
    if (a.rows() != n_state_ || a.cols() != width) {
      throw ShapeMismatch("PolynomialSystem: A_" + std::to_string(j) + " is " +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                          ", expected " + std::to_string(n_state_) + "x" +
                          std::to_string(width));
    }
  }
}

Vector kron_power(std::span<const double> x, std::size_t i) {
  if (i == 0) throw InvalidArgument("kron_power: exponent must be at least 1");
  detail::checked_pow(x.size(), i, "kron_power length");
  Vector out(x.begin(), x.end());
  for (std::size_t k = 1; k < i; ++k) out = kron_vec(out, x);
  return out;
}

void decode_monomial(std::size_t col, std::size_t n, std::span<std::size_t> digits) {
  for (std::size_t m = digits.size(); m-- > 0;) {
    digits[m] = col % n;
    col /= n;
  }
}

std::size_t encode_monomial(std::span<const std::size_t> digits, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t d : digits) c = c * n + d;
  return c;
}

namespace {

void check_state(const PolynomialSystem& sys, std::span<const double> x, const char* who) {
  if (x.size() != sys.n_state()) {
    throw ShapeMismatch(std::string(who) + ": state length " + std::to_string(x.size()) +
                        " != n_state " + std::to_string(sys.n_state()));
  }
}

// Accumulates A_j x^(kron j) into y without materializing the Kronecker power.
void accumulate_term(const SparseMatrix& a, std::size_t j, std::size_t n,
                     std::span<const double> x, std::span<double> y) {
  std::vector<std::size_t> digits(j);
  const auto ptr = a.row_ptr();
  const auto col = a.col_idx();
  const auto val = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    for (std::size_t p = ptr[r]; p < ptr[r + 1]; ++p) {
      decode_monomial(col[p], n, digits);
      double mono = 1.0;
      for (std::size_t d : digits) mono *= x[d];
      s += val[p] * mono;
    }
    y[r] += s;
  }
}

}  // namespace

Vector eval_term(const PolynomialSystem& sys, std::size_t j, std::span<const double> x) {
  check_state(sys, x, "eval_term");
  if (j == 0 || j > sys.degree()) throw InvalidArgument("eval_term: degree out of range");
  Vector y(sys.n_state(), 0.0);
  accumulate_term(sys.coeff(j), j, sys.n_state(), x, y);
  return y;
}

Vector eval_rhs(const PolynomialSystem& sys, std::span<const double> x) {
  check_state(sys, x, "eval_rhs");
  Vector y(sys.n_state(), 0.0);
  for (std::size_t j = 1; j <= sys.degree(); ++j) {
    accumulate_term(sys.coeff(j), j, sys.n_state(), x, y);
  }
  return y;
}

SparseMatrix jacobian(const PolynomialSystem& sys, std::span<const double> x) {
  check_state(sys, x, "jacobian");
  const std::size_t n = sys.n_state();
  std::vector<Triplet> t;
  for (std::size_t j = 1; j <= sys.degree(); ++j) {
    std::vector<std::size_t> digits(j);
    for (const auto& e : sys.coeff(j).triplets()) {
      decode_monomial(e.col, n, digits);
      // Product rule: differentiate each factor in turn.
      for (std::size_t k = 0; k < j; ++k) {
        double rest = e.value;
        for (std::size_t m = 0; m < j; ++m) {
          if (m != k) rest *= x[digits[m]];
        }
        t.push_back({e.row, digits[k], rest});
      }
    }
  }
  return {n, n, std::move(t)};
}

}  // namespace ckin
