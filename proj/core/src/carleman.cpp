#include "ckin/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "ckin/error.hpp"

namespace ckin {

std::size_t carleman_dimension(std::size_t n_state, std::size_t n_t) {
  return carleman_offsets(n_state, n_t).back();
}

std::vector<std::size_t> carleman_offsets(std::size_t n_state, std::size_t n_t) {
  if (n_state == 0) throw InvalidArgument("carleman: n_state must be at least 1");
  if (n_t == 0) throw InvalidArgument("carleman: truncation order must be at least 1");
  std::vector<std::size_t> off{0};
  std::size_t width = 1;
  for (std::size_t i = 1; i <= n_t; ++i) {
    try {
      width = detail::checked_mul(width, n_state, "Carleman block size");
      off.push_back(detail::checked_add(off.back(), width, "Carleman dimension"));
    } catch (const DimensionOverflow& e) {
      throw DimensionOverflow(std::string(e.what()) + " at truncation order " +
                              std::to_string(i) + " with " + std::to_string(n_state) +
                              " states; use a smaller truncation order");
    }
  }
  return off;
}

SparseMatrix transfer_block(const SparseMatrix& a_j, std::size_t j, std::size_t i,
                            std::size_t n_state) {
  if (i == 0 || j == 0) throw InvalidArgument("transfer_block: i and j must be at least 1");
  const std::size_t width = detail::checked_pow(n_state, j, "transfer_block");
  if (a_j.rows() != n_state || a_j.cols() != width) {
    throw ShapeMismatch("transfer_block: A_" + std::to_string(j) + " must be " +
                        std::to_string(n_state) + "x" + std::to_string(width));
  }
  SparseMatrix t = a_j;
  const SparseMatrix id_n = identity(n_state);
  std::size_t lower = 1;  // n^(k-1)
  for (std::size_t k = 2; k <= i; ++k) {
    lower = detail::checked_mul(lower, n_state, "transfer_block");
    t = add(kron(a_j, identity(lower)), kron(id_n, t));
  }
  return t;
}

CarlemanSystem::CarlemanSystem(PolynomialSystem base, std::size_t n_t)
    : base_(std::move(base)), n_t_(n_t), a_c_(carleman_offsets(base_.n_state(), n_t)) {
  const std::size_t n = base_.n_state();
  for (std::size_t i = 1; i <= n_t_; ++i) {
    for (std::size_t j = 1; j <= base_.degree() && i + j - 1 <= n_t_; ++j) {
      a_c_.set_block(i - 1, i + j - 2, transfer_block(base_.coeff(j), j, i, n));
    }
  }
}

CarlemanSystem assemble(const PolynomialSystem& sys, std::size_t n_t) {
  return CarlemanSystem(sys, n_t);
}

Vector lift(std::span<const double> x, std::size_t n_t) {
  if (x.empty()) throw InvalidArgument("lift: empty state");
  const auto off = carleman_offsets(x.size(), n_t);
  Vector out;
  out.reserve(off.back());
  Vector power(x.begin(), x.end());
  out.insert(out.end(), power.begin(), power.end());
  for (std::size_t i = 2; i <= n_t; ++i) {
    power = kron_vec(power, x);
    out.insert(out.end(), power.begin(), power.end());
  }
  return out;
}

Vector readout(std::span<const double> lifted, std::size_t n_state) {
  if (lifted.size() < n_state) throw ShapeMismatch("readout: lifted vector too short");
  return Vector(lifted.begin(), lifted.begin() + static_cast<std::ptrdiff_t>(n_state));
}

double consistency_defect(std::span<const double> lifted, std::size_t n_state,
                          std::size_t n_t) {
  const auto off = carleman_offsets(n_state, n_t);
  if (lifted.size() != off.back()) throw ShapeMismatch("consistency_defect: length mismatch");
  const Vector exact = lift(readout(lifted, n_state), n_t);
  double defect = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    defect = std::max(defect, std::abs(lifted[k] - exact[k]));
  }
  return defect;
}

PolynomialSystem rescale_system(const PolynomialSystem& sys, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("rescale_system: gamma must be positive and finite");
  }
  std::vector<SparseMatrix> coeffs;
  coeffs.reserve(sys.degree());
  for (std::size_t j = 1; j <= sys.degree(); ++j) {
    coeffs.push_back(scale(sys.coeff(j), std::pow(gamma, static_cast<double>(j - 1))));
  }
  return {sys.n_state(), std::move(coeffs)};
}

void write_block_offsets(std::ostream& os, const CarlemanSystem& cs) {
  os << "# n_state " << cs.n_state() << " truncation_order " << cs.truncation_order()
     << " dim " << cs.dim() << '\n';
  os << "# block offsets (0-based, cumulative)\n";
  for (std::size_t off : cs.offsets()) os << off << '\n';
}

}  // namespace ckin
