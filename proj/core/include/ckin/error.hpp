#pragma once

#include <cstddef>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace ckin {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A size computation (Kronecker dimension, lifted length) exceeds what can be
/// addressed on this platform.
class DimensionOverflow : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// A diagonal block of a block upper-triangular system failed to factorize.
class SingularBlock : public SingularMatrix {
 public:
  SingularBlock(std::size_t block, const std::string& what)
      : SingularMatrix(what), block_(block) {}
  std::size_t block_index() const noexcept { return block_; }

 private:
  std::size_t block_;
};

/// A time step produced a non-finite value or blew past the norm cap.
class DivergenceDetected : public Error {
 public:
  DivergenceDetected(double time, const std::string& what)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Temperature outside the validity range of a thermodynamic fit.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Reaction molecularity or polynomial degree beyond what is supported.
class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

class MissingThermo : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MisalignedGrids : public Error {
 public:
  using Error::Error;
};

namespace detail {

/// Compact "%g" rendering of a double for diagnostics.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Largest element count we hand to std::vector.
inline constexpr std::size_t kMaxExtent =
    static_cast<std::size_t>(std::numeric_limits<std::ptrdiff_t>::max()) / sizeof(double);

inline std::size_t checked_mul(std::size_t a, std::size_t b, const char* what) {
  if (a != 0 && b > kMaxExtent / a) {
    throw DimensionOverflow(std::string(what) + ": " + std::to_string(a) + " x " +
                            std::to_string(b) + " exceeds the addressable range");
  }
  return a * b;
}

inline std::size_t checked_add(std::size_t a, std::size_t b, const char* what) {
  if (b > kMaxExtent - a) {
    throw DimensionOverflow(std::string(what) + ": " + std::to_string(a) + " + " +
                            std::to_string(b) + " exceeds the addressable range");
  }
  return a + b;
}

inline std::size_t checked_pow(std::size_t base, std::size_t exp, const char* what) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) r = checked_mul(r, base, what);
  return r;
}

}  // namespace detail
}  // namespace ckin
