#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ckin/carleman.hpp"
#include "ckin/poly_ode.hpp"
#include "ckin/sparse_lu.hpp"

namespace ckin {

enum class Method { ExplicitCarleman, ImplicitCarleman, JacobianLinearized, ReferenceEuler };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);  // throws ConfigError

struct IntegrationConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Method method = Method::ImplicitCarleman;
  std::size_t truncation_order = 2;
  /// Re-lift the readout every k steps; nullopt keeps one lift for the whole run.
  std::optional<std::size_t> relift_every = 1;
  std::size_t record_stride = 1;
  double divergence_norm_cap = 1e12;
  bool record_lifted = false;

  bool is_carleman() const noexcept {
    return method == Method::ExplicitCarleman || method == Method::ImplicitCarleman;
  }
  /// Throws ConfigError on dt <= 0, t_end < dt, stride 0, n_t 0 or relift 0.
  void validate() const;
  /// Number of steps covering [0, t_end].
  std::size_t step_count() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> lifted;  // filled when record_lifted is set
  std::optional<double> diverged_at;
  IntegrationConfig config;

  std::size_t size() const noexcept { return times.size(); }
  bool diverged() const noexcept { return diverged_at.has_value(); }
};

/// Factorizations of (I - dt A_c) keyed by dt for one CarlemanSystem.
/// Thread-safe; entries are created once and then shared read-only.
class ImplicitFactorCache {
 public:
  std::shared_ptr<const BlockUpperTriangularSolver> get(const CarlemanSystem& cs, double dt);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  const CarlemanSystem* owner_ = nullptr;
  std::map<double, std::shared_ptr<const BlockUpperTriangularSolver>> solvers_;
};

/// I - dt * A_c with the block layout of A_c.
BlockMatrix implicit_operator(const CarlemanSystem& cs, double dt);

/// X + dt A_c X. Throws DivergenceDetected on a non-finite result.
Vector explicit_carleman_step(const CarlemanSystem& cs, std::span<const double> lifted,
                              double dt);

/// Solves (I - dt A_c) X' = X. Pass a cache to reuse factorizations across steps.
Vector implicit_carleman_step(const CarlemanSystem& cs, std::span<const double> lifted,
                              double dt, ImplicitFactorCache* cache = nullptr);

/// u + (I - dt J(u))^{-1} dt F(u).
Vector jacobian_linearized_step(const PolynomialSystem& sys, std::span<const double> u,
                                double dt);

/// Forward Euler at dt_ref, recording the state at each requested time.
/// Every record time must be an integer multiple of dt_ref.
Trajectory reference_integrate(const PolynomialSystem& sys, std::span<const double> x0,
                               double dt_ref, double t_end, std::span<const double> record_times,
                               double divergence_norm_cap = 1e12);

/// Runs one configured integration from x0 and records readouts.
/// Divergence halts the run and sets `diverged_at`; it is not thrown.
Trajectory simulate(const PolynomialSystem& sys, std::span<const double> x0,
                    const IntegrationConfig& cfg);

}  // namespace ckin
