#include "ckin/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ckin/error.hpp"

namespace ckin {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ExplicitCarleman: return "explicit_carleman";
    case Method::ImplicitCarleman: return "implicit_carleman";
    case Method::JacobianLinearized: return "jacobian_linearized";
    case Method::ReferenceEuler: return "reference_euler";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::ExplicitCarleman, Method::ImplicitCarleman, Method::JacobianLinearized,
                   Method::ReferenceEuler}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown integration method '" + std::string(name) + "'");
}

void IntegrationConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw ConfigError("t_end must be at least dt");
  if (record_stride == 0) throw ConfigError("record_stride must be at least 1");
  if (is_carleman() && truncation_order == 0) {
    throw ConfigError("truncation order must be at least 1");
  }
  if (relift_every && *relift_every == 0) throw ConfigError("relift_every must be at least 1");
  if (!(divergence_norm_cap > 0.0)) throw ConfigError("divergence_norm_cap must be positive");
}

std::size_t IntegrationConfig::step_count() const {
  // Tolerate representation error in t_end / dt before rounding up.
  const double ratio = t_end / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(ratio));
}

std::shared_ptr<const BlockUpperTriangularSolver> ImplicitFactorCache::get(
    const CarlemanSystem& cs, double dt) {
  std::lock_guard lock(mu_);
  if (owner_ != &cs) {
    solvers_.clear();
    owner_ = &cs;
  }
  auto& slot = solvers_[dt];
  if (!slot) slot = std::make_shared<const BlockUpperTriangularSolver>(implicit_operator(cs, dt));
  return slot;
}

std::size_t ImplicitFactorCache::size() const {
  std::lock_guard lock(mu_);
  return solvers_.size();
}

BlockMatrix implicit_operator(const CarlemanSystem& cs, double dt) {
  const BlockMatrix& a = cs.matrix();
  BlockMatrix m(a.offsets());
  for (const auto& [key, block] : a.blocks()) {
    SparseMatrix b = scale(block, -dt);
    if (key.first == key.second) b = add(identity(block.rows()), b);
    m.set_block(key.first, key.second, std::move(b));
  }
  for (std::size_t b = 0; b < a.block_count(); ++b) {
    if (!m.has_block(b, b)) m.set_block(b, b, identity(a.block_size(b)));
  }
  return m;
}

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_lifted(const CarlemanSystem& cs, std::span<const double> lifted) {
  if (lifted.size() != cs.dim()) {
    throw ShapeMismatch("lifted state has length " + std::to_string(lifted.size()) +
                        ", system dimension is " + std::to_string(cs.dim()));
  }
}

}  // namespace

Vector explicit_carleman_step(const CarlemanSystem& cs, std::span<const double> lifted,
                              double dt) {
  check_lifted(cs, lifted);
  Vector next(lifted.begin(), lifted.end());
  const auto& off = cs.offsets();
  const BlockMatrix& a = cs.matrix();
  for (const auto& [key, block] : a.blocks()) {
    spmv_accumulate(block, lifted.subspan(off[key.second], a.block_size(key.second)), dt,
                    std::span<double>(next).subspan(off[key.first], a.block_size(key.first)));
  }
  if (!all_finite(next)) throw DivergenceDetected(0.0, "explicit Carleman step: non-finite state");
  return next;
}

Vector implicit_carleman_step(const CarlemanSystem& cs, std::span<const double> lifted,
                              double dt, ImplicitFactorCache* cache) {
  check_lifted(cs, lifted);
  Vector next;
  if (cache != nullptr) {
    next = cache->get(cs, dt)->solve(lifted);
  } else {
    next = solve_block_upper_triangular(implicit_operator(cs, dt), lifted);
  }
  if (!all_finite(next)) throw DivergenceDetected(0.0, "implicit Carleman step: non-finite state");
  return next;
}

Vector jacobian_linearized_step(const PolynomialSystem& sys, std::span<const double> u,
                                double dt) {
  const SparseMatrix j = jacobian(sys, u);
  const SparseMatrix m = add(identity(sys.n_state()), scale(j, -dt));
  Vector rhs = eval_rhs(sys, u);
  for (double& v : rhs) v *= dt;
  const Vector du = solve_sparse_lu(m, rhs);
  Vector next(u.begin(), u.end());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += du[i];
  if (!all_finite(next)) throw DivergenceDetected(0.0, "Jacobian-linearized step: non-finite state");
  return next;
}

Trajectory reference_integrate(const PolynomialSystem& sys, std::span<const double> x0,
                               double dt_ref, double t_end, std::span<const double> record_times,
                               double divergence_norm_cap) {
  if (!(dt_ref > 0.0)) throw ConfigError("reference dt must be positive");
  if (x0.size() != sys.n_state()) throw ShapeMismatch("reference_integrate: x0 length mismatch");

  std::vector<std::size_t> record_steps;
  record_steps.reserve(record_times.size());
  for (double t : record_times) {
    const double ratio = t / dt_ref;
    const double k = std::round(ratio);
    if (t < 0.0 || std::abs(ratio - k) > 1e-6) {
      throw MisalignedGrids("record time " + detail::num(t) +
                            " is not a multiple of the reference step " + detail::num(dt_ref));
    }
    record_steps.push_back(static_cast<std::size_t>(k));
  }
  std::sort(record_steps.begin(), record_steps.end());
  record_steps.erase(std::unique(record_steps.begin(), record_steps.end()), record_steps.end());

  IntegrationConfig cfg;
  cfg.method = Method::ReferenceEuler;
  cfg.dt = dt_ref;
  cfg.t_end = t_end;
  cfg.relift_every.reset();
  cfg.divergence_norm_cap = divergence_norm_cap;

  Trajectory traj;
  traj.config = cfg;
  Vector x(x0.begin(), x0.end());
  const std::size_t last = std::min(record_steps.empty() ? 0 : record_steps.back(),
                                    cfg.step_count());
  std::size_t next_record = 0;
  for (std::size_t step = 0;; ++step) {
    if (next_record < record_steps.size() && record_steps[next_record] == step) {
      traj.times.push_back(static_cast<double>(step) * dt_ref);
      traj.states.push_back(x);
      ++next_record;
    }
    if (step >= last) break;
    const Vector f = eval_rhs(sys, x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dt_ref * f[i];
    if (!all_finite(x) || norm_inf(x) > divergence_norm_cap) {
      traj.diverged_at = static_cast<double>(step + 1) * dt_ref;
      break;
    }
  }
  return traj;
}

Trajectory simulate(const PolynomialSystem& sys, std::span<const double> x0,
                    const IntegrationConfig& cfg) {
  cfg.validate();
  if (x0.size() != sys.n_state()) throw ShapeMismatch("simulate: x0 length mismatch");

  Trajectory traj;
  traj.config = cfg;
  const std::size_t n = sys.n_state();
  const std::size_t steps = cfg.step_count();

  std::optional<CarlemanSystem> cs;
  ImplicitFactorCache cache;
  Vector state(x0.begin(), x0.end());
  if (cfg.is_carleman()) {
    cs.emplace(sys, cfg.truncation_order);
    state = lift(x0, cfg.truncation_order);
  }

  const auto record = [&](std::size_t step) {
    traj.times.push_back(static_cast<double>(step) * cfg.dt);
    traj.states.push_back(cfg.is_carleman() ? readout(state, n) : state);
    if (cfg.record_lifted && cfg.is_carleman()) traj.lifted.push_back(state);
  };
  record(0);

  for (std::size_t step = 1; step <= steps; ++step) {
    try {
      switch (cfg.method) {
        case Method::ExplicitCarleman:
          state = explicit_carleman_step(*cs, state, cfg.dt);
          break;
        case Method::ImplicitCarleman:
          state = implicit_carleman_step(*cs, state, cfg.dt, &cache);
          break;
        case Method::JacobianLinearized:
          state = jacobian_linearized_step(sys, state, cfg.dt);
          break;
        case Method::ReferenceEuler: {
          const Vector f = eval_rhs(sys, state);
          for (std::size_t i = 0; i < n; ++i) state[i] += cfg.dt * f[i];
          break;
        }
      }
    } catch (const DivergenceDetected&) {
      traj.diverged_at = static_cast<double>(step) * cfg.dt;
      return traj;
    }
    const std::span<const double> phys(state.data(), n);
    if (!all_finite(state) || norm_inf(phys) > cfg.divergence_norm_cap) {
      traj.diverged_at = static_cast<double>(step) * cfg.dt;
      return traj;
    }
    if (step % cfg.record_stride == 0 || step == steps) record(step);
    if (cfg.is_carleman() && cfg.relift_every && step % *cfg.relift_every == 0) {
      state = lift(readout(state, n), cfg.truncation_order);
    }
  }
  return traj;
}

}  // namespace ckin
