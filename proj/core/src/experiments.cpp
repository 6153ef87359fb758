#include "ckin/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "ckin/carleman.hpp"
#include "ckin/error.hpp"
#include "ckin/mech_parser.hpp"

namespace ckin {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

IntegrationConfig parse_integration(const json& j) {
  IntegrationConfig c;
  c.method = parse_method(get_or<std::string>(j, "method", std::string(to_string(c.method))));
  c.dt = get_or(j, "dt", c.dt);
  c.t_end = get_or(j, "t_end", c.t_end);
  c.truncation_order = get_or<std::size_t>(j, "n_t", c.truncation_order);
  if (j.contains("relift_every")) {
    const auto& r = j.at("relift_every");
    if (r.is_string() && r.get<std::string>() == "never") {
      c.relift_every.reset();
    } else if (r.is_number_unsigned() || r.is_number_integer()) {
      const auto k = r.get<long long>();
      if (k < 1) throw ConfigError("relift_every must be a positive integer or \"never\"");
      c.relift_every = static_cast<std::size_t>(k);
    } else {
      throw ConfigError("relift_every must be a positive integer or \"never\"");
    }
  }
  c.record_stride = get_or<std::size_t>(j, "record_stride", c.record_stride);
  c.divergence_norm_cap = get_or(j, "divergence_norm_cap", c.divergence_norm_cap);
  c.record_lifted = get_or(j, "record_lifted", c.record_lifted);
  c.validate();
  return c;
}

}  // namespace

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("problem")) throw ConfigError("config is missing 'problem'");
  RunConfig cfg;
  const json& p = j.at("problem");
  const auto type = get_or<std::string>(p, "type", "");
  if (type == "scalar") {
    ScalarProblem s;
    s.alpha = get_or(p, "alpha", s.alpha);
    s.y0 = get_or(p, "y0", s.y0);
    cfg.problem = s;
  } else if (type == "mechanism") {
    MechanismProblem m;
    if (!p.contains("file")) throw ConfigError("mechanism problem needs 'file'");
    m.file = resolve(base_dir, p.at("file").get<std::string>());
    if (p.contains("thermo_file")) {
      m.thermo_file = resolve(base_dir, p.at("thermo_file").get<std::string>());
    }
    m.temperature = get_or(p, "temperature", m.temperature);
    m.pressure_atm = get_or(p, "pressure_atm", m.pressure_atm);
    if (p.contains("equivalence_ratio")) m.equivalence_ratio = p.at("equivalence_ratio").get<double>();
    m.fuel = get_or(p, "fuel", m.fuel);
    if (p.contains("oxidizer")) m.oxidizer = p.at("oxidizer").get<std::map<std::string, double>>();
    if (p.contains("initial_mole_fractions")) {
      m.initial_mole_fractions = p.at("initial_mole_fractions").get<std::map<std::string, double>>();
    }
    const bool has_phi = m.equivalence_ratio.has_value();
    const bool has_x = !m.initial_mole_fractions.empty();
    if (has_phi == has_x) {
      throw ConfigError("mechanism problem needs exactly one of 'equivalence_ratio' and "
                        "'initial_mole_fractions'");
    }
    if (has_phi && !(*m.equivalence_ratio > 0.0)) {
      throw ConfigError("equivalence_ratio must be positive");
    }
    if (!(m.temperature > 0.0) || !(m.pressure_atm > 0.0)) {
      throw ConfigError("temperature and pressure must be positive");
    }
    cfg.problem = m;
  } else {
    throw ConfigError("problem.type must be \"scalar\" or \"mechanism\"");
  }

  cfg.integration = parse_integration(j.value("integration", json::object()));

  const json ref = j.value("reference", json::object());
  cfg.reference.dt = get_or(ref, "dt", std::holds_alternative<ScalarProblem>(cfg.problem)
                                           ? 1e-6
                                           : cfg.reference.dt);
  if (!(cfg.reference.dt > 0.0)) throw ConfigError("reference.dt must be positive");

  const json out = j.value("output", json::object());
  cfg.output.directory = resolve(base_dir, get_or<std::string>(out, "directory", "."));
  cfg.output.concentrations = get_or(out, "concentrations", false);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

PolynomialSystem scalar_system(double alpha) {
  return {1, {SparseMatrix(1, 1), SparseMatrix(1, 1, {{0, 0, -alpha}})}};
}

Vector initial_mole_fractions(const Mechanism& mech, double phi, const std::string& fuel,
                              const std::map<std::string, double>& oxidizer) {
  if (!(phi > 0.0)) throw InvalidArgument("equivalence ratio must be positive");
  const auto fuel_idx = mech.find_species(fuel);
  if (!fuel_idx) throw InvalidArgument("unknown fuel '" + fuel + "'");
  const auto& comp = mech.species()[*fuel_idx].composition;
  const auto count = [&](const char* el) {
    const auto it = comp.find(el);
    return it == comp.end() ? 0.0 : static_cast<double>(it->second);
  };
  // O2 needed to burn one fuel molecule to CO2 and H2O.
  const double o2_per_fuel = count("C") + count("H") / 4.0 - count("O") / 2.0;
  if (!(o2_per_fuel > 0.0)) throw InvalidArgument("fuel '" + fuel + "' needs no oxygen");

  double ox_total = 0.0;
  for (const auto& [name, x] : oxidizer) {
    if (!mech.find_species(name)) throw InvalidArgument("oxidizer species '" + name + "' missing");
    if (x < 0.0) throw InvalidArgument("negative oxidizer fraction");
    ox_total += x;
  }
  const auto o2 = oxidizer.find("O2");
  if (o2 == oxidizer.end() || o2->second <= 0.0) {
    throw InvalidArgument("oxidizer must contain O2");
  }
  // Per mole of oxidizer stream.
  const double fuel_moles = phi * (o2->second / ox_total) / o2_per_fuel;
  const double total = 1.0 + fuel_moles;

  Vector x(mech.species_count(), 0.0);
  x[*fuel_idx] += fuel_moles / total;
  for (const auto& [name, frac] : oxidizer) {
    x[mech.species_index(name)] += (frac / ox_total) / total;
  }
  return x;
}

Vector initial_concentrations(const Mechanism& mech, double temperature, double pressure_atm,
                              double phi, const std::string& fuel,
                              const std::map<std::string, double>& oxidizer) {
  Vector x = initial_mole_fractions(mech, phi, fuel, oxidizer);
  const double c_total = pressure_atm / (constants::kGasConstantAtmCm3 * temperature);
  for (double& v : x) v *= c_total;
  return x;
}

Problem build_problem(const RunConfig& cfg) {
  if (const auto* s = std::get_if<ScalarProblem>(&cfg.problem)) {
    return {scalar_system(s->alpha), {s->y0}, {"y"}, std::nullopt};
  }
  const auto& m = std::get<MechanismProblem>(cfg.problem);
  Mechanism mech = load_mechanism(m.file, m.thermo_file);
  Vector c0;
  if (m.equivalence_ratio) {
    c0 = initial_concentrations(mech, m.temperature, m.pressure_atm, *m.equivalence_ratio, m.fuel,
                                m.oxidizer);
  } else {
    Vector x(mech.species_count(), 0.0);
    double sum = 0.0;
    for (const auto& [name, frac] : m.initial_mole_fractions) {
      const auto i = mech.find_species(name);
      if (!i) throw ConfigError("initial_mole_fractions: unknown species '" + name + "'");
      if (frac < 0.0) throw ConfigError("initial_mole_fractions: negative value");
      x[*i] = frac;
      sum += frac;
    }
    if (!(sum > 0.0)) throw ConfigError("initial_mole_fractions sum to zero");
    const double c_total = m.pressure_atm / (constants::kGasConstantAtmCm3 * m.temperature);
    for (double& v : x) v = v / sum * c_total;
    c0 = std::move(x);
  }
  PolynomialSystem sys = to_polynomial(mech, m.temperature);
  auto names = mech.species_names();
  return {std::move(sys), std::move(c0), std::move(names), std::move(mech)};
}

ErrorReport error_metrics(const Trajectory& test, const Trajectory& ref) {
  const double dt_test = test.config.dt;
  const double dt_ref = ref.config.dt;
  const double ratio = dt_test / dt_ref;
  if (!(dt_ref > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-6 || std::round(ratio) < 1.0) {
    throw MisalignedGrids("reference step " + detail::num(dt_ref) +
                          " does not divide test step " + detail::num(dt_test));
  }
  ErrorReport rep;
  double sum_sq = 0.0;
  double best = -1.0;
  for (std::size_t k = 0; k < test.size(); ++k) {
    const double t = test.times[k];
    const auto it = std::lower_bound(ref.times.begin(), ref.times.end(), t - 1e-6 * dt_ref);
    if (it == ref.times.end() || std::abs(*it - t) > 1e-6 * dt_ref) {
      throw MisalignedGrids("reference has no record at t = " + detail::num(t));
    }
    const Vector& r = ref.states[static_cast<std::size_t>(it - ref.times.begin())];
    const Vector& x = test.states[k];
    if (r.size() != x.size()) throw ShapeMismatch("error_metrics: state sizes differ");
    Vector e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      e[i] = x[i] - r[i];
      sum_sq += e[i] * e[i];
      if (std::abs(e[i]) > best) {
        best = std::abs(e[i]);
        rep.representative_error = e[i];
        rep.time_of_max = t;
        rep.variable_of_max = i;
      }
    }
    rep.times.push_back(t);
    rep.errors.push_back(std::move(e));
  }
  rep.max_abs_error = std::max(best, 0.0);
  rep.l2_error = rep.times.empty() ? 0.0 : std::sqrt(sum_sq / static_cast<double>(rep.times.size()));
  return rep;
}

ErrorReport select_variables(const ErrorReport& report, std::span<const std::size_t> variables) {
  ErrorReport out;
  out.times = report.times;
  double sum_sq = 0.0;
  double best = -1.0;
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    Vector e;
    for (std::size_t v : variables) {
      const double x = report.errors[k].at(v);
      e.push_back(x);
      sum_sq += x * x;
      if (std::abs(x) > best) {
        best = std::abs(x);
        out.representative_error = x;
        out.time_of_max = report.times[k];
        out.variable_of_max = v;
      }
    }
    out.errors.push_back(std::move(e));
  }
  out.max_abs_error = std::max(best, 0.0);
  out.l2_error = out.times.empty() ? 0.0 : std::sqrt(sum_sq / static_cast<double>(out.times.size()));
  return out;
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("CKIN_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> sweep(const Problem& problem, const IntegrationConfig& base,
                            const ReferenceSettings& reference, std::span<const double> dt_grid,
                            std::span<const std::size_t> nt_grid, std::size_t workers) {
  if (dt_grid.empty() || nt_grid.empty()) throw ConfigError("sweep grids must be nonempty");

  std::vector<IntegrationConfig> runs;
  std::vector<double> record_times;
  for (double dt : dt_grid) {
    IntegrationConfig c = base;
    c.dt = dt;
    c.validate();
    const std::size_t steps = c.step_count();
    for (std::size_t s = 0; s <= steps; ++s) {
      if (s % c.record_stride == 0 || s == steps) record_times.push_back(static_cast<double>(s) * dt);
    }
    for (std::size_t nt : nt_grid) {
      c.truncation_order = nt;
      runs.push_back(c);
    }
  }
  std::sort(record_times.begin(), record_times.end());
  record_times.erase(std::unique(record_times.begin(), record_times.end()), record_times.end());

  const Trajectory ref = reference_integrate(problem.system, problem.initial_state, reference.dt,
                                             base.t_end, record_times, base.divergence_norm_cap);
  if (ref.diverged()) throw Error("sweep: reference integration diverged");

  std::vector<SweepRow> rows(runs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto worker = [&] {
    for (std::size_t k = next++; k < runs.size(); k = next++) {
      try {
        const auto& c = runs[k];
        SweepRow row;
        row.dt = c.dt;
        row.truncation_order = c.truncation_order;
        if (c.is_carleman()) {
          const CarlemanSystem cs(problem.system, c.truncation_order);
          row.matrix_dim = cs.dim();
          row.nnz = cs.matrix().nnz();
        } else {
          row.matrix_dim = problem.system.n_state();
          row.nnz = 0;
          for (const auto& a : problem.system.coeffs()) row.nnz += a.nnz();
        }
        const auto start = std::chrono::steady_clock::now();
        const Trajectory traj = simulate(problem.system, problem.initial_state, c);
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        row.diverged = traj.diverged();
        if (!row.diverged) {
          const ErrorReport rep = error_metrics(traj, ref);
          row.representative_error = rep.representative_error;
          row.max_abs_error = rep.max_abs_error;
          row.l2_error = rep.l2_error;
        }
        rows[k] = row;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t n_workers =
      std::clamp<std::size_t>(workers == 0 ? default_worker_count() : workers, 1, runs.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.dt != b.dt ? a.dt < b.dt : a.truncation_order < b.truncation_order;
  });
  return rows;
}

CostEstimate cost_estimate(std::size_t n_state, std::size_t n_t,
                           std::span<const std::size_t> nnz_per_degree) {
  CostEstimate est;
  est.dim = carleman_dimension(n_state, n_t);
  if (n_t >= 2) {
    est.ratio_to_prev_order =
        static_cast<double>(est.dim) / static_cast<double>(carleman_dimension(n_state, n_t - 1));
  }
  // nnz(T_j^i) <= i * nnz(A_j) * n^(i-1)
  std::size_t nnz = 0;
  std::size_t lower = 1;
  for (std::size_t i = 1; i <= n_t; ++i) {
    for (std::size_t j = 1; j <= nnz_per_degree.size() && i + j - 1 <= n_t; ++j) {
      const std::size_t block = detail::checked_mul(
          detail::checked_mul(i, nnz_per_degree[j - 1], "nnz estimate"), lower, "nnz estimate");
      nnz = detail::checked_add(nnz, block, "nnz estimate");
    }
    lower = detail::checked_mul(lower, n_state, "nnz estimate");
  }
  est.nnz_estimate = nnz;
  return est;
}

}  // namespace ckin
