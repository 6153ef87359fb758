#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ckin/integrators.hpp"
#include "ckin/kinetics.hpp"
#include "ckin/poly_ode.hpp"

namespace ckin {

/// dy/dt = -alpha y^2.
struct ScalarProblem {
  double alpha = 1.0;
  double y0 = 1.0;
};

struct MechanismProblem {
  std::filesystem::path file;
  std::optional<std::filesystem::path> thermo_file;
  double temperature = 2000.0;  // K
  double pressure_atm = 1.0;
  std::optional<double> equivalence_ratio;
  std::string fuel = "H2";
  std::map<std::string, double> oxidizer{{"O2", 0.21}, {"N2", 0.79}};
  /// Used instead of equivalence_ratio when present.
  std::map<std::string, double> initial_mole_fractions;
};

struct ReferenceSettings {
  double dt = 1e-10;
};

struct OutputSettings {
  std::filesystem::path directory = ".";
  /// Mechanism runs write mole fractions unless this is set.
  bool concentrations = false;
};

struct RunConfig {
  std::variant<ScalarProblem, MechanismProblem> problem;
  IntegrationConfig integration;
  ReferenceSettings reference;
  OutputSettings output;
};

/// Parses a JSON run configuration; relative paths resolve against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// A polynomial system ready to integrate, plus labels for output.
struct Problem {
  PolynomialSystem system;
  Vector initial_state;
  std::vector<std::string> variable_names;
  std::optional<Mechanism> mechanism;
};

PolynomialSystem scalar_system(double alpha);
Problem build_problem(const RunConfig& cfg);

/// Mole fractions for a fuel/oxidizer mixture at equivalence ratio phi.
Vector initial_mole_fractions(const Mechanism& mech, double phi, const std::string& fuel,
                              const std::map<std::string, double>& oxidizer);

/// c_i = x_i P / (R T) in mol/cm^3.
Vector initial_concentrations(const Mechanism& mech, double temperature, double pressure_atm,
                              double phi, const std::string& fuel,
                              const std::map<std::string, double>& oxidizer);

struct ErrorReport {
  std::vector<double> times;
  std::vector<Vector> errors;  // test - ref, per time, per variable
  double representative_error = 0.0;
  double max_abs_error = 0.0;
  double l2_error = 0.0;
  double time_of_max = 0.0;
  std::size_t variable_of_max = 0;
};

/// Signed errors of `test` against `ref` at every recorded time of `test`.
/// The reference step must divide the test step.
ErrorReport error_metrics(const Trajectory& test, const Trajectory& ref);

/// Restricts an error report to a subset of variables.
ErrorReport select_variables(const ErrorReport& report, std::span<const std::size_t> variables);

struct SweepRow {
  double dt = 0.0;
  std::size_t truncation_order = 0;
  bool diverged = false;
  std::optional<double> representative_error;
  std::optional<double> max_abs_error;
  std::optional<double> l2_error;
  double wall_seconds = 0.0;
  std::size_t matrix_dim = 0;
  std::size_t nnz = 0;
};

/// One run per (dt, n_t), each scored against a single reference run.
/// Rows come back sorted by (dt, n_t).
std::vector<SweepRow> sweep(const Problem& problem, const IntegrationConfig& base,
                            const ReferenceSettings& reference, std::span<const double> dt_grid,
                            std::span<const std::size_t> nt_grid, std::size_t workers = 0);

struct CostEstimate {
  std::size_t dim = 0;
  std::size_t nnz_estimate = 0;
  std::optional<double> ratio_to_prev_order;
};

/// Lifted dimension and an upper bound on nnz(A_c) from nnz(A_j), j = 1..degree.
CostEstimate cost_estimate(std::size_t n_state, std::size_t n_t,
                           std::span<const std::size_t> nnz_per_degree = {});

/// Worker count for sweeps: CKIN_WORKERS when set, else hardware concurrency.
std::size_t default_worker_count();

}  // namespace ckin
