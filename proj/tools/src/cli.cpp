#include "ckin_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ckin/carleman.hpp"
#include "ckin/csv.hpp"
#include "ckin/error.hpp"
#include "ckin/experiments.hpp"
#include "ckin/mech_parser.hpp"

namespace ckin::cli {

namespace {

struct Overrides {
  std::optional<std::string> method;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::size_t> n_t;
  std::optional<std::string> relift;
  std::optional<double> reference_dt;
  std::optional<std::string> output;
};

/// With `grids`, --dt and --nt are left for the caller to define as lists.
void add_overrides(CLI::App* app, Overrides& o, bool grids = false) {
  app->add_option("--method", o.method,
                  "explicit_carleman | implicit_carleman | jacobian_linearized | reference_euler");
  if (!grids) app->add_option("--dt", o.dt, "Time step [s]")->check(CLI::PositiveNumber);
  app->add_option("--t-end", o.t_end, "Integration horizon [s]")->check(CLI::PositiveNumber);
  if (!grids) {
    app->add_option("--nt", o.n_t, "Carleman truncation order")->check(CLI::PositiveNumber);
  }
  app->add_option("--relift", o.relift, "Re-lift every k steps, or 'never'");
  app->add_option("--ref-dt", o.reference_dt, "Reference Euler step [s]")
      ->check(CLI::PositiveNumber);
}

RunConfig load_with_overrides(const std::string& path, const Overrides& o) {
  RunConfig cfg = load_run_config(path);
  auto& in = cfg.integration;
  if (o.method) in.method = parse_method(*o.method);
  if (o.dt) in.dt = *o.dt;
  if (o.t_end) in.t_end = *o.t_end;
  if (o.n_t) in.truncation_order = *o.n_t;
  if (o.relift) {
    if (*o.relift == "never") {
      in.relift_every.reset();
    } else {
      try {
        const long k = std::stol(*o.relift);
        if (k < 1) throw ConfigError("--relift must be a positive integer or 'never'");
        in.relift_every = static_cast<std::size_t>(k);
      } catch (const std::logic_error&) {
        throw ConfigError("--relift must be a positive integer or 'never'");
      }
    }
  }
  if (o.reference_dt) cfg.reference.dt = *o.reference_dt;
  in.validate();
  return cfg;
}

std::filesystem::path output_path(const RunConfig& cfg, const std::optional<std::string>& flag,
                                  const char* default_name) {
  return flag ? std::filesystem::path(*flag) : cfg.output.directory / default_name;
}

bool normalize_rows(const RunConfig& cfg) {
  return std::holds_alternative<MechanismProblem>(cfg.problem) && !cfg.output.concentrations;
}

/// Record times of `cfg` (every record_stride steps plus the last step).
std::vector<double> record_times(const IntegrationConfig& cfg) {
  std::vector<double> times;
  const std::size_t steps = cfg.step_count();
  for (std::size_t s = 0; s <= steps; ++s) {
    if (s % cfg.record_stride == 0 || s == steps) times.push_back(static_cast<double>(s) * cfg.dt);
  }
  return times;
}

void print_final(std::ostream& out, const Trajectory& traj, const std::vector<std::string>& names) {
  if (traj.times.empty()) return;
  out << "t=" << format_double(traj.times.back());
  const Vector& x = traj.states.back();
  for (std::size_t i = 0; i < x.size() && i < names.size(); ++i) {
    out << ' ' << names[i] << '=' << format_double(x[i]);
  }
  out << '\n';
}

int cmd_simulate(const std::string& config, const Overrides& o, std::ostream& out,
                 std::ostream& err) {
  const RunConfig cfg = load_with_overrides(config, o);
  const Problem p = build_problem(cfg);
  const Trajectory traj = simulate(p.system, p.initial_state, cfg.integration);
  const auto path = output_path(cfg, o.output, "trajectory.csv");
  write_trajectory_csv(path, traj, p.variable_names, normalize_rows(cfg));
  out << "wrote " << path.string() << " (" << traj.size() << " rows)\n";
  print_final(out, traj, p.variable_names);
  if (traj.diverged()) {
    err << "error: integration diverged at t=" << format_double(*traj.diverged_at) << '\n';
    return kNumerical;
  }
  return kSuccess;
}

int cmd_reference(const std::string& config, const Overrides& o, std::ostream& out,
                  std::ostream& err) {
  RunConfig cfg = load_with_overrides(config, o);
  const Problem p = build_problem(cfg);
  const auto times = record_times(cfg.integration);
  const Trajectory traj =
      reference_integrate(p.system, p.initial_state, cfg.reference.dt, cfg.integration.t_end,
                          times, cfg.integration.divergence_norm_cap);
  const auto path = output_path(cfg, o.output, "reference.csv");
  write_trajectory_csv(path, traj, p.variable_names, normalize_rows(cfg));
  out << "wrote " << path.string() << " (" << traj.size() << " rows)\n";
  print_final(out, traj, p.variable_names);
  if (traj.diverged()) {
    err << "error: reference integration diverged at t=" << format_double(*traj.diverged_at)
        << '\n';
    return kNumerical;
  }
  return kSuccess;
}

int cmd_sweep(const std::string& config, const Overrides& o, const std::vector<double>& dts,
              const std::vector<std::size_t>& nts, std::size_t workers, std::ostream& out) {
  const RunConfig cfg = load_with_overrides(config, o);
  const Problem p = build_problem(cfg);
  const std::vector<double> dt_grid = dts.empty() ? std::vector{cfg.integration.dt} : dts;
  const std::vector<std::size_t> nt_grid =
      nts.empty() ? std::vector{cfg.integration.truncation_order} : nts;
  const auto rows = sweep(p, cfg.integration, cfg.reference, dt_grid, nt_grid, workers);
  const auto path = output_path(cfg, o.output, "sweep.csv");
  write_sweep_csv(path, rows);
  out << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
  for (const auto& r : rows) {
    out << "dt=" << format_double(r.dt) << " n_t=" << r.truncation_order;
    if (r.diverged) {
      out << " diverged\n";
    } else {
      out << " representative_error=" << format_double(*r.representative_error) << '\n';
    }
  }
  return kSuccess;
}

int cmd_assemble(const std::string& config, const Overrides& o, bool dump, std::ostream& out) {
  const RunConfig cfg = load_with_overrides(config, o);
  const Problem p = build_problem(cfg);
  const CarlemanSystem cs(p.system, cfg.integration.truncation_order);
  out << "n_state=" << cs.n_state() << " n_t=" << cs.truncation_order() << " dim=" << cs.dim()
      << " nnz=" << cs.matrix().nnz() << " blocks=" << cs.matrix().blocks().size() << '\n';
  if (dump) {
    const std::filesystem::path prefix = o.output ? std::filesystem::path(*o.output)
                                                  : cfg.output.directory / "carleman";
    if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
    auto mtx = prefix;
    mtx += ".mtx";
    auto offsets = prefix;
    offsets += ".offsets";
    std::ofstream m(mtx);
    std::ofstream b(offsets);
    if (!m || !b) throw Error("cannot write '" + prefix.string() + ".*'");
    write_matrix_market(m, cs.matrix().flatten());
    write_block_offsets(b, cs);
    out << "wrote " << mtx.string() << " and " << offsets.string() << '\n';
  }
  return kSuccess;
}

int cmd_estimate(std::size_t species, std::size_t n_t, const std::vector<std::size_t>& nnz,
                 std::ostream& out) {
  const CostEstimate est = cost_estimate(species, n_t, nnz);
  out << "dim=" << est.dim << '\n';
  if (est.ratio_to_prev_order) out << "ratio=" << format_double(*est.ratio_to_prev_order) << '\n';
  if (!nnz.empty()) out << "nnz_estimate=" << est.nnz_estimate << '\n';
  return kSuccess;
}

int cmd_check(const std::string& file, const std::optional<std::string>& thermo_file,
              double temperature, std::ostream& out, std::ostream& err) {
  std::map<std::string, ThermoEntry> external;
  if (thermo_file) {
    auto th = parse_thermo(read_text_file(*thermo_file));
    for (const auto& d : th.diagnostics) err << *thermo_file << ':' << d.format() << '\n';
    if (!th.ok()) return kValidation;
    external = std::move(th.entries);
  }
  const auto res = parse_mechanism(read_text_file(file), thermo_file ? &external : nullptr);
  for (const auto& d : res.diagnostics) err << file << ':' << d.format() << '\n';
  if (!res.ok()) return kValidation;
  const Mechanism& m = *res.mechanism;

  out << "elements=" << m.elements().size() << " species=" << m.species_count()
      << " reactions=" << m.reactions().size() << '\n';
  out << "species:";
  for (const auto& s : m.species()) out << ' ' << s.name;
  out << '\n';

  const PolynomialSystem sys = to_polynomial(m, temperature);
  out << "degree=" << sys.degree() << " at T=" << format_double(temperature) << " K\n";

  // Compare the compiled polynomial with the direct rate law and check that
  // rates conserve every element, at a few random positive states.
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(0.0, 1e-6);
  double oracle_defect = 0.0;
  double element_defect = 0.0;
  const auto e = element_matrix(m);
  for (int trial = 0; trial < 5; ++trial) {
    Vector c(m.species_count());
    for (double& v : c) v = dist(rng);
    const Vector f = eval_rhs(sys, c);
    const Vector g = direct_rates(m, temperature, c);
    double scale = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) scale = std::max(scale, std::abs(g[i]));
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (scale > 0.0) oracle_defect = std::max(oracle_defect, std::abs(f[i] - g[i]) / scale);
    }
    for (const auto& row : e) {
      double sum = 0.0;
      double mag = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        sum += row[i] * f[i];
        mag += std::abs(row[i] * f[i]);
      }
      if (mag > 0.0) element_defect = std::max(element_defect, std::abs(sum) / mag);
    }
  }
  const bool oracle_ok = oracle_defect <= 1e-12;
  const bool element_ok = element_defect <= 1e-12;
  out << "rate_oracle_defect=" << format_double(oracle_defect) << (oracle_ok ? " ok" : " FAIL")
      << '\n';
  out << "element_balance_defect=" << format_double(element_defect)
      << (element_ok ? " ok" : " FAIL") << '\n';
  return oracle_ok && element_ok ? kSuccess : kValidation;
}

int classify(const std::exception& ex) {
  if (dynamic_cast<const SingularMatrix*>(&ex) != nullptr ||
      dynamic_cast<const DivergenceDetected*>(&ex) != nullptr) {
    return kNumerical;
  }
  if (dynamic_cast<const Error*>(&ex) != nullptr) return kValidation;
  return kNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Carleman linearization of polynomial ODEs and mass-action kinetics", "ckin"};
  app.require_subcommand(1);

  Overrides sim_o;
  std::string sim_config;
  auto* sim = app.add_subcommand("simulate", "Integrate a configured problem, write trajectory CSV");
  sim->add_option("config", sim_config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  add_overrides(sim, sim_o);
  sim->add_option("-o,--output", sim_o.output, "Output CSV path");

  Overrides ref_o;
  std::string ref_config;
  auto* ref = app.add_subcommand("reference", "Run the forward-Euler oracle, write trajectory CSV");
  ref->add_option("config", ref_config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  add_overrides(ref, ref_o);
  ref->add_option("-o,--output", ref_o.output, "Output CSV path");

  Overrides sw_o;
  std::string sw_config;
  std::vector<double> sw_dts;
  std::vector<std::size_t> sw_nts;
  std::size_t sw_workers = 0;
  auto* sw = app.add_subcommand("sweep", "Error table over time steps and truncation orders");
  sw->add_option("config", sw_config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  add_overrides(sw, sw_o, true);
  sw->add_option("--dt,--dts", sw_dts, "Time steps, comma separated (default: config dt)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sw->add_option("--nt,--nts", sw_nts, "Truncation orders, comma separated (default: config n_t)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sw->add_option("--workers", sw_workers, "Concurrent runs (default: CKIN_WORKERS or all cores)");
  sw->add_option("-o,--output", sw_o.output, "Output CSV path");

  Overrides as_o;
  std::string as_config;
  bool as_dump = false;
  auto* as = app.add_subcommand("assemble", "Build the truncated Carleman matrix");
  as->add_option("config", as_config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  add_overrides(as, as_o);
  as->add_flag("--dump", as_dump, "Write <prefix>.mtx and <prefix>.offsets");
  as->add_option("-o,--output", as_o.output, "Output prefix");

  std::size_t est_species = 0;
  std::size_t est_nt = 0;
  std::vector<std::size_t> est_nnz;
  auto* est = app.add_subcommand("estimate", "Lifted dimension and nnz bound");
  est->add_option("--species", est_species, "Number of state variables")->required()->check(CLI::PositiveNumber);
  est->add_option("--nt", est_nt, "Truncation order")->required()->check(CLI::PositiveNumber);
  est->add_option("--nnz", est_nnz, "nnz(A_j) for j = 1.., comma separated")->delimiter(',');

  std::string chk_file;
  std::optional<std::string> chk_thermo;
  double chk_temperature = 2000.0;
  auto* chk = app.add_subcommand("check", "Parse a mechanism and report invariants");
  chk->add_option("mechanism", chk_file, "Chemkin mechanism file")->required()->check(CLI::ExistingFile);
  chk->add_option("--thermo", chk_thermo, "Separate NASA-7 thermo file")->check(CLI::ExistingFile);
  chk->add_option("--temperature", chk_temperature, "Temperature for rate evaluation [K]")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(sim_config, sim_o, out, err);
    if (*ref) return cmd_reference(ref_config, ref_o, out, err);
    if (*sw) return cmd_sweep(sw_config, sw_o, sw_dts, sw_nts, sw_workers, out);
    if (*as) return cmd_assemble(as_config, as_o, as_dump, out);
    if (*est) return cmd_estimate(est_species, est_nt, est_nnz, out);
    if (*chk) return cmd_check(chk_file, chk_thermo, chk_temperature, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return classify(e);
  }
  return kUsage;
}

}  // namespace ckin::cli
