#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ckin/experiments.hpp"
#include "ckin/integrators.hpp"

namespace ckin {

/// Header `t,<names...>`, one row per recorded time, 17 significant digits.
/// With `normalize_rows` each row is divided by its sum (mole fractions).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          std::span<const std::string> names, bool normalize_rows = false);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          std::span<const std::string> names, bool normalize_rows = false);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV with one header line. Throws Error on malformed input.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Columns: dt,n_t,diverged,representative_error,max_abs_error,l2_error,wall_seconds,matrix_dim,nnz
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

}  // namespace ckin
