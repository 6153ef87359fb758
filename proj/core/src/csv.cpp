#include "ckin/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ckin/error.hpp"

namespace ckin {

namespace {

std::string fixed17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          std::span<const std::string> names, bool normalize_rows) {
  out << 't';
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vector& x = traj.states[k];
    if (x.size() != names.size()) throw ShapeMismatch("trajectory width does not match names");
    double scale = 1.0;
    if (normalize_rows) {
      double sum = 0.0;
      for (double v : x) sum += v;
      if (sum != 0.0) scale = 1.0 / sum;
    }
    out << fixed17(traj.times[k]);
    for (double v : x) out << ',' << fixed17(v * scale);
    out << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          std::span<const std::string> names, bool normalize_rows) {
  auto out = open_out(path);
  write_trajectory_csv(out, traj, names, normalize_rows);
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error("CSV input is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw Error("CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.header.size()) {
      throw Error("CSV line " + std::to_string(line_no) + ": expected " +
                  std::to_string(table.header.size()) + " fields");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_csv(in);
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "dt,n_t,diverged,representative_error,max_abs_error,l2_error,wall_seconds,matrix_dim,nnz\n";
  const auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("nan");
  };
  for (const auto& r : rows) {
    out << format_double(r.dt) << ',' << r.truncation_order << ',' << (r.diverged ? 1 : 0) << ','
        << opt(r.representative_error) << ',' << opt(r.max_abs_error) << ',' << opt(r.l2_error)
        << ',' << format_double(r.wall_seconds) << ',' << r.matrix_dim << ',' << r.nnz << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  auto out = open_out(path);
  write_sweep_csv(out, rows);
}

}  // namespace ckin
