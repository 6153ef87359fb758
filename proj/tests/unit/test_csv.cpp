#include <gtest/gtest.h>

#include <sstream>

#include "ckin/csv.hpp"
#include "ckin/error.hpp"
#include "test_support.hpp"

namespace ckin {
namespace {

TEST(TrajectoryCsv, RoundTripIsBitExact) {
  testing::Gen g(81);
  Trajectory t;
  for (int k = 0; k < 20; ++k) {
    t.times.push_back(k * 0.1);
    t.states.push_back({g.uniform(-1, 1) * 1e-7, g.uniform(-1, 1), 1.0 / 3.0});
  }
  const std::vector<std::string> names{"a", "b", "c"};
  std::stringstream ss;
  write_trajectory_csv(ss, t, names);
  const auto table = read_csv(ss);
  EXPECT_EQ(table.header, (std::vector<std::string>{"t", "a", "b", "c"}));
  ASSERT_EQ(table.rows.size(), t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_EQ(table.rows[k][0], t.times[k]);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(table.rows[k][i + 1], t.states[k][i]);
  }
}

TEST(TrajectoryCsv, NormalizedRowsSumToOne) {
  Trajectory t;
  t.times = {0.0};
  t.states = {{2e-6, 6e-6}};
  std::stringstream ss;
  write_trajectory_csv(ss, t, std::vector<std::string>{"H2", "N2"}, true);
  const auto table = read_csv(ss);
  EXPECT_DOUBLE_EQ(table.rows[0][1], 0.25);
  EXPECT_DOUBLE_EQ(table.rows[0][2], 0.75);
}

TEST(TrajectoryCsv, WidthMismatch) {
  Trajectory t;
  t.times = {0.0};
  t.states = {{1.0}};
  std::stringstream ss;
  EXPECT_THROW(write_trajectory_csv(ss, t, std::vector<std::string>{"a", "b"}), ShapeMismatch);
}

TEST(ReadCsv, RejectsMalformedInput) {
  std::stringstream bad_number("t,y\n0,abc\n");
  EXPECT_THROW(read_csv(bad_number), Error);
  std::stringstream short_row("t,y\n0\n");
  EXPECT_THROW(read_csv(short_row), Error);
  std::stringstream empty;
  EXPECT_THROW(read_csv(empty), Error);
}

TEST(SweepCsv, HeaderAndDivergedRow) {
  std::vector<SweepRow> rows(2);
  rows[0].dt = 0.01;
  rows[0].truncation_order = 2;
  rows[0].representative_error = -1e-3;
  rows[0].max_abs_error = 1e-3;
  rows[0].l2_error = 5e-4;
  rows[1].dt = 0.02;
  rows[1].truncation_order = 2;
  rows[1].diverged = true;
  std::stringstream ss;
  write_sweep_csv(ss, rows);
  std::string header, first, second;
  std::getline(ss, header);
  std::getline(ss, first);
  std::getline(ss, second);
  EXPECT_EQ(header,
            "dt,n_t,diverged,representative_error,max_abs_error,l2_error,wall_seconds,matrix_dim,nnz");
  EXPECT_EQ(first.rfind("0.01,2,0,", 0), 0u) << first;
  const auto fields = first.substr(9);
  EXPECT_EQ(std::stod(fields.substr(0, fields.find(','))), -1e-3) << first;
  EXPECT_EQ(second.rfind("0.02,2,1,nan,nan,nan,", 0), 0u);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-10), "1e-10");
  const double third = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(third)), third);
}

}  // namespace
}  // namespace ckin
