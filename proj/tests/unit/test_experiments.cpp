#include <gtest/gtest.h>

#include "ckin/carleman.hpp"
#include "ckin/error.hpp"
#include "ckin/experiments.hpp"
#include "ckin/mech_parser.hpp"
#include "test_support.hpp"

namespace ckin {
namespace {

using nlohmann::json;
using testing::Gen;

const std::map<std::string, double> kAir{{"O2", 0.21}, {"N2", 0.79}};

TEST(InitialComposition, HydrogenAirByHand) {
  const Mechanism m = load_mechanism(testing::h2_mechanism());
  const auto x1 = initial_mole_fractions(m, 1.0, "H2", kAir);
  EXPECT_NEAR(x1[m.species_index("H2")], 0.42 / 1.42, 1e-15);
  EXPECT_NEAR(x1[m.species_index("O2")], 0.21 / 1.42, 1e-15);
  EXPECT_NEAR(x1[m.species_index("N2")], 0.79 / 1.42, 1e-15);
  EXPECT_EQ(x1[m.species_index("OH")], 0.0);
  const auto x08 = initial_mole_fractions(m, 0.8, "H2", kAir);
  EXPECT_NEAR(x08[m.species_index("H2")], 0.336 / 1.336, 1e-15);
  double sum = 0.0;
  for (double v : x08) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(InitialComposition, MethaneNeedsTwoOxygen) {
  const Mechanism m = load_mechanism(testing::ch4_mechanism());
  const auto x = initial_mole_fractions(m, 1.0, "CH4", kAir);
  EXPECT_NEAR(x[m.species_index("CH4")], 0.105 / 1.105, 1e-15);
}

TEST(InitialComposition, ConcentrationsFromIdealGas) {
  const Mechanism m = load_mechanism(testing::h2_mechanism());
  const auto c = initial_concentrations(m, 2000.0, 1.0, 0.8, "H2", kAir);
  double total = 0.0;
  for (double v : c) {
    EXPECT_GE(v, 0.0);
    total += v;
  }
  EXPECT_NEAR(total, 1.0 / (82.0574 * 2000.0), 1e-20);
}

TEST(InitialComposition, Errors) {
  const Mechanism m = load_mechanism(testing::h2_mechanism());
  EXPECT_THROW(initial_mole_fractions(m, 1.0, "CH4", kAir), InvalidArgument);
  EXPECT_THROW(initial_mole_fractions(m, 1.0, "H2", {{"AR", 1.0}}), InvalidArgument);
  EXPECT_THROW(initial_mole_fractions(m, 1.0, "H2", {{"N2", 1.0}}), InvalidArgument);
  EXPECT_THROW(initial_mole_fractions(m, 0.0, "H2", kAir), InvalidArgument);
}

Trajectory make_traj(double dt, std::vector<double> times, std::vector<Vector> states) {
  Trajectory t;
  t.config.dt = dt;
  t.times = std::move(times);
  t.states = std::move(states);
  return t;
}

TEST(ErrorMetrics, IdenticalTrajectoriesGiveZero) {
  const auto t = make_traj(0.1, {0.0, 0.1}, {{1, 2}, {3, 4}});
  const auto r = error_metrics(t, t);
  EXPECT_EQ(r.max_abs_error, 0.0);
  EXPECT_EQ(r.representative_error, 0.0);
  EXPECT_EQ(r.l2_error, 0.0);
}

TEST(ErrorMetrics, SignedWorstErrorAndAlignment) {
  const auto ref = make_traj(0.05, {0.0, 0.05, 0.1, 0.15, 0.2},
                             {{1, 1}, {0, 0}, {2, 2}, {0, 0}, {3, 3}});
  const auto test = make_traj(0.1, {0.0, 0.1, 0.2}, {{1, 1}, {2, 2 - 0.25}, {3 + 0.125, 3}});
  const auto r = error_metrics(test, ref);
  EXPECT_EQ(r.representative_error, -0.25);
  EXPECT_EQ(r.max_abs_error, 0.25);
  EXPECT_DOUBLE_EQ(r.time_of_max, 0.1);
  EXPECT_EQ(r.variable_of_max, 1u);
  EXPECT_DOUBLE_EQ(r.l2_error, std::sqrt((0.0625 + 0.015625) / 3.0));

  const std::vector<std::size_t> only0{0};
  const auto s = select_variables(r, only0);
  EXPECT_EQ(s.representative_error, 0.125);
  EXPECT_EQ(s.variable_of_max, 0u);
}

TEST(ErrorMetrics, RejectsMisalignedGrids) {
  const auto ref = make_traj(0.03, {0.0, 0.03}, {{1}, {1}});
  const auto test = make_traj(0.05, {0.0, 0.05}, {{1}, {1}});
  EXPECT_THROW(error_metrics(test, ref), MisalignedGrids);
  const auto sparse_ref = make_traj(0.05, {0.0}, {{1}});
  EXPECT_THROW(error_metrics(test, sparse_ref), MisalignedGrids);
}

Problem scalar_problem() { return {scalar_system(1.0), {1.0}, {"y"}, std::nullopt}; }

TEST(Sweep, OneByOneGridEqualsErrorMetrics) {
  IntegrationConfig base;
  base.dt = 1e-2;
  base.t_end = 1.0;
  base.truncation_order = 3;
  const std::vector<double> dts{1e-2};
  const std::vector<std::size_t> nts{3};
  const auto rows = sweep(scalar_problem(), base, {1e-4}, dts, nts, 1);
  ASSERT_EQ(rows.size(), 1u);
  const auto test = simulate(scalar_system(1.0), Vector{1.0}, base);
  std::vector<double> times = test.times;
  const auto ref = reference_integrate(scalar_system(1.0), Vector{1.0}, 1e-4, 1.0, times);
  const auto r = error_metrics(test, ref);
  EXPECT_EQ(*rows[0].representative_error, r.representative_error);
  EXPECT_EQ(*rows[0].max_abs_error, r.max_abs_error);
  EXPECT_EQ(rows[0].matrix_dim, 3u);
}

TEST(Sweep, RowCountOrderAndScheduleInvariance) {
  IntegrationConfig base;
  base.t_end = 1.0;
  const std::vector<double> dts{1e-2, 5e-3, 2e-2};
  const std::vector<std::size_t> nts{4, 2, 3};
  const auto serial = sweep(scalar_problem(), base, {1e-4}, dts, nts, 1);
  const auto parallel = sweep(scalar_problem(), base, {1e-4}, dts, nts, 4);
  ASSERT_EQ(serial.size(), dts.size() * nts.size());
  ASSERT_EQ(parallel.size(), serial.size());
  for (std::size_t k = 0; k < serial.size(); ++k) {
    if (k > 0) {
      const auto& a = serial[k - 1];
      const auto& b = serial[k];
      EXPECT_TRUE(a.dt < b.dt || (a.dt == b.dt && a.truncation_order < b.truncation_order));
    }
    EXPECT_EQ(serial[k].dt, parallel[k].dt);
    EXPECT_EQ(serial[k].truncation_order, parallel[k].truncation_order);
    EXPECT_EQ(serial[k].representative_error, parallel[k].representative_error);
  }
}

TEST(Sweep, DivergedRowsCarryNoErrors) {
  // y' = -100 y: explicit steps above 0.02 are unstable, the fine reference is not.
  const Problem p{PolynomialSystem(1, {SparseMatrix(1, 1, {{0, 0, -100.0}})}), {1.0}, {"y"},
                  std::nullopt};
  IntegrationConfig base;
  base.method = Method::ExplicitCarleman;
  base.truncation_order = 1;
  base.t_end = 2.0;
  const std::vector<double> dts{1e-3, 5e-2};
  const std::vector<std::size_t> nts{1};
  const auto rows = sweep(p, base, {1e-4}, dts, nts, 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].diverged);
  EXPECT_TRUE(rows[0].max_abs_error.has_value());
  EXPECT_TRUE(rows[1].diverged);
  EXPECT_FALSE(rows[1].representative_error.has_value());
  EXPECT_FALSE(rows[1].max_abs_error.has_value());
  EXPECT_FALSE(rows[1].l2_error.has_value());
}

TEST(Sweep, ScalarErrorShrinksWithStep) {
  IntegrationConfig base;
  base.t_end = 1.0;
  const std::vector<double> dts{4e-2, 2e-2, 1e-2};
  const std::vector<std::size_t> nts{2, 3};
  const auto rows = sweep(scalar_problem(), base, {1e-4}, dts, nts, 1);
  for (std::size_t nt_i = 0; nt_i < 2; ++nt_i) {
    // rows sorted by dt ascending: errors must grow with dt
    EXPECT_LT(*rows[nt_i].max_abs_error, *rows[2 + nt_i].max_abs_error);
    EXPECT_LT(*rows[2 + nt_i].max_abs_error, *rows[4 + nt_i].max_abs_error);
  }
}

TEST(CostEstimate, DimensionsAndRatios) {
  const std::vector<std::size_t> expected{9, 90, 819, 7380};
  for (std::size_t nt = 1; nt <= 4; ++nt) {
    const auto e = cost_estimate(9, nt);
    EXPECT_EQ(e.dim, expected[nt - 1]);
    EXPECT_EQ(e.ratio_to_prev_order.has_value(), nt > 1);
  }
  EXPECT_NEAR(*cost_estimate(9, 3).ratio_to_prev_order, 9.1, 1e-12);
  for (std::size_t nt = 1; nt <= 6; ++nt) EXPECT_EQ(cost_estimate(1, nt).dim, nt);
  EXPECT_THROW(cost_estimate(100000, 6), DimensionOverflow);
}

TEST(CostEstimate, NnzBoundHoldsForAssembledMatrices) {
  Gen g(71);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sys = g.system(g.index(1, 4), g.index(1, 3), 0.4);
    const std::size_t nt = g.index(1, 4);
    std::vector<std::size_t> nnz;
    for (const auto& a : sys.coeffs()) nnz.push_back(a.nnz());
    const auto e = cost_estimate(sys.n_state(), nt, nnz);
    const CarlemanSystem cs(sys, nt);
    EXPECT_EQ(e.dim, cs.dim());
    EXPECT_LE(cs.matrix().nnz(), e.nnz_estimate);
  }
}

TEST(RunConfig, ParsesScalarAndDefaults) {
  const auto cfg = parse_run_config(json::parse(R"({
    "problem": {"type": "scalar", "alpha": 2.0},
    "integration": {"method": "explicit_carleman", "dt": 0.01, "t_end": 2, "n_t": 3,
                    "relift_every": "never"}
  })"));
  const auto& s = std::get<ScalarProblem>(cfg.problem);
  EXPECT_EQ(s.alpha, 2.0);
  EXPECT_EQ(s.y0, 1.0);
  EXPECT_EQ(cfg.integration.method, Method::ExplicitCarleman);
  EXPECT_EQ(cfg.integration.truncation_order, 3u);
  EXPECT_FALSE(cfg.integration.relift_every.has_value());
  const auto p = build_problem(cfg);
  EXPECT_EQ(eval_rhs(p.system, Vector{3.0})[0], -18.0);
}

TEST(RunConfig, Rejections) {
  const auto bad = [](const char* text) {
    EXPECT_THROW(parse_run_config(json::parse(text)), ConfigError) << text;
  };
  bad(R"({})");
  bad(R"({"problem": {"type": "quadratic"}})");
  bad(R"({"problem": {"type": "scalar"}, "integration": {"method": "rk4"}})");
  bad(R"({"problem": {"type": "scalar"}, "integration": {"dt": -1}})");
  bad(R"({"problem": {"type": "scalar"}, "integration": {"relift_every": 0}})");
  bad(R"({"problem": {"type": "mechanism", "file": "x.inp"}})");
  bad(R"({"problem": {"type": "mechanism", "file": "x.inp", "equivalence_ratio": 1,
          "initial_mole_fractions": {"H2": 1}}})");
  bad(R"({"problem": {"type": "mechanism", "file": "x.inp", "equivalence_ratio": -1}})");
}

TEST(RunConfig, MechanismPathsResolveAgainstConfig) {
  const auto cfg = load_run_config(testing::data_dir().parent_path() / "configs/h2_air.json");
  const auto& m = std::get<MechanismProblem>(cfg.problem);
  EXPECT_TRUE(std::filesystem::exists(m.file));
  const auto p = build_problem(cfg);
  EXPECT_EQ(p.variable_names.size(), 9u);
  ASSERT_TRUE(p.mechanism.has_value());
  EXPECT_GT(p.initial_state[p.mechanism->species_index("H2")], 0.0);
}

TEST(RunConfig, ExplicitMoleFractionsAreNormalized) {
  const auto cfg = parse_run_config(
      json{{"problem",
            {{"type", "mechanism"},
             {"file", testing::h2_mechanism().string()},
             {"temperature", 1000.0},
             {"initial_mole_fractions", {{"H2", 2.0}, {"O2", 1.0}, {"N2", 1.0}}}}}});
  const auto p = build_problem(cfg);
  const double total = 1.0 / (82.0574 * 1000.0);
  EXPECT_NEAR(p.initial_state[p.mechanism->species_index("H2")], 0.5 * total, 1e-20);
}

}  // namespace
}  // namespace ckin
