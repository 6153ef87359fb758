#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ckin/error.hpp"
#include "ckin/kinetics.hpp"
#include "ckin/mech_parser.hpp"
#include "test_support.hpp"

namespace ckin {
namespace {

using testing::Gen;

/// Constant-cp fit: cp/R = cp, h/RT = cp + h0/T, s/R = cp ln T + s0.
Nasa7 constant_cp(double cp, double h0, double s0) {
  Nasa7 f;
  f.t_low = 200.0;
  f.t_common = 1000.0;
  f.t_high = 6000.0;
  f.low = {cp, 0, 0, 0, 0, h0, s0};
  f.high = f.low;
  return f;
}

Reaction reaction(Stoichiometry r, Stoichiometry p, double a, ReverseMode mode) {
  Reaction rx;
  rx.reactants = std::move(r);
  rx.products = std::move(p);
  rx.forward = {a, 0.0, 0.0};
  rx.reverse_mode = mode;
  return rx;
}

TEST(RateConstant, ArrheniusByHand) {
  EXPECT_EQ(rate_constant({2.5e13, 0.0, 0.0}, 2000.0), 2.5e13);
  EXPECT_NEAR(rate_constant({1.0, 0.0, constants::kGasConstantCal * 2000.0}, 2000.0),
              0.36787944117144233, 1e-15);
  EXPECT_NEAR(rate_constant({3.0, 2.0, 0.0}, 10.0), 300.0, 1e-12);
  EXPECT_THROW(rate_constant({1.0, 0.0, 0.0}, 0.0), InvalidArgument);
  EXPECT_THROW(rate_constant({0.0, 0.0, 0.0}, 300.0), InvalidArgument);
}

TEST(Nasa7, PolynomialByHand) {
  Nasa7 f;
  f.t_low = 300;
  f.t_common = 1000;
  f.t_high = 5000;
  f.low = {1, 1e-3, 0, 0, 0, 100, 2};
  f.high = {2, 0, 0, 0, 0, 0, 0};
  const auto p = nasa7_props(f, 500.0);
  EXPECT_NEAR(p.cp_over_r, 1.5, 1e-15);
  EXPECT_NEAR(p.h_over_rt, 1 + 0.5e-3 * 500 + 100.0 / 500, 1e-14);
  EXPECT_NEAR(p.s_over_r, std::log(500.0) + 1e-3 * 500 + 2, 1e-14);
  EXPECT_NEAR(nasa7_props(f, 1000.0).cp_over_r, 2.0, 1e-15);  // low range at t_common
  EXPECT_NEAR(nasa7_props(f, 2000.0).cp_over_r, 2.0, 1e-15);
  EXPECT_THROW(nasa7_props(f, 100.0), OutOfRange);
  EXPECT_THROW(nasa7_props(f, 6000.0), OutOfRange);
}

TEST(Equilibrium, SymmetricReactionHasEqualRates) {
  const Mechanism m({"X", "Y"},
                    {{"A", {{"X", 1}}, constant_cp(3.5, 10, 1)},
                     {"B", {{"Y", 1}}, constant_cp(2.5, -30, 4)}},
                    {reaction({{"A", 1}, {"B", 1}}, {{"B", 1}, {"A", 1}}, 5.0,
                              ReverseMode::FromEquilibrium)});
  const auto [kf, kr] = rate_constants(m, m.reactions()[0], 1500.0);
  EXPECT_NEAR(kr, kf, 1e-12 * kf);
}

TEST(Equilibrium, IsomerizationByHand) {
  const Mechanism m({"X"},
                    {{"A", {{"X", 2}}, constant_cp(3.5, 0, 0)},
                     {"B", {{"X", 2}}, constant_cp(3.5, -1000, 1)}},
                    {reaction({{"A", 1}}, {{"B", 1}}, 7.0, ReverseMode::FromEquilibrium)});
  const double t = 1250.0;
  const double kc = std::exp(1.0 + 1000.0 / t);
  EXPECT_NEAR(equilibrium_constant(m, m.reactions()[0], t) / kc, 1.0, 1e-14);
  EXPECT_NEAR(equilibrium_reverse_rate(m, m.reactions()[0], t) / (7.0 / kc), 1.0, 1e-14);
}

TEST(Equilibrium, RecombinationCarriesConcentrationUnits) {
  const Mechanism m({"X"},
                    {{"A", {{"X", 1}}, constant_cp(2.5, 5000, 3)},
                     {"A2", {{"X", 2}}, constant_cp(3.5, -2000, 5)}},
                    {reaction({{"A", 2}}, {{"A2", 1}}, 1e12, ReverseMode::FromEquilibrium)});
  const double t = 2000.0;
  // delta(h/RT) = (3.5 - 2000/T) - 2 (2.5 + 5000/T); delta(s/R) = (3.5 ln T + 5) - 2 (2.5 ln T + 3)
  const double dh = (3.5 - 2000.0 / t) - 2.0 * (2.5 + 5000.0 / t);
  const double ds = (3.5 * std::log(t) + 5.0) - 2.0 * (2.5 * std::log(t) + 3.0);
  const double kp = std::exp(ds - dh);
  const double kc = kp * std::pow(1.0 / (constants::kGasConstantAtmCm3 * t), -1.0);
  EXPECT_NEAR(equilibrium_constant(m, m.reactions()[0], t) / kc, 1.0, 1e-13);
}

TEST(Mechanism, ValidationErrors) {
  const std::vector<Species> sp{{"A", {{"X", 1}}, std::nullopt}, {"B", {{"X", 2}}, std::nullopt}};
  EXPECT_THROW(Mechanism({"X"}, sp, {reaction({{"A", 1}}, {{"C", 1}}, 1, ReverseMode::None)}),
               InvalidArgument);
  EXPECT_THROW(Mechanism({"X"}, sp, {reaction({{"A", 1}}, {{"B", 1}}, 1, ReverseMode::None)}),
               InvalidArgument);  // unbalanced
  EXPECT_THROW(Mechanism({"X"}, sp, {reaction({{"A", 4}}, {{"B", 2}}, 1, ReverseMode::None)}),
               UnsupportedOrder);
  EXPECT_THROW(Mechanism({"X"}, {sp[0], sp[0]}, {}), InvalidArgument);
  EXPECT_NO_THROW(
      Mechanism({"X"}, sp, {reaction({{"A", 2}}, {{"B", 1}}, 1, ReverseMode::None)}));
}

TEST(ToPolynomial, BimolecularByHand) {
  // A + B -> C with k = 3: dA/dt = dB/dt = -3 A B, dC/dt = +3 A B
  const Mechanism m({}, {{"A", {}, {}}, {"B", {}, {}}, {"C", {}, {}}},
                    {reaction({{"A", 1}, {"B", 1}}, {{"C", 1}}, 3.0, ReverseMode::None)});
  const auto sys = to_polynomial(m, 1000.0);
  EXPECT_EQ(sys.degree(), 2u);
  const std::size_t col = 0 * 3 + 1;  // ascending tuple (A, B)
  EXPECT_EQ(sys.coeff(2).at(0, col), -3.0);
  EXPECT_EQ(sys.coeff(2).at(1, col), -3.0);
  EXPECT_EQ(sys.coeff(2).at(2, col), 3.0);
  EXPECT_EQ(sys.coeff(2).nnz(), 3u);
  EXPECT_EQ(sys.coeff(1).nnz(), 0u);
}

TEST(ToPolynomial, SelfReactionUsesPlainMassAction) {
  // 2A -> B: rate = k A^2, dA/dt = -2 k A^2
  const Mechanism m({}, {{"A", {}, {}}, {"B", {}, {}}},
                    {reaction({{"A", 2}}, {{"B", 1}}, 4.0, ReverseMode::None)});
  const auto f = eval_rhs(to_polynomial(m, 1000.0), Vector{0.5, 0.0});
  EXPECT_DOUBLE_EQ(f[0], -2.0);
  EXPECT_DOUBLE_EQ(f[1], 1.0);
}

TEST(ToPolynomial, ThirdBodyExpandsPerCollider) {
  Reaction r = reaction({{"A", 2}}, {{"B", 1}}, 1.0, ReverseMode::None);
  r.third_body = ThirdBody{{{"A", 0.0}, {"C", 2.5}}, 1.0};
  const Mechanism m({}, {{"A", {}, {}}, {"B", {}, {}}, {"C", {}, {}}}, {r});
  const auto sys = to_polynomial(m, 1000.0);
  EXPECT_EQ(sys.degree(), 3u);
  const Vector c{0.3, 0.2, 0.1};
  const double total_m = 0.0 * 0.3 + 1.0 * 0.2 + 2.5 * 0.1;
  const auto f = eval_rhs(sys, c);
  EXPECT_NEAR(f[1], 0.09 * total_m, 1e-16);
  EXPECT_NEAR(f[0], -2 * 0.09 * total_m, 1e-16);
  // colliders with efficiency zero contribute no monomial
  EXPECT_EQ(sys.coeff(3).nnz(), 2u * 2u);
}

TEST(ToPolynomial, ReversibleNeedsThermo) {
  const Mechanism m({}, {{"A", {}, {}}, {"B", {}, {}}},
                    {reaction({{"A", 1}}, {{"B", 1}}, 1.0, ReverseMode::FromEquilibrium)});
  EXPECT_THROW(to_polynomial(m, 1000.0), MissingThermo);
}

void check_against_direct_rates(const std::filesystem::path& file, std::size_t expected_species) {
  const Mechanism m = load_mechanism(file);
  ASSERT_EQ(m.species_count(), expected_species);
  Gen g(51);
  for (double t : {1500.0, 2000.0}) {
    const auto sys = to_polynomial(m, t);
    for (int trial = 0; trial < 50; ++trial) {
      const auto c = g.vector(m.species_count(), 0.0, 1e-6);
      const auto f = eval_rhs(sys, c);
      const auto ref = direct_rates(m, t, c);
      const double scale = norm_inf(ref);
      EXPECT_LE(testing::max_abs_diff(f, ref), 1e-12 * scale);
    }
  }
}

TEST(ToPolynomial, MatchesDirectRatesH2) { check_against_direct_rates(testing::h2_mechanism(), 9); }
TEST(ToPolynomial, MatchesDirectRatesCH4) {
  check_against_direct_rates(testing::ch4_mechanism(), 21);
}

void check_against_cantera(const std::filesystem::path& file, const std::string& fixture) {
  const Mechanism m = load_mechanism(file);
  std::ifstream in(testing::fixtures_dir() / "cantera" / fixture);
  ASSERT_TRUE(in) << fixture;
  const auto doc = nlohmann::json::parse(in);
  const auto names = doc.at("species").get<std::vector<std::string>>();
  ASSERT_EQ(names.size(), m.species_count());
  for (const auto& c : doc.at("cases")) {
    const double t = c.at("temperature").get<double>();
    const auto conc = c.at("concentrations").get<Vector>();
    const auto rates = c.at("net_rates").get<Vector>();
    Vector x(m.species_count());
    for (std::size_t i = 0; i < names.size(); ++i) x[m.species_index(names[i])] = conc[i];
    const auto f = eval_rhs(to_polynomial(m, t), x);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < names.size(); ++i) {
      scale = std::max(scale, std::abs(rates[i]));
      diff = std::max(diff, std::abs(f[m.species_index(names[i])] - rates[i]));
    }
    // The gas constant is pinned to 1.987204 cal/(mol K); Cantera uses CODATA.
    EXPECT_LE(diff, 1e-5 * scale) << "T = " << t;
  }
}

TEST(ToPolynomial, AgreesWithCanteraH2) {
  check_against_cantera(testing::h2_mechanism(), "h2_air_9sp.json");
}
TEST(ToPolynomial, AgreesWithCanteraCH4) {
  check_against_cantera(testing::ch4_mechanism(), "ch4_air_21sp.json");
}

TEST(ElementConservation, RatesConserveEveryElement) {
  for (const auto& file : {testing::h2_mechanism(), testing::ch4_mechanism()}) {
    const Mechanism m = load_mechanism(file);
    const auto sys = to_polynomial(m, 2000.0);
    const auto e = element_matrix(m);
    Gen g(52);
    for (int trial = 0; trial < 20; ++trial) {
      const auto f = eval_rhs(sys, g.vector(m.species_count(), 0.0, 1e-6));
      for (const auto& row : e) {
        double sum = 0.0, mag = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
          sum += row[i] * f[i];
          mag += std::abs(row[i] * f[i]);
        }
        EXPECT_LE(std::abs(sum), 1e-13 * mag);
      }
    }
  }
}

TEST(ElementTotals, CountsAtoms) {
  const Mechanism m = load_mechanism(testing::h2_mechanism());
  Vector c(m.species_count(), 0.0);
  c[m.species_index("H2O")] = 2.0;
  c[m.species_index("O2")] = 1.0;
  const auto tot = element_totals(m, c);
  EXPECT_EQ(tot.at("H"), 4.0);
  EXPECT_EQ(tot.at("O"), 4.0);
  EXPECT_EQ(tot.at("N"), 0.0);
}

}  // namespace
}  // namespace ckin
