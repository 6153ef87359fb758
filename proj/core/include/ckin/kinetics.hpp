#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ckin/poly_ode.hpp"

namespace ckin {

/// Physical constants, pinned once.
namespace constants {
/// Gas constant in the Arrhenius activation-energy convention, cal/(mol K).
inline constexpr double kGasConstantCal = 1.987204;
/// Gas constant for concentrations in mol/cm^3 and pressures in atm, atm cm^3/(mol K).
inline constexpr double kGasConstantAtmCm3 = 82.0574;
inline constexpr double kReferencePressureAtm = 1.0;
}  // namespace constants

/// Two-range NASA 7-coefficient fit.
struct Nasa7 {
  double t_low = 0.0;
  double t_common = 0.0;
  double t_high = 0.0;
  std::array<double, 7> low{};
  std::array<double, 7> high{};

  friend bool operator==(const Nasa7&, const Nasa7&) = default;
};

struct ThermoProperties {
  double cp_over_r;
  double h_over_rt;
  double s_over_r;
};

struct Species {
  std::string name;
  std::map<std::string, int> composition;
  std::optional<Nasa7> thermo;

  friend bool operator==(const Species&, const Species&) = default;
};

/// k = A T^b exp(-E_a / (R T)), A in mol-cm-s units, E_a in cal/mol.
struct Arrhenius {
  double pre_exponential = 0.0;
  double temperature_exponent = 0.0;
  double activation_energy = 0.0;

  friend bool operator==(const Arrhenius&, const Arrhenius&) = default;
};

enum class ReverseMode { None, Explicit, FromEquilibrium };

struct ThirdBody {
  std::map<std::string, double> efficiencies;
  double default_efficiency = 1.0;

  double efficiency(const std::string& species) const {
    const auto it = efficiencies.find(species);
    return it == efficiencies.end() ? default_efficiency : it->second;
  }

  friend bool operator==(const ThirdBody&, const ThirdBody&) = default;
};

using Stoichiometry = std::map<std::string, int>;

struct Reaction {
  Stoichiometry reactants;
  Stoichiometry products;
  Arrhenius forward;
  ReverseMode reverse_mode = ReverseMode::None;
  std::optional<Arrhenius> reverse;  // set iff reverse_mode == Explicit
  std::optional<ThirdBody> third_body;
  bool duplicate = false;

  bool reversible() const noexcept { return reverse_mode != ReverseMode::None; }
  /// Sum of reactant coefficients, plus one for a third body.
  int forward_order() const;
  int reverse_order() const;
  /// Sum of product minus reactant coefficients (third body excluded).
  int delta_nu() const;
  /// Chemkin-style equation, e.g. "H+O2+M<=>HO2+M".
  std::string equation() const;

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

class Mechanism {
 public:
  Mechanism() = default;
  /// Validates declared participants, unique names, molecularity and (where
  /// compositions are known) element balance. Throws InvalidArgument.
  Mechanism(std::vector<std::string> elements, std::vector<Species> species,
            std::vector<Reaction> reactions);

  const std::vector<std::string>& elements() const noexcept { return elements_; }
  const std::vector<Species>& species() const noexcept { return species_; }
  const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
  std::size_t species_count() const noexcept { return species_.size(); }

  std::optional<std::size_t> find_species(const std::string& name) const;
  std::size_t species_index(const std::string& name) const;  // throws InvalidArgument
  std::vector<std::string> species_names() const;

  friend bool operator==(const Mechanism& a, const Mechanism& b) {
    return a.elements_ == b.elements_ && a.species_ == b.species_ &&
           a.reactions_ == b.reactions_;
  }

 private:
  std::vector<std::string> elements_;
  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  std::map<std::string, std::size_t> index_;
};

/// Highest reaction molecularity compiled into a polynomial system.
inline constexpr int kMaxMolecularity = 3;

double rate_constant(const Arrhenius& a, double temperature);

ThermoProperties nasa7_props(const Nasa7& fit, double temperature);
ThermoProperties nasa7_props(const Species& s, double temperature);

/// Concentration-based equilibrium constant K_c in mol/cm^3 units.
double equilibrium_constant(const Mechanism& m, const Reaction& r, double temperature);

/// k_r = k_f / K_c for a FromEquilibrium reaction.
double equilibrium_reverse_rate(const Mechanism& m, const Reaction& r, double temperature);

/// Forward and reverse rate constants at T; reverse is 0 for irreversible reactions.
std::pair<double, double> rate_constants(const Mechanism& m, const Reaction& r,
                                         double temperature);

/// Isothermal mass-action kinetics over concentrations (mol/cm^3) as a
/// polynomial system. Each reaction direction becomes one monomial per
/// collider (a single one without a third body), placed at the column of its
/// ascending species-index tuple.
PolynomialSystem to_polynomial(const Mechanism& m, double temperature);

/// Species production rates by a direct loop over reactions.
Vector direct_rates(const Mechanism& m, double temperature, std::span<const double> c);

/// sum_i composition_i(e) c_i for each element e.
std::map<std::string, double> element_totals(const Mechanism& m, std::span<const double> c);

/// Elemental composition matrix, one row per element in mechanism order.
std::vector<Vector> element_matrix(const Mechanism& m);

}  // namespace ckin
