#include "ckin/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "ckin/error.hpp"

namespace ckin {

namespace {

int total(const Stoichiometry& s) {
  int n = 0;
  for (const auto& [name, nu] : s) n += nu;
  return n;
}

std::string side_string(const Stoichiometry& s) {
  std::string out;
  for (const auto& [name, nu] : s) {
    if (!out.empty()) out += '+';
    if (nu != 1) out += std::to_string(nu);
    out += name;
  }
  return out;
}

}  // namespace

int Reaction::forward_order() const { return total(reactants) + (third_body ? 1 : 0); }

int Reaction::reverse_order() const { return total(products) + (third_body ? 1 : 0); }

int Reaction::delta_nu() const { return total(products) - total(reactants); }

std::string Reaction::equation() const {
  const std::string m = third_body ? "+M" : "";
  const std::string arrow = reversible() ? "<=>" : "=>";
  return side_string(reactants) + m + arrow + side_string(products) + m;
}

Mechanism::Mechanism(std::vector<std::string> elements, std::vector<Species> species,
                     std::vector<Reaction> reactions)
    : elements_(std::move(elements)),
      species_(std::move(species)),
      reactions_(std::move(reactions)) {
  const std::set<std::string> element_set(elements_.begin(), elements_.end());
  if (element_set.size() != elements_.size()) {
    throw InvalidArgument("mechanism: duplicate element");
  }
  for (std::size_t i = 0; i < species_.size(); ++i) {
    const auto& s = species_[i];
    if (!index_.emplace(s.name, i).second) {
      throw InvalidArgument("mechanism: duplicate species '" + s.name + "'");
    }
    for (const auto& [el, count] : s.composition) {
      if (count < 0) throw InvalidArgument("species '" + s.name + "': negative element count");
      if (!element_set.empty() && !element_set.contains(el)) {
        throw InvalidArgument("species '" + s.name + "': undeclared element '" + el + "'");
      }
    }
    if (s.thermo) {
      const auto& t = *s.thermo;
      if (!(t.t_low < t.t_common && t.t_common < t.t_high)) {
        throw InvalidArgument("species '" + s.name + "': thermo ranges out of order");
      }
    }
  }

  for (const auto& r : reactions_) {
    const std::string eq = r.equation();
    if (r.reactants.empty() || r.products.empty()) {
      throw InvalidArgument("reaction " + eq + ": empty side");
    }
    bool compositions_known = true;
    for (const auto* side : {&r.reactants, &r.products}) {
      for (const auto& [name, nu] : *side) {
        const auto it = index_.find(name);
        if (it == index_.end()) {
          throw InvalidArgument("reaction " + eq + ": undeclared species '" + name + "'");
        }
        if (nu <= 0) throw InvalidArgument("reaction " + eq + ": nonpositive coefficient");
        if (species_[it->second].composition.empty()) compositions_known = false;
      }
    }
    if (r.third_body) {
      for (const auto& [name, eff] : r.third_body->efficiencies) {
        if (!index_.contains(name)) {
          throw InvalidArgument("reaction " + eq + ": efficiency for undeclared species '" +
                                name + "'");
        }
        if (eff < 0.0) throw InvalidArgument("reaction " + eq + ": negative efficiency");
      }
    }
    if (!(r.forward.pre_exponential > 0.0)) {
      throw InvalidArgument("reaction " + eq + ": pre-exponential factor must be positive");
    }
    if ((r.reverse_mode == ReverseMode::Explicit) != r.reverse.has_value()) {
      throw InvalidArgument("reaction " + eq + ": explicit reverse rate mismatch");
    }
    if (r.reverse && !(r.reverse->pre_exponential > 0.0)) {
      throw InvalidArgument("reaction " + eq + ": reverse pre-exponential must be positive");
    }
    if (r.forward_order() > kMaxMolecularity ||
        (r.reversible() && r.reverse_order() > kMaxMolecularity)) {
      throw UnsupportedOrder("reaction " + eq + ": molecularity above " +
                             std::to_string(kMaxMolecularity));
    }
    if (compositions_known) {
      std::map<std::string, int> balance;
      for (const auto& [name, nu] : r.products) {
        for (const auto& [el, n] : species_[index_.at(name)].composition) balance[el] += nu * n;
      }
      for (const auto& [name, nu] : r.reactants) {
        for (const auto& [el, n] : species_[index_.at(name)].composition) balance[el] -= nu * n;
      }
      for (const auto& [el, b] : balance) {
        if (b != 0) {
          throw InvalidArgument("reaction " + eq + ": element " + el + " unbalanced by " +
                                std::to_string(b));
        }
      }
    }
  }
}

std::optional<std::size_t> Mechanism::find_species(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Mechanism::species_index(const std::string& name) const {
  const auto i = find_species(name);
  if (!i) throw InvalidArgument("unknown species '" + name + "'");
  return *i;
}

std::vector<std::string> Mechanism::species_names() const {
  std::vector<std::string> names;
  names.reserve(species_.size());
  for (const auto& s : species_) names.push_back(s.name);
  return names;
}

double rate_constant(const Arrhenius& a, double temperature) {
  if (!(temperature > 0.0)) throw InvalidArgument("rate_constant: temperature must be positive");
  if (!(a.pre_exponential > 0.0)) {
    throw InvalidArgument("rate_constant: pre-exponential factor must be positive");
  }
  const double k = a.pre_exponential * std::pow(temperature, a.temperature_exponent) *
                   std::exp(-a.activation_energy / (constants::kGasConstantCal * temperature));
  if (!std::isfinite(k) || k <= 0.0) {
    throw Error("rate_constant: A = " + detail::num(a.pre_exponential) + ", b = " +
                detail::num(a.temperature_exponent) + ", E_a = " +
                detail::num(a.activation_energy) + " at T = " + detail::num(temperature) +
                " K is not representable");
  }
  return k;
}

ThermoProperties nasa7_props(const Nasa7& fit, double t) {
  if (!(t >= fit.t_low && t <= fit.t_high)) {
    throw OutOfRange("NASA-7: T = " + detail::num(t) + " K outside [" +
                     detail::num(fit.t_low) + ", " + detail::num(fit.t_high) + "]");
  }
  const auto& a = t <= fit.t_common ? fit.low : fit.high;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  return {
      a[0] + a[1] * t + a[2] * t2 + a[3] * t3 + a[4] * t4,
      a[0] + a[1] * t / 2 + a[2] * t2 / 3 + a[3] * t3 / 4 + a[4] * t4 / 5 + a[5] / t,
      a[0] * std::log(t) + a[1] * t + a[2] * t2 / 2 + a[3] * t3 / 3 + a[4] * t4 / 4 + a[6],
  };
}

ThermoProperties nasa7_props(const Species& s, double temperature) {
  if (!s.thermo) throw MissingThermo("species '" + s.name + "' has no thermo data");
  return nasa7_props(*s.thermo, temperature);
}

double equilibrium_constant(const Mechanism& m, const Reaction& r, double temperature) {
  double delta_s = 0.0;
  double delta_h = 0.0;
  for (const auto& [name, nu] : r.products) {
    const auto p = nasa7_props(m.species()[m.species_index(name)], temperature);
    delta_s += nu * p.s_over_r;
    delta_h += nu * p.h_over_rt;
  }
  for (const auto& [name, nu] : r.reactants) {
    const auto p = nasa7_props(m.species()[m.species_index(name)], temperature);
    delta_s -= nu * p.s_over_r;
    delta_h -= nu * p.h_over_rt;
  }
  const double kp = std::exp(delta_s - delta_h);
  const double c_ref =
      constants::kReferencePressureAtm / (constants::kGasConstantAtmCm3 * temperature);
  return kp * std::pow(c_ref, r.delta_nu());
}

double equilibrium_reverse_rate(const Mechanism& m, const Reaction& r, double temperature) {
  if (r.reverse_mode != ReverseMode::FromEquilibrium) {
    throw InvalidArgument("equilibrium_reverse_rate: reaction " + r.equation() +
                          " does not take its reverse rate from equilibrium");
  }
  const double kf = rate_constant(r.forward, temperature);
  const double kr = kf / equilibrium_constant(m, r, temperature);
  if (!std::isfinite(kr) || kr <= 0.0) {
    throw Error("equilibrium_reverse_rate: non-finite reverse rate for " + r.equation());
  }
  return kr;
}

std::pair<double, double> rate_constants(const Mechanism& m, const Reaction& r,
                                         double temperature) {
  const double kf = rate_constant(r.forward, temperature);
  switch (r.reverse_mode) {
    case ReverseMode::None:
      return {kf, 0.0};
    case ReverseMode::Explicit:
      return {kf, rate_constant(*r.reverse, temperature)};
    case ReverseMode::FromEquilibrium:
      return {kf, equilibrium_reverse_rate(m, r, temperature)};
  }
  return {kf, 0.0};
}

namespace {

struct Term {
  std::vector<std::size_t> monomial;  // ascending species indices
  double coefficient;                 // rate constant (times efficiency)
  double direction;                   // +1 forward, -1 reverse
};

std::vector<std::size_t> expand(const Mechanism& m, const Stoichiometry& s) {
  std::vector<std::size_t> idx;
  for (const auto& [name, nu] : s) {
    idx.insert(idx.end(), static_cast<std::size_t>(nu), m.species_index(name));
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

void push_terms(const Mechanism& m, const Reaction& r, const Stoichiometry& side, double k,
                double direction, std::vector<Term>& out) {
  if (k == 0.0) return;
  const auto base = expand(m, side);
  if (!r.third_body) {
    out.push_back({base, k, direction});
    return;
  }
  for (std::size_t s = 0; s < m.species_count(); ++s) {
    const double eff = r.third_body->efficiency(m.species()[s].name);
    if (eff == 0.0) continue;
    auto mono = base;
    mono.insert(std::upper_bound(mono.begin(), mono.end(), s), s);
    out.push_back({std::move(mono), k * eff, direction});
  }
}

}  // namespace

PolynomialSystem to_polynomial(const Mechanism& m, double temperature) {
  const std::size_t n = m.species_count();
  if (n == 0) throw InvalidArgument("to_polynomial: mechanism has no species");

  std::size_t degree = 1;
  for (const auto& r : m.reactions()) {
    const int order = std::max(r.forward_order(), r.reversible() ? r.reverse_order() : 0);
    if (order > kMaxMolecularity) {
      throw UnsupportedOrder("to_polynomial: reaction " + r.equation() + " has molecularity " +
                             std::to_string(order));
    }
    degree = std::max(degree, static_cast<std::size_t>(order));
  }

  std::vector<std::vector<Triplet>> entries(degree);
  for (const auto& r : m.reactions()) {
    if (r.reverse_mode == ReverseMode::FromEquilibrium) {
      for (const auto* side : {&r.reactants, &r.products}) {
        for (const auto& [name, nu] : *side) {
          if (!m.species()[m.species_index(name)].thermo) {
            throw MissingThermo("to_polynomial: reaction " + r.equation() +
                                " needs thermo data for '" + name + "'");
          }
        }
      }
    }
    const auto [kf, kr] = rate_constants(m, r, temperature);

    std::map<std::size_t, int> net;
    for (const auto& [name, nu] : r.products) net[m.species_index(name)] += nu;
    for (const auto& [name, nu] : r.reactants) net[m.species_index(name)] -= nu;

    std::vector<Term> terms;
    push_terms(m, r, r.reactants, kf, 1.0, terms);
    if (r.reversible()) push_terms(m, r, r.products, kr, -1.0, terms);

    for (const auto& t : terms) {
      const std::size_t col = encode_monomial(t.monomial, n);
      auto& bucket = entries[t.monomial.size() - 1];
      for (const auto& [species, nu] : net) {
        if (nu == 0) continue;
        bucket.push_back({species, col, t.direction * nu * t.coefficient});
      }
    }
  }

  std::vector<SparseMatrix> coeffs;
  std::size_t width = 1;
  for (std::size_t j = 1; j <= degree; ++j) {
    width = detail::checked_mul(width, n, "to_polynomial");
    coeffs.emplace_back(n, width, std::move(entries[j - 1]));
  }
  return {n, std::move(coeffs)};
}

Vector direct_rates(const Mechanism& m, double temperature, std::span<const double> c) {
  if (c.size() != m.species_count()) throw ShapeMismatch("direct_rates: state length mismatch");
  Vector wdot(c.size(), 0.0);
  for (const auto& r : m.reactions()) {
    const auto [kf, kr] = rate_constants(m, r, temperature);
    double fwd = kf;
    for (const auto& [name, nu] : r.reactants) fwd *= std::pow(c[m.species_index(name)], nu);
    double rev = 0.0;
    if (r.reversible()) {
      rev = kr;
      for (const auto& [name, nu] : r.products) rev *= std::pow(c[m.species_index(name)], nu);
    }
    double q = fwd - rev;
    if (r.third_body) {
      double conc_m = 0.0;
      for (std::size_t s = 0; s < c.size(); ++s) {
        conc_m += r.third_body->efficiency(m.species()[s].name) * c[s];
      }
      q *= conc_m;
    }
    for (const auto& [name, nu] : r.reactants) wdot[m.species_index(name)] -= nu * q;
    for (const auto& [name, nu] : r.products) wdot[m.species_index(name)] += nu * q;
  }
  return wdot;
}

std::map<std::string, double> element_totals(const Mechanism& m, std::span<const double> c) {
  if (c.size() != m.species_count()) throw ShapeMismatch("element_totals: length mismatch");
  std::map<std::string, double> totals;
  for (const auto& e : m.elements()) totals[e] = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (const auto& [el, n] : m.species()[i].composition) totals[el] += n * c[i];
  }
  return totals;
}

std::vector<Vector> element_matrix(const Mechanism& m) {
  std::vector<Vector> e(m.elements().size(), Vector(m.species_count(), 0.0));
  for (std::size_t k = 0; k < m.elements().size(); ++k) {
    for (std::size_t i = 0; i < m.species_count(); ++i) {
      const auto& comp = m.species()[i].composition;
      const auto it = comp.find(m.elements()[k]);
      if (it != comp.end()) e[k][i] = it->second;
    }
  }
  return e;
}

}  // namespace ckin
