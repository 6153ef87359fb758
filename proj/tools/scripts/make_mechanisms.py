#!/usr/bin/env python3
"""Regenerate the curated Chemkin-subset mechanisms under data/mechanisms/.

Requires Cantera. Pressure-dependent (falloff) reactions are replaced by
elementary reactions carrying the effective rate constant evaluated at the
reactor conditions (2000 K, 1 atm, phi = 0.8 in air). The substitution is exact
for the initial mixture and drifts only through the collider composition as
the mixture reacts.
"""

import argparse
import datetime
import pathlib

import cantera as ct

T_REACTOR = 2000.0
P_REACTOR = ct.one_atm
CAL = 4184.0  # J/kmol per cal/mol


def fmt(x):
    return f"{x:.8E}"


def thermo_entry(sp):
    c = sp.thermo.coeffs
    tmid, high, low = c[0], c[1:8], c[8:15]
    comp = "".join(f"{el:<2}{int(round(n)):>3}" for el, n in sp.composition.items())
    comp = comp.ljust(20)[:20]
    line1 = (f"{sp.name:<18}{'':6}{comp}G{sp.thermo.min_temp:10.3f}"
             f"{sp.thermo.max_temp:10.3f}{tmid:8.2f}").ljust(79) + "1"
    line2 = "".join(f"{fmt(v):>15}" for v in high[:5]).ljust(79) + "2"
    line3 = "".join(f"{fmt(v):>15}" for v in (*high[5:7], *low[:3])).ljust(79) + "3"
    line4 = "".join(f"{fmt(v):>15}" for v in low[3:7]).ljust(79) + "4"
    return [line1, line2, line3, line4]


def side(stoich):
    parts = []
    for name, nu in stoich.items():
        nu = int(round(nu))
        parts.append(name if nu == 1 else f"{nu}{name}")
    return "+".join(parts)


def reaction_lines(gas, idx, r, keep):
    lines = []
    arrow = "<=>" if r.reversible else "=>"
    order = sum(r.reactants.values())
    rtype = r.reaction_type
    if rtype.startswith("falloff"):
        # effective rate at reactor conditions, SI -> cgs
        k = gas.forward_rate_constants[idx]
        a = k * 1e3 ** (order - 1)
        eq = side(r.reactants) + arrow + side(r.products)
        lines.append(f"! {r.equation}: effective rate at 2000 K, 1 atm")
        lines.append(f"{eq:<32} {a:.6E} {0.0:8.3f} {0.0:12.2f}")
        return lines
    rate = r.rate
    third = rtype.startswith("three-body")
    explicit_collider = third and r.third_body.name != "M"
    if explicit_collider:
        collider = r.third_body.name
        reac = dict(r.reactants)
        prod = dict(r.products)
        reac[collider] = reac.get(collider, 0) + 1
        prod[collider] = prod.get(collider, 0) + 1
        eq = side(reac) + arrow + side(prod)
        order += 1
        third = False
    elif third:
        eq = side(r.reactants) + "+M" + arrow + side(r.products) + "+M"
        order += 1
    else:
        eq = side(r.reactants) + arrow + side(r.products)
    a = rate.pre_exponential_factor * 1e3 ** (order - 1)
    lines.append(f"{eq:<32} {a:.6E} {rate.temperature_exponent:8.3f} "
                 f"{rate.activation_energy / CAL:12.2f}")
    if third:
        effs = {s: e for s, e in r.third_body.efficiencies.items() if s in keep}
        if effs:
            lines.append(" ".join(f"{s}/{e:.2f}/" for s, e in effs.items()))
    if r.duplicate:
        lines.append("DUPLICATE")
    return lines


def write_mechanism(path, gas, keep, fuel, title):
    gas.set_equivalence_ratio(0.8, fuel, {"O2": 0.21, "N2": 0.79})
    gas.TP = T_REACTOR, P_REACTOR
    species = [gas.species(n) for n in keep]
    elements = sorted({e for sp in species for e in sp.composition})
    out = [f"! {title}",
           f"! generated {datetime.date.today().isoformat()} by tools/scripts/make_mechanisms.py",
           "ELEMENTS", " ".join(elements), "END", "SPECIES"]
    out += [" ".join(keep[i:i + 8]) for i in range(0, len(keep), 8)]
    out += ["END", "THERMO ALL", "   300.000  1000.000  5000.000"]
    for sp in species:
        out += thermo_entry(sp)
    out += ["END", "REACTIONS CAL/MOLE MOLES"]
    for idx, r in enumerate(gas.reactions()):
        names = set(r.reactants) | set(r.products)
        if r.reaction_type.startswith("three-body") and r.third_body.name != "M":
            names.add(r.third_body.name)
        if not names <= set(keep):
            continue
        out += reaction_lines(gas, idx, r, set(keep))
    out.append("END")
    path.write_text("\n".join(out) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=pathlib.Path(__file__).resolve().parents[2] / "data" / "mechanisms",
                    type=pathlib.Path)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    h2 = ct.Solution("h2o2.yaml")
    keep = [n for n in h2.species_names if n != "AR"]
    write_mechanism(args.out / "h2_air_9sp.inp", h2, keep, "H2",
                    "H2/O2 subset with inert N2 (9 species)")

    gri = ct.Solution("gri30.yaml")
    keep = [s.name for s in gri.species()
            if "N" not in s.composition and s.composition.get("C", 0) <= 1
            and s.name not in ("AR", "C")] + ["N2"]
    write_mechanism(args.out / "ch4_air_21sp.inp", gri, keep, "CH4",
                    "C1 methane subset with inert N2 (21 species)")


if __name__ == "__main__":
    main()
