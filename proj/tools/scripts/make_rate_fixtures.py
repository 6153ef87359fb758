#!/usr/bin/env python3
"""Write net production rates computed by Cantera for the curated mechanisms.

The Chemkin files under data/mechanisms/ are converted with Cantera's own
ck2yaml, so the fixtures are an independent check of both the parser and the
mass-action compiler. Units: mol/cm^3 and mol/(cm^3 s).
"""

import argparse
import json
import pathlib
import tempfile

import numpy as np
import cantera as ct
from cantera import ck2yaml

ROOT = pathlib.Path(__file__).resolve().parents[2]
MECHS = {
    "h2_air_9sp": ROOT / "data/mechanisms/h2_air_9sp.inp",
    "ch4_air_21sp": ROOT / "data/mechanisms/ch4_air_21sp.inp",
}


def convert(inp, workdir):
    out = pathlib.Path(workdir) / (inp.stem + ".yaml")
    ck2yaml.convert(str(inp), out_name=str(out), quiet=True, permissive=False)
    return out


def states(gas, rng, count):
    for k in range(count):
        x = rng.uniform(0.0, 1.0, gas.n_species)
        if k == 0:
            x = np.where(rng.uniform(size=gas.n_species) < 0.5, x, 0.0)
            x[gas.species_index("N2")] += 1.0
        yield x / x.sum()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=pathlib.Path, default=ROOT / "tests/fixtures/cantera")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--states", type=int, default=5)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    with tempfile.TemporaryDirectory() as tmp:
        for name, inp in MECHS.items():
            gas = ct.Solution(str(convert(inp, tmp)))
            cases = []
            for temperature in (1500.0, 2000.0):
                for x in states(gas, rng, args.states):
                    gas.TPX = temperature, ct.one_atm, x
                    cases.append({
                        "temperature": temperature,
                        "concentrations": (gas.concentrations * 1e-3).tolist(),
                        "net_rates": (gas.net_production_rates * 1e-3).tolist(),
                    })
            doc = {"mechanism": inp.name, "species": gas.species_names,
                   "cantera_version": ct.__version__, "cases": cases}
            (args.out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
            print(f"wrote {name}.json ({len(cases)} cases)")


if __name__ == "__main__":
    main()
