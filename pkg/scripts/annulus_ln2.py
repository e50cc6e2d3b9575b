"""Dyadic annulus sums of |l|^-2 and l_1^2 |l|^-4 approaching ln 2 times the residue."""

import argparse

import numpy as np

from torsym.config import AnnulusConfig
from torsym.experiments import annulus_law

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--rmax", type=float, default=AnnulusConfig.r_max)
args = p.parse_args()

res = annulus_law(AnnulusConfig(r_max=args.rmax))
targets = {"inv_r2": 2 * np.pi * np.log(2), "xi1sq_r4": np.pi * np.log(2)}
for name, r in res.items():
    print(f"{name}: limit {r['limit'].real:.8f}  target {targets[name]:.8f}  error bar {r['error']:.1e}")
    for R, T in r["table"]:
        print(f"  R = {R:7.1f}  T(R) = {np.real(T):.8f}")
