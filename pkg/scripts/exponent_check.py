"""Growth of S(R) = sum_{0<|l|<R} |l|^m in dimension 2, against the exponent R^(m+2)."""

import argparse

from torsym.config import ExponentCheckConfig
from torsym.experiments import exponent_check

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--m", type=float, default=-1.0)
p.add_argument("--rmax", type=float, default=1023.0)
args = p.parse_args()

res = exponent_check(ExponentCheckConfig(m=args.m, r_max=args.rmax))
for R, S in zip(res["radii"], res["sums"]):
    print(f"R = {R:8.2f}  S(R) = {S:.6f}")
print(f"log-log slope {res['slope']:.4f}; leading exponent m + n = {args.m + 2:g}")
