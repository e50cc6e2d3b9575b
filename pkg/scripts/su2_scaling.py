"""t-scaling of the SU(2) weighted trace for lambda^(m/2) I and the principal-symbol limit."""

import argparse

from torsym.config import Su2ScalingConfig
from torsym.experiments import principal_limits, su2_scaling

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--m", type=float, default=-1.0)
args = p.parse_args()

res = su2_scaling(Su2ScalingConfig(m=args.m))
print(f"slope {res['slope']:.6f} (expected {res['expected_slope']:g})")
print(f"coefficient {res['coefficient']:.6f}; eta moment c_(m+3) = {res['moment'].real:.6f}")
for t, v in zip(res["t"], res["values"]):
    print(f"  t = {t:.3e}  value = {v:.8e}")

pl = principal_limits()
print(f"principal limit of the perturbed symbol {pl['perturbed'].limit.real:.10f}, "
      f"decay slope {pl['slope']:.3f}")
