"""Leading coefficient of tr(A eta(tL)) for <l>^-2.5 against the eta moments, plus TR by two methods."""

import argparse

from torsym.config import CanonicalTraceConfig, FactorizationConfig
from torsym.experiments import canonical_trace, eta_factorization

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--order", type=float, default=-2.5)
p.add_argument("--skip-trace", action="store_true", help="only the factorization check")
args = p.parse_args()

res = eta_factorization(FactorizationConfig(order=args.order))
for row in res["rows"]:
    print(f"{row['eta']:>12}: leading {row['leading'].real:.8f}  moment {row['moment'].real:.8f}"
          f"  fit residual {row['residual']:.1e}")
print(f"ratio of fits {res['fit_ratio'].real:.6f}, ratio of moments {res['moment_ratio'].real:.6f}")

if not args.skip_trace:
    tr = canonical_trace(CanonicalTraceConfig(order=args.order))
    print(f"TR finite part {tr['finite_part'].real:.8f}, plateau {tr['plateau'].real:.8f}")
