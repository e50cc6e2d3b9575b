"""Command-line front end.

Every command prints one JSON line on stdout.  Exit codes: 0 ok, 1 usage,
2 numerical refusal, 3 spec parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import expansion as ex
from . import su2 as su2m
from .errors import EvalError, ParseError, RefusalError, SpecError, UsageError
from .extension import extend_gradient, extend_homogeneous_term, extend_value
from .quantize import TrigPolynomial, apply, trace_direct
from .specfile import read_spec
from .traces import annulus_limit, canonical_trace_finite_part, default_radii, residue, residue_density

EXIT_USAGE, EXIT_REFUSAL, EXIT_SPEC = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def num(z):
    """JSON form of a number: a float, or [re, im] when the imaginary part is non-zero."""
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def _vec(text, what):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _complex_rows(xs, zs):
    return [(float(x), float(np.real(z)), float(np.imag(z))) for x, z in zip(xs, zs)]


def _eta(args):
    if args.eta == "bump":
        return ex.CutoffFunction.bump(args.bump_a, args.bump_b)
    if args.eta == "plateau":
        return ex.CutoffFunction.plateau(args.width, args.support)
    if not args.eta_file:
        raise UsageError("--eta file needs --eta-file")
    from .dsl import parse

    doc = json.loads(Path(args.eta_file).read_text())
    try:
        expr = parse(doc["expr"], 1, extra=("u",))
        lo, hi = (float(v) for v in doc["support"])
        kind = doc.get("kind", "bump")
    except (KeyError, TypeError, ValueError) as e:
        raise SpecError(f"eta file: {e}") from e
    return ex.CutoffFunction(kind, lambda u: expr(u=u), lo, hi, float(doc.get("width", 0.0)),
                             label=doc["expr"])


def _torus(spec):
    if spec.symbol is None:
        raise SpecError("spec has no torus symbol (terms / remainder)")
    return spec.symbol


def _su2(spec):
    if spec.su2 is None:
        raise SpecError("spec has no su2 block")
    return spec.su2


# ---------------------------------------------------------------- commands


def cmd_apply(args, spec):
    doc = json.loads(Path(args.input).read_text())
    coeffs = {tuple(int(v) for v in l): complex(*c) if isinstance(c, list) else complex(c)
              for l, c in doc["coeffs"]}
    f = TrigPolynomial(spec.dim, coeffs)
    vals = apply(spec.lattice(), f, args.grid)
    if args.out:
        axis = np.arange(args.grid) / args.grid
        mesh = np.meshgrid(*([axis] * spec.dim), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        _write_csv(args.out, [f"x{k + 1}" for k in range(spec.dim)] + ["re", "im"],
                   [tuple(p) + (float(v.real), float(v.imag)) for p, v in zip(pts, vals.ravel())])
    return {"grid": args.grid, "max_abs": float(np.max(np.abs(vals))),
            "mean": num(np.mean(vals)), "out": args.out}


def cmd_residue(args, spec):
    sym = _torus(spec)
    out = {"res": num(residue(sym))}
    if args.density_at:
        out["density"] = num(residue_density(sym, _vec(args.density_at, "--density-at")))
    return out


def _radii(args):
    if args.radii:
        return np.array([float(v) for v in args.radii.split(",")])
    return default_radii(args.rmin, args.rmax, args.count)


def _t_grid(args):
    return ex.t_grid(args.tmin, args.tmax, args.per_decade)


def cmd_trace(args, spec):
    sym = _torus(spec)
    if args.method == "direct":
        est = trace_direct(sym, spec.order.real if spec.order.imag == 0 else spec.order, args.radius)
        return {"method": "direct", "trace": num(est.value), "tail": est.tail}
    if args.method == "finite-part":
        fit = canonical_trace_finite_part(sym, _radii(args))
        if args.csv:
            _write_csv(args.csv, ["R", "partial_sum_re", "partial_sum_im"],
                       _complex_rows(fit.radii, fit.partial_sums))
        return {"method": "finite-part", "TR": num(fit.TR), "residual": fit.residual,
                "shell_coeffs": [[num(e), num(c)] for e, c in fit.shell_coeffs]}
    eta = ex.CutoffFunction.plateau(args.width, args.support)
    ts = _t_grid(args)
    vals = ex.weighted_trace_series(sym, eta, ts)
    fit = ex.fit_expansion(ts, vals, spec.order, spec.dim, mode="plateau", terms=args.terms)
    if args.csv:
        _write_csv(args.csv, ["t", "value_re", "value_im"], _complex_rows(ts, vals))
    return {"method": "eta-plateau", "TR": num(ex.extract_canonical_trace(fit)),
            "residual": fit.residual}


def _fit_json(fit):
    out = {"coefficients": [[num(e), num(c)] for e, c in zip(fit.exponents, fit.coefficients)],
           "residual": fit.residual}
    if fit.constant is not None:
        out["constant"] = num(fit.constant)
    if fit.log_coefficient is not None:
        out["log_coefficient"] = num(fit.log_coefficient)
    return out


def cmd_expand(args, spec):
    sym = _torus(spec)
    eta = _eta(args)
    ts = _t_grid(args)
    vals = ex.weighted_trace_series(sym, eta, ts)
    mode = "plateau" if eta.kind == "plateau" else "bump"
    fit = ex.fit_expansion(ts, vals, spec.order, spec.dim, mode=mode, terms=args.terms)
    if args.out:
        _write_csv(args.out, ["t", "value_re", "value_im"], _complex_rows(ts, vals))
    out = {"eta": eta.label, "mode": mode}
    out.update(_fit_json(fit))
    return out


def cmd_annulus(args, spec):
    res = annulus_limit(_torus(spec), r_max=args.rmax)
    if args.csv:
        _write_csv(args.csv, ["R", "annulus_re", "annulus_im"],
                   _complex_rows([r for r, _ in res.table], [v for _, v in res.table]))
    return {"limit": num(res.limit), "error": res.error}


def cmd_su2(args, spec):
    sym = _su2(spec)
    if args.action == "principal":
        pl = su2m.principal_symbol_limit(sym, args.kmax)
        if args.csv:
            _write_csv(args.csv, ["k", "s_re", "s_im"], _complex_rows(pl.ks, pl.sequence))
        return {"limit": num(pl.limit), "error": pl.error, "last": num(pl.sequence[-1])}
    if args.action == "seminorm":
        m = args.order if args.order is not None else spec.su2.order.real
        sn = su2m.seminorm_su2(sym, m, J_max=args.kmax / 2)
        return {"order": m, "ratios": {str(k): v for k, v in sn.ratios.items()}}
    if args.action == "trace":
        tr = su2m.trace_su2(sym, sym.order.real, args.kmax / 2)
        return {"trace": num(tr.value), "tail": tr.tail}
    eta = _eta(args)
    ts = _t_grid(args)
    vals = ex.weighted_trace_su2_series(sym, eta, ts)
    mode = "plateau" if eta.kind == "plateau" else "bump"
    fit = ex.fit_expansion(ts, vals, sym.order, 3, mode=mode, terms=args.terms)
    if args.out:
        _write_csv(args.out, ["t", "value_re", "value_im"], _complex_rows(ts, vals))
    out = {"eta": eta.label, "mode": mode}
    out.update(_fit_json(fit))
    return out


def cmd_extend(args, spec):
    sym = _torus(spec)
    xi = _vec(args.xi, "--xi")
    if len(xi) != spec.dim:
        raise UsageError(f"--xi needs {spec.dim} components")
    x = _vec(args.at, "--at") if args.at else np.zeros(spec.dim)
    if spec.order == 0:
        val = extend_value(sym, x, xi, depth=args.depth)
        grad = extend_gradient(sym, x, xi, depth=args.depth)
        return {"value": num(val.value), "error": val.error,
                "gradient": [num(g) for g in grad.value], "gradient_error": grad.error}
    return {"value": num(extend_homogeneous_term(sym, spec.order, x, xi, depth=args.depth))}


# ---------------------------------------------------------------- parser


def _t_options(p):
    p.add_argument("--tmin", type=float, default=1e-5)
    p.add_argument("--tmax", type=float, default=1e-2)
    p.add_argument("--per-decade", type=int, default=ex.PER_DECADE)
    p.add_argument("--terms", type=int, default=3)


def _eta_options(p):
    p.add_argument("--eta", choices=["bump", "plateau", "file"], default="bump")
    p.add_argument("--eta-file")
    p.add_argument("--bump-a", type=float, default=1.0)
    p.add_argument("--bump-b", type=float, default=4.0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--support", type=float, default=2.0)


def build_parser():
    ap = _Parser(prog="torsym", description="Toroidal and SU(2) symbol calculus.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("apply", help="apply Op(sigma) to a trigonometric polynomial")
    p.add_argument("--spec", required=True)
    p.add_argument("--input", required=True, help='JSON {"coeffs": [[[l1, l2], [re, im]], ...]}')
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--out")
    p.set_defaults(run=cmd_apply)

    p = sub.add_parser("residue", help="non-commutative residue")
    p.add_argument("--spec", required=True)
    p.add_argument("--density-at")
    p.set_defaults(run=cmd_residue)

    p = sub.add_parser("trace", help="L2 trace or canonical trace")
    p.add_argument("--spec", required=True)
    p.add_argument("--method", choices=["direct", "finite-part", "eta-plateau"], default="direct")
    p.add_argument("--radius", type=float, default=200.0)
    p.add_argument("--radii")
    p.add_argument("--rmin", type=float, default=32.5)
    p.add_argument("--rmax", type=float, default=2048.5)
    p.add_argument("--count", type=int, default=40)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--support", type=float, default=2.0)
    p.add_argument("--csv")
    _t_options(p)
    p.set_defaults(run=cmd_trace)

    p = sub.add_parser("expand", help="fit the small-t expansion of tr(A eta(tL))")
    p.add_argument("--spec", required=True)
    _eta_options(p)
    _t_options(p)
    p.add_argument("--out")
    p.set_defaults(run=cmd_expand)

    p = sub.add_parser("annulus", help="limit of dyadic annulus sums")
    p.add_argument("--spec", required=True)
    p.add_argument("--rmax", type=float, default=1024.0)
    p.add_argument("--csv")
    p.set_defaults(run=cmd_annulus)

    p = sub.add_parser("su2", help="SU(2) symbol computations")
    p.add_argument("action", choices=["principal", "seminorm", "trace", "expand"])
    p.add_argument("--spec", required=True)
    p.add_argument("--kmax", type=int, default=64, help="largest 2j (k) used")
    p.add_argument("--order", type=float)
    p.add_argument("--csv")
    p.add_argument("--out")
    _eta_options(p)
    _t_options(p)
    p.set_defaults(run=cmd_su2)

    p = sub.add_parser("extend", help="homogeneous extension off the lattice")
    p.add_argument("--spec", required=True)
    p.add_argument("--xi", required=True)
    p.add_argument("--at")
    p.add_argument("--depth", type=int, default=12)
    p.set_defaults(run=cmd_extend)
    return ap


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        spec = read_spec(args.spec)
        result = args.run(args, spec)
    except (SpecError, ParseError, EvalError) as e:
        print(f"torsym: spec error: {e}", file=sys.stderr)
        return EXIT_SPEC
    except RefusalError as e:
        print(f"torsym: refused: {e}", file=sys.stderr)
        return EXIT_REFUSAL
    except (UsageError, OSError, ValueError, KeyError) as e:
        print(f"torsym: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(result, sort_keys=True))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
