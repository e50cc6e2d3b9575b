"""Experiment drivers shared by ``scripts/`` and the acceptance suite.

Each function takes a config from :mod:`torsym.config` and returns a plain
dict of the measured quantities, leaving comparisons to the caller.
"""

from __future__ import annotations

import numpy as np

from . import expansion as ex
from .config import (AnnulusConfig, CanonicalTraceConfig, ExponentCheckConfig,
                     FactorizationConfig, PrincipalConfig, ResidueExpansionConfig,
                     Su2ScalingConfig)
from .shells import shell_table
from .su2 import Su2Symbol, casimir, principal_symbol_limit
from .symbols import bracket_symbol, homogeneous_symbol
from .traces import annulus_limit, canonical_trace_finite_part, residue


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(np.abs(y)), 1)[0])


def annulus_law(cfg: AnnulusConfig = AnnulusConfig()) -> dict:
    """Dyadic annulus limits of |l|^-2 and l_1^2 |l|^-4 in dimension 2."""
    out = {}
    for name, profile in (("inv_r2", None), ("xi1sq_r4", lambda x, w: w[..., 0] ** 2)):
        res = annulus_limit(homogeneous_symbol(2, -2, profile), r_max=cfg.r_max, x_grid=cfg.x_grid)
        out[name] = {"limit": res.limit, "error": res.error, "table": res.table}
    return out


def eta_factorization(cfg: FactorizationConfig = FactorizationConfig()) -> dict:
    """Leading expansion coefficient for each bump against its eta moment."""
    sigma = bracket_symbol(2, cfg.order)
    ts = cfg.t.values()
    m_plus_n = cfg.order + 2
    rows = []
    for a, b in cfg.bumps:
        eta = ex.CutoffFunction.bump(a, b)
        vals = ex.weighted_trace_series(sigma, eta, ts, x_grid=1)
        fit = ex.fit_expansion(ts, vals, cfg.order, 2, terms=cfg.terms)
        rows.append({"eta": eta.label, "leading": fit.leading,
                     "moment": ex.eta_moment(eta, m_plus_n), "residual": fit.residual})
    return {"rows": rows,
            "fit_ratio": rows[0]["leading"] / rows[1]["leading"],
            "moment_ratio": rows[0]["moment"] / rows[1]["moment"]}


def canonical_trace(cfg: CanonicalTraceConfig = CanonicalTraceConfig()) -> dict:
    """TR of <l>^order by the discrete finite part and by a plateau cutoff."""
    sigma = bracket_symbol(2, cfg.order)
    fp = canonical_trace_finite_part(sigma, cfg.radii.values(), x_grid=1)
    eta = ex.CutoffFunction.plateau(*cfg.plateau)
    ts = cfg.t.values()
    vals = ex.weighted_trace_series(sigma, eta, ts, x_grid=1)
    fit = ex.fit_expansion(ts, vals, cfg.order, 2, mode="plateau", terms=cfg.terms)
    return {"finite_part": fp.TR, "finite_part_residual": fp.residual,
            "plateau": ex.extract_canonical_trace(fit), "plateau_residual": fit.residual}


def residue_from_expansion(cfg: ResidueExpansionConfig = ResidueExpansionConfig()) -> dict:
    """res(|l|^-2) from bump expansions and from sphere quadrature."""
    sigma = homogeneous_symbol(2, -2)
    ts = cfg.t.values()
    fits, moments = [], []
    for a, b in cfg.bumps:
        eta = ex.CutoffFunction.bump(a, b)
        vals = ex.weighted_trace_series(sigma, eta, ts, x_grid=1)
        fits.append(ex.fit_expansion(ts, vals, -2, 2, terms=cfg.terms))
        moments.append(ex.eta_moment(eta, 0))
    return {"expansion": ex.extract_residue(fits, moments), "quadrature": residue(sigma)}


def su2_scaling(cfg: Su2ScalingConfig = Su2ScalingConfig()) -> dict:
    """t-exponent and leading coefficient of the SU(2) weighted trace."""
    m = cfg.m
    sigma = Su2Symbol.scalar(lambda lam, j: lam ** (m / 2) if lam > 0 else 0.0, m)
    eta = ex.CutoffFunction.bump(*cfg.bump)
    ts = cfg.ts()
    vals = ex.weighted_trace_su2_series(sigma, eta, ts).real
    slope = loglog_slope(ts, vals)
    expected = -(m + 3) / 2
    # coefficient of the predicted power, read off at the smallest t
    return {"slope": slope, "expected_slope": expected,
            "coefficient": float(vals[0] * ts[0] ** -expected),
            "moment": ex.eta_moment(eta, m + 3), "t": ts, "values": vals}


def principal_limits(cfg: PrincipalConfig = PrincipalConfig()) -> dict:
    """Principal-symbol sequences of a 0-homogeneous symbol and a perturbation."""
    from .su2 import homogeneous_su2_symbol

    base = homogeneous_su2_symbol(1.0, -1.0)
    pert = Su2Symbol(lambda x, k: base.at(k) + np.eye(k + 1) * (1 + casimir(k)) ** -0.5, 0.0)
    hom = principal_symbol_limit(base, cfg.k_max)
    per = principal_symbol_limit(pert, cfg.k_max)
    lo, hi = cfg.k_fit
    ks = per.ks[(per.ks >= lo) & (per.ks <= hi)]
    dev = np.abs(per.sequence[ks - 1] - per.limit)
    return {"homogeneous": hom, "perturbed": per, "slope": loglog_slope(ks, dev)}


def exponent_check(cfg: ExponentCheckConfig = ExponentCheckConfig()) -> dict:
    """log-log growth of S(R) = sum_{0<|l|<R} |l|^m from exact shell sums."""
    sym = homogeneous_symbol(2, cfg.m)
    radii = np.geomspace(cfg.r_min, cfg.r_max, cfg.count)
    table = shell_table(sym, int(cfg.r_max**2) + 1, x_grid=1)
    S = np.array([table.ball_sum(R) for R in radii]).real
    return {"radii": radii, "sums": S, "slope": loglog_slope(radii, S)}
