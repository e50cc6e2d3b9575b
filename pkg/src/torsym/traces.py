"""Non-commutative residue and canonical trace of classical toroidal symbols."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditionedError, OrderError
from .shells import ShellTable, shell_table
from .symbols import ClassicalToroidalSymbol, torus_grid

COND_LIMIT = 1e10


@dataclass
class SphereQuadrature:
    """Nodes and positive weights on S^{n-1}, n in {2, 3}.

    n = 2: trapezoid rule with ``size`` points (exact for trigonometric
    degree < size).  n = 3: Gauss-Legendre in cos(theta) with ``size``
    points times a trapezoid in phi with 2*size points (exact to degree
    2*size - 1).
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    degree: int

    @classmethod
    def build(cls, dim, size=64):
        if dim == 2:
            th = 2 * np.pi * np.arange(size) / size
            nodes = np.stack([np.cos(th), np.sin(th)], axis=-1)
            return cls(2, nodes, np.full(size, 2 * np.pi / size), size - 1)
        if dim == 3:
            z, wz = np.polynomial.legendre.leggauss(size)
            phi = 2 * np.pi * np.arange(2 * size) / (2 * size)
            Z, PHI = np.meshgrid(z, phi, indexing="ij")
            rho = np.sqrt(1 - Z**2)
            nodes = np.stack([rho * np.cos(PHI), rho * np.sin(PHI), Z], axis=-1).reshape(-1, 3)
            weights = (wz[:, None] * np.full(2 * size, 2 * np.pi / (2 * size))).ravel()
            return cls(3, nodes, weights, 2 * size - 1)
        raise ValueError("sphere quadrature is implemented for n = 2 and n = 3")

    def integrate(self, f):
        return complex(np.sum(self.weights * np.asarray(f(self.nodes))))


def in_Zn(m, n):
    """m in {-n, -n+1, ...}."""
    m = complex(m)
    return m.imag == 0 and float(m.real).is_integer() and m.real >= -n


def residue_density(sigma: ClassicalToroidalSymbol, x, quad: SphereQuadrature = None) -> complex:
    """Integral over the unit sphere of the degree -n term at x (0 if absent)."""
    n = sigma.dim
    if not in_Zn(sigma.order, n):
        return 0j
    term = sigma.term_of_degree(-n)
    if term is None:
        return 0j
    quad = quad or SphereQuadrature.build(n)
    x = np.asarray(x, dtype=float)
    return complex(np.sum(quad.weights * np.asarray(term.profile(x, quad.nodes), dtype=complex)))


def residue(sigma: ClassicalToroidalSymbol, quad: SphereQuadrature = None, x_grid: int = 16) -> complex:
    """res = int_T residue_density(x) dx, periodic trapezoid rule in x."""
    n = sigma.dim
    if not in_Zn(sigma.order, n) or sigma.term_of_degree(-n) is None:
        return 0j
    quad = quad or SphereQuadrature.build(n)
    term = sigma.term_of_degree(-n)
    xs = np.zeros((1, n)) if term.x_independent else torus_grid(n, x_grid)
    return complex(np.mean([residue_density(sigma, x, quad) for x in xs]))


def default_radii(r_min=32.5, r_max=2048.5, count=40):
    """Log-spaced half-integer radii (never on a lattice shell)."""
    r = np.unique(np.floor(np.geomspace(r_min, r_max, count))) + 0.5
    return r


def _lstsq(design, values):
    scale = np.max(np.abs(design), axis=0)
    scaled = design / scale
    cond = np.linalg.cond(scaled)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditionedError(
            f"design matrix condition number {cond:.3g} exceeds {COND_LIMIT:g}; "
            "extend the radius (or t) grid"
        )
    coef, *_ = np.linalg.lstsq(scaled, values, rcond=None)
    resid = values - scaled @ coef
    return coef / scale, resid


@dataclass
class FinitePartFit:
    TR: complex
    exponents: list
    coefficients: list
    radii: np.ndarray
    partial_sums: np.ndarray
    residual: float

    @property
    def shell_coeffs(self):
        return list(zip(self.exponents, self.coefficients))


def shell_exponents(m, n, extra=2):
    """m+n-j for every growing term (Re >= 0) plus ``extra`` decaying ones."""
    m = complex(m)
    lead = m + n
    N = int(np.floor(lead.real)) + 1 if lead.real >= 0 else 0
    return [lead - j for j in range(N + extra)]


def canonical_trace_finite_part(
    sigma: ClassicalToroidalSymbol,
    radii=None,
    x_grid: int = 16,
    extra: int = 2,
    table: ShellTable = None,
) -> FinitePartFit:
    """Discrete finite part of R -> sum_{|l| < R} int_T sigma(x, l) dx.

    Fits S(R) = TR + sum_j b_j R^(m+n-j) by least squares with the exponents
    fixed by the order; besides the growing terms, ``extra`` decaying terms
    absorb the slow convergence of the o(1) remainder.
    """
    n = sigma.dim
    m = complex(sigma.order)
    if m.real >= -n and m.imag == 0 and float(m.real).is_integer():
        raise OrderError(f"order {m.real:g} is an integer >= -n: use the residue / annulus limit")
    radii = default_radii() if radii is None else np.asarray(radii, dtype=float)
    exps = [e for e in shell_exponents(m, n, extra) if e != 0]
    if table is None:
        table = shell_table(sigma, int(np.ceil(radii.max() ** 2)), x_grid)
    S = np.array([table.ball_sum(R) for R in radii])
    design = np.column_stack([np.ones(len(radii))] + [radii ** e for e in exps]).astype(complex)
    coef, resid = _lstsq(design, S)
    misfit = float(np.max(np.abs(resid)) / max(np.max(np.abs(S)), 1e-300))
    return FinitePartFit(complex(coef[0]), exps, [complex(c) for c in coef[1:]], radii, S, misfit)


@dataclass
class AnnulusResult:
    limit: complex
    error: float
    table: list = field(default_factory=list)   # (R, T(R))


def annulus_limit(
    sigma: ClassicalToroidalSymbol, radii=None, r_max: float = 1024, x_grid: int = 16
) -> AnnulusResult:
    """Limit of T(R) = sum_{R <= |l| <= 2R} int_T sigma dx for order m in Z_n.

    For m = -n the limit is T at the largest radius, with the last dyadic
    increment as error bar; otherwise the growing powers R^(m+n-j) are
    fitted and subtracted.
    """
    n = sigma.dim
    m = complex(sigma.order)
    if not in_Zn(m, n):
        raise OrderError(f"order {m} is not in Z_n = {{-{n}, -{n}+1, ...}}")
    if radii is None:
        radii = [2.0**k for k in range(1, int(np.log2(r_max)) + 1)]
    radii = np.asarray(radii, dtype=float)
    table = shell_table(sigma, int(np.floor(4 * radii.max() ** 2)), x_grid)
    T = np.array([table.annulus_sum(R) for R in radii])
    rows = list(zip(radii.tolist(), T.tolist()))
    growing = [m.real + n - j for j in range(int(m.real) + n) if m.real + n - j > 0]
    if not growing:
        err = float(abs(T[-1] - T[-2])) if len(T) > 1 else float("inf")
        return AnnulusResult(complex(T[-1]), err, rows)
    use = radii >= max(8.0, radii[0])
    design = np.column_stack([np.ones(use.sum())] + [radii[use] ** e for e in growing] +
                             [radii[use] ** -1.0]).astype(complex)
    coef, resid = _lstsq(design, T[use])
    return AnnulusResult(complex(coef[0]), float(np.max(np.abs(resid))), rows)
