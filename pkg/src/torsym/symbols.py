"""Toroidal symbols on T^n x Z^n.

Every symbol carries a vectorised ``func(x, l)`` where ``x`` and ``l`` are
arrays of shape ``(..., n)`` that broadcast against each other; the result
has the broadcast leading shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .dsl import SymbolExpr


def japanese(l):
    """<l> = sqrt(1 + |l|^2)."""
    l = np.asarray(l, dtype=float)
    return np.sqrt(1.0 + np.sum(l * l, axis=-1))


def _as_points(x, l, dim):
    x = np.asarray(x, dtype=float)
    l = np.asarray(l, dtype=float)
    if x.shape[-1] != dim or l.shape[-1] != dim:
        raise ValueError(f"expected trailing dimension {dim}")
    return x, l


@dataclass
class LatticeSymbol:
    """Scalar function on T^n x Z^n.

    ``x_independent`` lets integrals over the torus skip quadrature;
    ``x_bandwidth`` (if set) promises that ``x -> func(x, l)`` is a
    trigonometric polynomial with modes ``|k_i| <= x_bandwidth``.
    """

    dim: int
    func: Callable
    x_independent: bool = False
    x_bandwidth: Optional[int] = None

    def __call__(self, x, l):
        x, l = _as_points(x, l, self.dim)
        out = np.asarray(self.func(x, l), dtype=complex)
        return np.broadcast_to(out, np.broadcast_shapes(x.shape[:-1], l.shape[:-1]))

    def x_mean(self, l, x_grid=16):
        """Integral over T^n of sigma(., l) by the periodic trapezoid rule."""
        l = np.asarray(l, dtype=float)
        if self.x_independent:
            return self(np.zeros(self.dim), l)
        if self.x_bandwidth is not None:
            # exact for trigonometric polynomials of this bandwidth
            x_grid = max(x_grid, 2 * self.x_bandwidth + 1)
        total = np.zeros(l.shape[:-1], dtype=complex)
        pts = torus_grid(self.dim, x_grid)
        for x in pts:
            total += self(x, l)
        return total / len(pts)

    @classmethod
    def from_expr(cls, re_expr: SymbolExpr, im_expr: Optional[SymbolExpr] = None):
        dim = re_expr.dim

        def func(x, l):
            out = re_expr(x, l).astype(complex)
            if im_expr is not None:
                out = out + 1j * im_expr(x, l)
            return out

        x_indep = not re_expr.depends_on_x and (im_expr is None or not im_expr.depends_on_x)
        return cls(dim, func, x_independent=x_indep)

    @classmethod
    def multiplier(cls, dim, f):
        """Fourier multiplier: sigma(x, l) = f(l)."""
        return cls(dim, lambda x, l: f(l), x_independent=True, x_bandwidth=0)


def torus_grid(dim, n):
    """Uniform periodic grid on [0,1)^dim as an (n**dim, dim) array."""
    axis = np.arange(n) / n
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def difference(sigma: LatticeSymbol, alpha: Sequence[int]) -> LatticeSymbol:
    """Iterated forward differences Delta^alpha in the lattice variable."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != sigma.dim or min(alpha) < 0:
        raise ValueError("alpha must be a non-negative multi-index of length dim")
    out = sigma
    for j, a in enumerate(alpha):
        e = np.zeros(sigma.dim)
        e[j] = 1.0
        for _ in range(a):
            out = _forward(out, e)
    return out


def _forward(sigma, e):
    f = sigma.func
    return LatticeSymbol(
        sigma.dim,
        lambda x, l: np.asarray(f(x, np.asarray(l) + e)) - np.asarray(f(x, l)),
        sigma.x_independent,
        sigma.x_bandwidth,
    )


def _central(f, j, h, order):
    """order-th central difference in x_j with step h (unscaled)."""
    coeffs = [(-1) ** k * comb(order, k) for k in range(order + 1)]
    shifts = [order / 2 - k for k in range(order + 1)]

    def g(x, l):
        x = np.asarray(x, dtype=float)
        total = 0
        for c, s in zip(coeffs, shifts):
            xs = np.array(x, copy=True)
            xs[..., j] = np.mod(xs[..., j] + s * h, 1.0)
            total = total + c * np.asarray(f(xs, l), dtype=complex)
        return total / h**order

    return g


def x_derivative(sigma: LatticeSymbol, beta: Sequence[int], h: float = 1e-5) -> LatticeSymbol:
    """Central finite-difference approximation of d_x^beta with one Richardson step.

    ``h`` is the step for first derivatives; a derivative of order k in a
    coordinate uses ``h**(2/(k+1))`` to balance truncation and round-off.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    beta = tuple(int(b) for b in beta)
    if sigma.x_independent and any(beta):
        return LatticeSymbol(sigma.dim, lambda x, l: np.zeros(np.broadcast_shapes(
            np.shape(x)[:-1], np.shape(l)[:-1])), True, 0)
    f = sigma.func
    for j, k in enumerate(beta):
        if k == 0:
            continue
        hk = h ** (2.0 / (k + 1))
        coarse = _central(f, j, hk, k)
        fine = _central(f, j, hk / 2, k)
        f = (lambda c, fi: lambda x, l: (4 * fi(x, l) - c(x, l)) / 3)(coarse, fine)
    return LatticeSymbol(sigma.dim, f, sigma.x_independent, sigma.x_bandwidth)


def lattice_ball(dim, radius):
    """All l in Z^dim with |l| <= radius, ordered shell by shell."""
    R = int(np.floor(radius))
    axis = np.arange(-R, R + 1)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    r2 = np.sum(pts * pts, axis=-1)
    keep = r2 <= radius * radius
    pts, r2 = pts[keep], r2[keep]
    order = np.lexsort(tuple(pts[:, k] for k in reversed(range(dim))) + (r2,))
    return pts[order]


def sphere_directions(dim, count):
    """Deterministic, roughly uniform unit vectors."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        th = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(th), np.sin(th)], axis=-1)
    # Fibonacci lattice on S^2; higher dimensions use normalised Halton points
    if dim == 3:
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        phi = np.pi * (1 + np.sqrt(5)) * k
        rho = np.sqrt(1 - z * z)
        return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)
    pts = qmc.Halton(dim, scramble=False).random(count + 1)[1:] * 2 - 1
    return pts / np.linalg.norm(pts, axis=-1, keepdims=True)


def _seminorm_points(dim, radius):
    full = lattice_ball(dim, min(radius, 64))
    shells = [full]
    R = 128
    while R <= radius:
        dirs = sphere_directions(dim, 64 if dim == 2 else 256)
        shells.append(np.unique(np.rint(R * dirs), axis=0))
        R *= 2
    if radius > 64 and (R // 2) < radius:
        dirs = sphere_directions(dim, 64 if dim == 2 else 256)
        shells.append(np.unique(np.rint(np.floor(radius) * dirs), axis=0))
    return np.concatenate(shells)


def seminorm_estimate(
    sigma: LatticeSymbol,
    m: float,
    alpha: Sequence[int],
    beta: Sequence[int] | None = None,
    radius: float = 64,
    samples: int = 8,
    h: float = 1e-5,
) -> float:
    """max |d_x^beta Delta^alpha sigma(x,l)| / <l>^(m-|alpha|) over sampled (x, l).

    Lattice points: the full ball |l| <= min(radius, 64), then dyadic
    shells.  x samples: the first ``samples`` points of an unscrambled
    Halton sequence (the origin first).
    """
    if radius < 1 or samples < 1:
        raise ValueError("radius >= 1 and samples >= 1 required")
    beta = tuple(beta) if beta is not None else (0,) * sigma.dim
    s = difference(sigma, alpha)
    if any(beta):
        s = x_derivative(s, beta, h)
    ls = _seminorm_points(sigma.dim, radius)
    weight = japanese(ls) ** (m - sum(alpha))
    xs = np.zeros((1, sigma.dim)) if sigma.x_independent else \
        qmc.Halton(sigma.dim, scramble=False).random(samples)
    best = 0.0
    for x in xs:
        vals = np.abs(s(x, ls)) / weight
        best = max(best, float(np.max(vals)))
    return best


def seminorm_is_stable(sigma, m, alpha, beta=None, radius=64, samples=8, rtol=0.1):
    """Compare estimates at ``radius`` and ``2*radius``; returns (ratio, stable)."""
    a = seminorm_estimate(sigma, m, alpha, beta, radius, samples)
    b = seminorm_estimate(sigma, m, alpha, beta, 2 * radius, samples)
    if a == 0.0:
        return (1.0 if b == 0.0 else np.inf), b == 0.0
    ratio = b / a
    return ratio, abs(ratio - 1) <= rtol


@dataclass
class HomogeneousTerm:
    """Term |l|^degree * profile(x, l/|l|), defined for l != 0."""

    degree: complex
    profile: Callable
    x_independent: bool = False

    def __call__(self, x, l):
        l = np.asarray(l, dtype=float)
        r = np.sqrt(np.sum(l * l, axis=-1))
        with np.errstate(invalid="ignore", divide="ignore"):
            omega = l / r[..., None]
        return np.power(r, complex(self.degree)) * np.asarray(self.profile(x, omega), dtype=complex)

    def lattice(self, dim):
        """The term as a lattice symbol, zero at l = 0."""

        def func(x, l):
            l = np.asarray(l, dtype=float)
            nz = np.any(l != 0, axis=-1)
            safe = np.where(nz[..., None], l, 1.0)
            return np.where(nz, self(x, safe), 0.0)

        return LatticeSymbol(dim, func, self.x_independent)


@dataclass
class ClassicalToroidalSymbol:
    """Poly-homogeneous symbol: sum of homogeneous terms plus a remainder.

    The remainder is evaluated only at l != 0; ``value_at_zero`` supplies
    sigma(x, 0) (defaults to the remainder's value there, else 0).
    """

    dim: int
    order: complex
    terms: list = field(default_factory=list)
    remainder: Optional[LatticeSymbol] = None
    value_at_zero: Optional[complex] = None

    def __post_init__(self):
        for k, t in enumerate(self.terms):
            if abs(complex(t.degree) - (complex(self.order) - k)) > 1e-12:
                raise ValueError(
                    f"term {k} has degree {t.degree}, expected {complex(self.order) - k}"
                )
        # a defaulted value at l = 0 follows the remainder in x
        self._zero_from_remainder = self.value_at_zero is None and self.remainder is not None
        if self.value_at_zero is None:
            if self.remainder is not None:
                self.value_at_zero = complex(
                    np.asarray(self.remainder(np.zeros(self.dim), np.zeros(self.dim)))
                )
            else:
                self.value_at_zero = 0j

    @property
    def x_independent(self):
        return all(t.x_independent for t in self.terms) and (
            self.remainder is None or self.remainder.x_independent
        )

    def term_of_degree(self, degree, tol=1e-12):
        for t in self.terms:
            if abs(complex(t.degree) - complex(degree)) <= tol:
                return t
        return None

    def __call__(self, x, l):
        x = np.asarray(x, dtype=float)
        l = np.asarray(l, dtype=float)
        shape = np.broadcast_shapes(x.shape[:-1], l.shape[:-1])
        nz = np.broadcast_to(np.any(l != 0, axis=-1), shape)
        safe = np.where(np.any(l != 0, axis=-1)[..., None], l, 1.0)
        total = np.zeros(shape, dtype=complex)
        for t in self.terms:
            total = total + t(x, safe)
        if self.remainder is not None:
            total = total + self.remainder(x, safe)
        if self._zero_from_remainder and not np.all(nz):
            zero = self.remainder(x, np.zeros_like(l))
            return np.where(nz, total, zero)
        return np.where(nz, total, complex(self.value_at_zero))

    def lattice(self) -> LatticeSymbol:
        return LatticeSymbol(self.dim, self.__call__, self.x_independent)


def classical_eval(sigma: ClassicalToroidalSymbol, x, l) -> complex:
    return complex(sigma(np.asarray(x, dtype=float), np.asarray(l, dtype=float)))


def as_lattice(sigma) -> LatticeSymbol:
    return sigma.lattice() if isinstance(sigma, ClassicalToroidalSymbol) else sigma


def _binom(a, k):
    out = 1.0 + 0j
    for i in range(k):
        out *= (a - i) / (i + 1)
    return out


def bracket_symbol(dim, m, terms=3) -> ClassicalToroidalSymbol:
    """<l>^m with its expansion <l>^m = sum_k binom(m/2, k) |l|^(m - 2k)."""
    m = complex(m)
    hom = []
    for k in range(terms):
        c = _binom(m / 2, k // 2) if k % 2 == 0 else 0.0
        hom.append(HomogeneousTerm(m - k, (lambda c: lambda x, w: np.full(w.shape[:-1], c))(c), True))

    def rem(x, l):
        l = np.asarray(l, dtype=float)
        r2 = np.sum(l * l, axis=-1)
        out = np.power(1.0 + r2, m / 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            for k, t in enumerate(hom):
                out = out - t(x, l)
        return out

    return ClassicalToroidalSymbol(dim, m, hom, LatticeSymbol(dim, rem, True), 1.0)


def homogeneous_symbol(dim, degree, profile=None, x_independent=True) -> ClassicalToroidalSymbol:
    """|l|^degree * profile(x, l/|l|) for l != 0, and 0 at l = 0."""
    if profile is None:
        profile = lambda x, w: np.ones(np.shape(w)[:-1])
    return ClassicalToroidalSymbol(dim, degree, [HomogeneousTerm(degree, profile, x_independent)])
