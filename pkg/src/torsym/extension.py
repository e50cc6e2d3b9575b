"""Smooth homogeneous extension of homogeneous lattice symbols to R^n \\ {0}.

A 0-homogeneous lattice symbol is constant along rays through lattice
points, so its continuous extension at a direction w is the limit of its
values near the far-out points q*s*w.  Those points are not lattice points
in general, and plain rounding leaves an O(1/q) error that jumps around
with the fractional parts of q*s*w, so extrapolation in 1/q cannot remove
it.  Instead the rounding step is corrected with lattice differences at
scale q (a tensor Lagrange stencil around q*s*w; degree 1 is exactly the
first-order correction by the difference quotients q * Delta_j sigma(q l)).
A degree-p stencil leaves an error of order (q s)^-(p+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DomainError, NotHomogeneousError
from .symbols import as_lattice

WITNESS_TOL = 1e-9


@dataclass
class ExtensionResult:
    value: complex
    error: float
    scales: np.ndarray      # q s for each level
    sequence: np.ndarray    # value estimate at each level

    def convergence_order(self, reference=None):
        """Log-log slope of the error envelope against the scale (positive = decaying).

        Errors are measured against ``reference`` if given, else against the
        finest level.
        """
        return _order(self.scales, self.sequence, reference)


@dataclass
class GradientResult:
    value: np.ndarray
    error: float
    scales: np.ndarray
    sequence: np.ndarray


def _order(scales, seq, reference=None):
    ref = seq[-1] if reference is None else reference
    stop = len(seq) - 2 if reference is None else len(seq)
    err = np.abs(seq[:stop] - ref)
    env = np.maximum.accumulate(err[::-1])[::-1]
    # ignore levels already at round-off
    floor = 1e-13 * max(1.0, float(np.max(np.abs(seq))))
    keep = env > floor
    if keep.sum() < 2:
        return np.inf
    slope = np.polyfit(np.log(scales[:stop][keep]), np.log(env[keep]), 1)[0]
    return -slope


def check_homogeneous(sigma, x, degree=0.0, radius=3, tol=WITNESS_TOL):
    """Witness sigma(x, r l) = r^degree sigma(x, l) for r = 2, 3 on a small box."""
    sigma = as_lattice(sigma)
    n = sigma.dim
    axis = np.arange(-radius, radius + 1)
    pts = np.array([p for p in product(axis, repeat=n) if any(p)], dtype=float)
    base = sigma(x, pts)
    for r in (2, 3):
        scaled = sigma(x, r * pts)
        expect = r ** complex(degree) * base
        bad = np.abs(scaled - expect) > tol * np.maximum(1.0, np.abs(expect))
        if np.any(bad):
            p = pts[np.argmax(bad)]
            raise NotHomogeneousError(
                f"sigma(x, {r}*{p.astype(int).tolist()}) != {r}^{degree} sigma(x, l)"
            )


def _direction(xi):
    xi = np.asarray(xi, dtype=float)
    norm = np.linalg.norm(xi)
    if norm == 0 or not np.isfinite(norm):
        raise DomainError("xi must be a non-zero finite vector")
    omega = xi / norm
    nz = np.abs(omega[omega != 0])
    s = max(1.0, 8.0 / nz.min())
    return xi, norm, omega, s


def _stencil(P, degree):
    """Lattice nodes and tensor Lagrange weights for interpolation at P."""
    n = len(P)
    if degree == 0:
        return np.rint(P)[None, :], np.ones(1)
    base = np.floor(P)
    frac = P - base
    offsets = np.arange(degree + 1) - (degree - 1) // 2
    # 1-D Lagrange basis at each fractional coordinate
    w1 = np.ones((n, degree + 1))
    for a, oa in enumerate(offsets):
        for b, ob in enumerate(offsets):
            if a != b:
                w1[:, a] *= (frac - ob) / (oa - ob)
    idx = np.array(list(product(range(degree + 1), repeat=n)))
    nodes = base + offsets[idx]
    weights = np.prod(w1[np.arange(n), idx], axis=-1)
    return nodes, weights


def _interpolate(field, x, P, degree):
    nodes, weights = _stencil(P, degree)
    vals = field(x, nodes)
    return np.tensordot(weights, vals, axes=(0, 0))


def _is_lattice(xi):
    return np.all(xi == np.rint(xi))


def extend_value(sigma, x, xi, depth: int = 12, check: bool = True,
                 degree: int = 3) -> ExtensionResult:
    """Value at xi of the 0-homogeneous extension of a lattice symbol.

    Levels q = 2, 4, ..., 2^depth evaluate the lattice symbol around q*s*w
    with a tensor Lagrange stencil of the given degree (0 is plain rounding,
    error O(1/q); degree p has error O(q^-(p+1))).
    """
    sigma = as_lattice(sigma)
    x = np.zeros(sigma.dim) if x is None else np.asarray(x, dtype=float)
    xi, norm, omega, s = _direction(xi)
    if check:
        check_homogeneous(sigma, x)
    if _is_lattice(xi):
        v = complex(sigma(x, xi))
        return ExtensionResult(v, 0.0, np.array([norm]), np.array([v]))
    scales, seq = [], []
    for k in range(1, depth + 1):
        P = (2**k) * s * omega
        scales.append(2**k * s)
        seq.append(complex(_interpolate(sigma, x, P, degree)))
    seq = np.array(seq)
    return ExtensionResult(seq[-1], float(abs(seq[-1] - seq[-2])), np.array(scales), seq)


def extend_gradient(sigma, x, xi, depth: int = 12, check: bool = True,
                    degree: int = 3) -> GradientResult:
    """Gradient in xi of the 0-homogeneous extension; (-1)-homogeneous.

    At scale |P| the central lattice difference (sigma(l+e_j) - sigma(l-e_j))/2
    approximates d_j sigma(P) = d_j sigma(w) / |P|; the field of central
    differences is interpolated at P and rescaled by |P|.
    """
    sigma = as_lattice(sigma)
    n = sigma.dim
    x = np.zeros(n) if x is None else np.asarray(x, dtype=float)
    xi, norm, omega, s = _direction(xi)
    if check:
        check_homogeneous(sigma, x)
    eye = np.eye(n)

    def central(xx, l):
        l = np.asarray(l, dtype=float)
        return np.stack(
            [(sigma(xx, l + eye[j]) - sigma(xx, l - eye[j])) / 2 for j in range(n)], axis=-1
        )

    scales, seq = [], []
    for k in range(1, depth + 1):
        P = (2**k) * s * omega
        g = _interpolate(central, x, P, degree)
        scales.append(2**k * s)
        seq.append(g * np.linalg.norm(P))
    seq = np.array(seq)
    grad = seq[-1] / norm
    return GradientResult(grad, float(np.max(np.abs(seq[-1] - seq[-2]))) / norm,
                          np.array(scales), seq / norm)


def extend_homogeneous_term(sigma, m, x, xi, depth: int = 12, check: bool = True,
                            degree: int = 3) -> complex:
    """Value at xi of the m-homogeneous extension of an m-homogeneous lattice symbol."""
    sigma = as_lattice(sigma)
    x = np.zeros(sigma.dim) if x is None else np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if np.linalg.norm(xi) == 0:
        raise DomainError("xi must be non-zero")
    if check:
        check_homogeneous(sigma, x, degree=m)
    if _is_lattice(xi):
        return complex(sigma(x, xi))
    m = complex(m)
    f = sigma.func

    def scaled(xx, l):
        l = np.asarray(l, dtype=float)
        r = np.sqrt(np.sum(l * l, axis=-1))
        return np.power(r, -m) * np.asarray(f(xx, l), dtype=complex)

    zero_hom = type(sigma)(sigma.dim, scaled, sigma.x_independent)
    res = extend_value(zero_hom, x, xi, depth, check=False, degree=degree)
    return complex(np.linalg.norm(xi) ** m * res.value)
