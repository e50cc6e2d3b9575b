"""Global symbols on SU(2).

Spins are handled through the integer ``two_j = 2j``.  Representation
spaces use the weight basis mu = j, j-1, ..., -j (descending), with the
standard angular-momentum matrices.  The Laplacian acts on spin j by the
Casimir lambda_j = j(j+1), and <lambda> := 1 + lambda.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable

import numpy as np
from scipy.linalg import expm, null_space

from .errors import MissingSpinError, OrderError


def two_j_of(j) -> int:
    """Validate a half-integer spin and return 2j."""
    tj = Fraction(j) * 2
    if tj.denominator != 1 or tj < 0:
        raise ValueError(f"spin {j} is not a non-negative half-integer")
    return int(tj)


def casimir(two_j):
    j = two_j / 2
    return j * (j + 1)


def bracket(two_j):
    """<lambda_j> = 1 + j(j+1)."""
    return 1.0 + casimir(two_j)


@dataclass(frozen=True)
class SpinIrrep:
    two_j: int
    J3: np.ndarray = field(repr=False)
    Jp: np.ndarray = field(repr=False)
    Jm: np.ndarray = field(repr=False)

    @property
    def j(self):
        return self.two_j / 2

    @property
    def dim(self):
        return self.two_j + 1

    @property
    def casimir(self):
        return casimir(self.two_j)

    @property
    def weights(self):
        return self.j - np.arange(self.dim)

    @property
    def Jx(self):
        return (self.Jp + self.Jm) / 2

    @property
    def Jy(self):
        return (self.Jp - self.Jm) / 2j

    def element(self, alpha, beta, gamma):
        """Representation matrix of the group element with ZYZ Euler angles."""
        return expm(-1j * alpha * self.J3) @ expm(-1j * beta * self.Jy) @ expm(-1j * gamma * self.J3)


@lru_cache(maxsize=None)
def _irrep(two_j: int) -> SpinIrrep:
    j = two_j / 2
    mu = j - np.arange(two_j + 1)
    J3 = np.diag(mu).astype(complex)
    Jp = np.zeros((two_j + 1, two_j + 1), dtype=complex)
    # J+ |mu> = sqrt(j(j+1) - mu(mu+1)) |mu+1>; |mu+1> sits one index up
    for i in range(1, two_j + 1):
        Jp[i - 1, i] = np.sqrt(j * (j + 1) - mu[i] * (mu[i] + 1))
    for a in (J3, Jp):
        a.setflags(write=False)
    Jm = Jp.conj().T
    Jm.setflags(write=False)
    return SpinIrrep(two_j, J3, Jp, Jm)


def irrep(j) -> SpinIrrep:
    return _irrep(two_j_of(j))


@dataclass
class CgDecomposition:
    two_j1: int
    two_j2: int
    blocks: dict     # two_J -> isometry of shape (d1*d2, 2J+1), J descending

    def unitary(self):
        return np.hstack([self.blocks[k] for k in sorted(self.blocks, reverse=True)])

    @property
    def dims(self):
        return {k: v.shape[1] for k, v in self.blocks.items()}


def _total(a: SpinIrrep, b: SpinIrrep):
    Ia, Ib = np.eye(a.dim), np.eye(b.dim)
    return (np.kron(a.J3, Ib) + np.kron(Ia, b.J3),
            np.kron(a.Jp, Ib) + np.kron(Ia, b.Jp),
            np.kron(a.Jm, Ib) + np.kron(Ia, b.Jm))


def _clean(v, prev):
    # lowering accumulates round-off; project out the blocks already built
    if prev is not None:
        v = v - prev @ (prev.conj().T @ v)
    return v / np.linalg.norm(v)


@lru_cache(maxsize=None)
def _cg(two_j1: int, two_j2: int) -> CgDecomposition:
    a, b = _irrep(two_j1), _irrep(two_j2)
    _, Jp, Jm = _total(a, b)
    M = (a.weights[:, None] + b.weights[None, :]).ravel()
    blocks, prev = {}, None
    for two_J in range(two_j1 + two_j2, abs(two_j1 - two_j2) - 1, -2):
        J = two_J / 2
        idx = np.nonzero(np.abs(M - J) < 1e-9)[0]
        # weight-J vectors killed by the total raising operator
        ker = null_space(Jp[:, idx])
        if ker.shape[1] != 1:
            raise RuntimeError("highest-weight kernel is not one-dimensional")
        top = np.zeros(len(M), dtype=complex)
        top[idx] = ker[:, 0]
        # Condon-Shortley: coefficient with m1 = j1 (first factor index 0) positive
        ref = top[idx[np.argmin(idx)]]
        top *= np.conj(ref) / abs(ref)
        top = _clean(top, prev)
        cols = [top]
        v = top
        for k in range(two_J):
            mu = J - k
            v = _clean(Jm @ v / np.sqrt(J * (J + 1) - mu * (mu - 1)), prev)
            cols.append(v)
        W = np.array(cols).T
        prev = W if prev is None else np.hstack([prev, W])
        W.setflags(write=False)
        blocks[two_J] = W
    return CgDecomposition(two_j1, two_j2, blocks)


def clebsch_gordan(j1, j2) -> CgDecomposition:
    return _cg(two_j_of(j1), two_j_of(j2))


@lru_cache(maxsize=None)
def decompose_tensor(two_js: tuple) -> tuple:
    """Irreducible blocks of pi_{j_1} x ... x pi_{j_r}: tuple of (two_J, isometry)."""
    two_js = tuple(int(k) for k in two_js)
    if len(two_js) == 1:
        return ((two_js[0], np.eye(two_js[0] + 1, dtype=complex)),)
    head = decompose_tensor(two_js[:-1])
    last = two_js[-1]
    out = []
    for two_J, W in head:
        lift = np.kron(W, np.eye(last + 1))
        for two_K, C in _cg(two_J, last).blocks.items():
            out.append((two_K, lift @ C))
    out.sort(key=lambda p: -p[0])
    return tuple(out)


def reduce_tensor(sigma, two_js, x=None):
    """sigma on a tensor product of irreps, assembled block by block."""
    dim = int(np.prod([k + 1 for k in two_js]))
    out = np.zeros((dim, dim), dtype=complex)
    for two_J, W in decompose_tensor(tuple(two_js)):
        out += W @ sigma.at(two_J, x) @ W.conj().T
    return out


# ---------------------------------------------------------------- symbols


def haar_grid(size=8):
    """Euler-angle nodes and weights integrating class-free functions on SU(2).

    alpha, gamma in [0, 2pi) and [0, 4pi) by trapezoid, cos(beta) by
    Gauss-Legendre; weights sum to 1.
    """
    z, wz = np.polynomial.legendre.leggauss(size)
    al = 2 * np.pi * np.arange(2 * size) / (2 * size)
    ga = 4 * np.pi * np.arange(4 * size) / (4 * size)
    A, Z, G = np.meshgrid(al, z, ga, indexing="ij")
    W = np.broadcast_to(wz[None, :, None], A.shape)
    nodes = np.stack([A.ravel(), np.arccos(Z.ravel()), G.ravel()], axis=-1)
    w = W.ravel() / W.sum()
    return nodes, w


@dataclass
class Su2Symbol:
    """Field two_j -> (2j+1)x(2j+1) matrix in the weight basis.

    ``func(x, two_j)`` gives sigma(x, pi_j); ``x`` is a ZYZ Euler triple or
    None when the symbol does not depend on x.  ``trace_fn(two_j)`` is an
    optional fast path for tr int sigma(x, pi_j) dx.
    """

    func: Callable
    order: complex = 0.0
    x_dependent: bool = False
    max_two_j: int = None
    trace_fn: Callable = None
    grid_size: int = 8

    def _check(self, two_j):
        if two_j < 0 or (self.max_two_j is not None and two_j > self.max_two_j):
            raise MissingSpinError(f"symbol is not defined at spin {two_j / 2:g}")

    def at(self, two_j, x=None):
        self._check(two_j)
        m = np.asarray(self.func(x, two_j), dtype=complex)
        if m.shape != (two_j + 1, two_j + 1):
            raise ValueError(f"sigma(pi_{two_j / 2:g}) has shape {m.shape}")
        return m

    def mean(self, two_j):
        """int_G sigma(x, pi_j) dx (Haar probability measure)."""
        if not self.x_dependent:
            return self.at(two_j)
        nodes, w = haar_grid(self.grid_size)
        return sum(wi * self.at(two_j, g) for g, wi in zip(nodes, w))

    def trace(self, two_j):
        self._check(two_j)
        if self.trace_fn is not None:
            return complex(self.trace_fn(two_j))
        return complex(np.trace(self.mean(two_j)))

    def __call__(self, two_j, x=None):
        return self.at(two_j, x)

    @classmethod
    def scalar(cls, f, order=0.0, max_two_j=None):
        """sigma(pi_j) = f(lambda_j, j) I."""
        return cls(lambda x, k: f(casimir(k), k / 2) * np.eye(k + 1, dtype=complex), order,
                   False, max_two_j, lambda k: (k + 1) * f(casimir(k), k / 2))

    @classmethod
    def from_matrices(cls, mats: dict, order=0.0):
        mats = {int(k): np.asarray(v, dtype=complex) for k, v in mats.items()}
        top = max(mats)
        missing = sorted(set(range(top + 1)) - set(mats))
        if missing:
            raise MissingSpinError(f"matrices missing for 2j in {missing}")
        return cls(lambda x, k: mats[k], order, False, top)


def homogeneous_su2_symbol(a_plus, a_minus, zero_weight=0.0) -> Su2Symbol:
    """0-homogeneous symbol: weight mu entry is a_plus (mu > 0), a_minus (mu < 0)."""

    def diag(k):
        mu = k / 2 - np.arange(k + 1)
        return np.where(mu > 0, a_plus, np.where(mu < 0, a_minus, zero_weight)).astype(complex)

    return Su2Symbol(lambda x, k: np.diag(diag(k)), 0.0, False, None,
                     lambda k: complex(np.sum(diag(k))))


def _embed(op, order, dims):
    """Reorder a kron-product operator whose factors are listed in ``order``."""
    k = len(dims)
    t = op.reshape([dims[i] for i in order] * 2)
    inv = list(np.argsort(order))
    t = t.transpose(inv + [k + i for i in inv])
    n = int(np.prod(dims))
    return t.reshape(n, n)


def difference_power(sigma: Su2Symbol, two_j: int, a: int = 1, x=None) -> np.ndarray:
    """Delta^a sigma at spin j, Delta the spin-1/2 fundamental difference.

    Composing Delta sigma(rho) = sigma(pi0 x rho) - I x sigma(rho) a times gives
    sum over subsets S of the a fundamental factors of (-1)^(a-|S|) times
    sigma(pi0^{x S} x pi_j) acting on the factors in S and on H_j, identity
    elsewhere; an operator on H_{1/2}^{x a} x H_j.
    """
    if a == 0:
        return sigma.at(two_j, x)
    dims = [2] * a + [two_j + 1]
    total = 0
    for s in range(a + 1):
        inner = reduce_tensor(sigma, (1,) * s + (two_j,), x) if s else sigma.at(two_j, x)
        op = np.kron(np.eye(2 ** (a - s)), inner)
        for S in combinations(range(a), s):
            rest = [i for i in range(a) if i not in S]
            total = total + (-1) ** (a - s) * _embed(op, rest + list(S) + [a], dims)
    return total


def difference_fundamental(sigma: Su2Symbol, j, x=None) -> np.ndarray:
    """sigma(pi0 x pi_j) - I_2 x sigma(pi_j) on H_{1/2} x H_j."""
    return difference_power(sigma, two_j_of(j), 1, x)


@dataclass
class Su2Seminorms:
    order: float
    two_j_max: int
    ratios: dict        # word length -> max ratio
    per_spin: dict      # word length -> array over two_j


def seminorm_su2(sigma: Su2Symbol, m: float, lengths=(0, 1, 2, 3), J_max=16) -> Su2Seminorms:
    """max_j ||Delta^a sigma(pi_j)||_op / <lambda_j>^((m - a)/2) for each word length a."""
    top = two_j_of(J_max)
    ratios, per = {}, {}
    for a in lengths:
        vals = np.array([
            np.linalg.norm(difference_power(sigma, k, a), 2) / bracket(k) ** ((m - a) / 2)
            for k in range(top + 1)
        ])
        per[a] = vals
        ratios[a] = float(vals.max())
    return Su2Seminorms(m, top, ratios, per)


@dataclass
class PrincipalLimit:
    ks: np.ndarray
    sequence: np.ndarray
    limit: complex
    error: float


def principal_symbol_limit(sigma: Su2Symbol, k_max: int, x=None, levels: int = 3) -> PrincipalLimit:
    """s_k = (sigma(pi_{k/2}) v, v) for the highest weight vector v.

    The highest weight part of (spin 1/2)^{x k} is spin k/2 with v^{x k} its
    top vector, so s_k is the top-left entry of sigma(pi_{k/2}).  The limit
    is Richardson-extrapolated in 1/k on the dyadic subsequence.
    """
    if k_max < 1:
        raise ValueError("k_max >= 1")
    ks = np.arange(1, k_max + 1)
    seq = np.array([sigma.at(int(k), x)[0, 0] for k in ks])
    dy = [k for k in (2**i for i in range(0, 32)) if k <= k_max]
    use = dy[-(levels + 1):] if len(dy) > levels else dy
    T = [seq[k - 1] for k in use]
    # Neville table in h = 1/k with h halving
    table = [T]
    for lev in range(1, len(use)):
        prev = table[-1]
        table.append([(2**lev * prev[i + 1] - prev[i]) / (2**lev - 1) for i in range(len(prev) - 1)])
    limit = table[-1][0]
    err = abs(table[-1][0] - table[-2][-1]) if len(table) > 1 else float("inf")
    return PrincipalLimit(ks, seq, complex(limit), float(err))


@dataclass
class Su2Trace:
    value: complex
    tail: float
    partial: np.ndarray


def trace_su2(sigma: Su2Symbol, m: float, J_max) -> Su2Trace:
    """sum_{2j <= 2 J_max} (2j+1) tr int sigma(x, pi_j) dx, for order m < -3."""
    if np.real(m) >= -3:
        raise OrderError(f"order {m} >= -3: the spin sum is not absolutely convergent")
    top = two_j_of(J_max)
    terms = np.array([(k + 1) * sigma.trace(k) for k in range(top + 1)])
    partial = np.cumsum(terms)
    # summand ~ C k^(2+m); tail ~ C K^(3+m) / (-(m+3))
    decay = -(np.real(m) + 3)
    tail = abs(terms[-1]) * max(top, 1) / decay
    return Su2Trace(complex(partial[-1]), float(tail), partial)
