"""Toroidal quantization Op(sigma) acting on trigonometric polynomials."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AliasingError, OrderError
from .shells import shell_table
from .symbols import LatticeSymbol, as_lattice, torus_grid


@dataclass
class TrigPolynomial:
    """f(x) = sum_l coeffs[l] exp(2 pi i x.l), finitely many non-zero coefficients."""

    dim: int
    coeffs: dict = field(default_factory=dict)

    def modes(self):
        keys = sorted(self.coeffs)
        return np.array(keys, dtype=float).reshape(-1, self.dim), np.array(
            [self.coeffs[k] for k in keys], dtype=complex
        )

    def max_frequency(self):
        return max((max(abs(c) for c in k) for k in self.coeffs), default=0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        ls, cs = self.modes()
        if len(cs) == 0:
            return np.zeros(x.shape[:-1], dtype=complex)
        phase = np.exp(2j * np.pi * (x[..., None, :] * ls).sum(-1))
        return phase @ cs

    def sample(self, N):
        """Values on the uniform grid of N points per axis, shape (N,)*dim."""
        _check_grid(N, self.max_frequency())
        hat = np.zeros((N,) * self.dim, dtype=complex)
        for l, c in self.coeffs.items():
            hat[tuple(k % N for k in l)] += c
        return np.fft.ifftn(hat) * N**self.dim

    @classmethod
    def from_samples(cls, values, tol=0.0):
        """Forward transform of grid samples (frequencies folded to |l_i| <= N/2)."""
        values = np.asarray(values)
        N = values.shape[0]
        dim = values.ndim
        hat = np.fft.fftn(values) / N**dim
        freqs = np.fft.fftfreq(N, 1.0 / N).astype(int)
        coeffs = {}
        for idx in zip(*np.nonzero(np.abs(hat) > tol)):
            coeffs[tuple(int(freqs[i]) for i in idx)] = complex(hat[idx])
        return cls(dim, coeffs)

    def translate(self, x0):
        """tau_{x0} f(x) = f(x - x0)."""
        x0 = np.asarray(x0, dtype=float)
        return TrigPolynomial(
            self.dim,
            {l: c * np.exp(-2j * np.pi * np.dot(x0, l)) for l, c in self.coeffs.items()},
        )

    @classmethod
    def random(cls, dim, n_modes, max_freq, rng):
        coeffs = {}
        while len(coeffs) < n_modes:
            l = tuple(int(v) for v in rng.integers(-max_freq, max_freq + 1, size=dim))
            coeffs[l] = complex(rng.normal(), rng.normal()) / np.sqrt(2)
        return cls(dim, coeffs)


def _check_grid(N, max_freq):
    if N < 1 or N & (N - 1):
        raise AliasingError(f"grid size {N} is not a power of two")
    if N < 2 * max_freq + 1:
        raise AliasingError(f"grid size {N} aliases frequency {max_freq}")


def apply_direct(sigma, f: TrigPolynomial, x):
    """Literal sum  sum_l exp(2 pi i x.l) sigma(x, l) f^(l)  at the point(s) x."""
    sigma = as_lattice(sigma)
    x = np.asarray(x, dtype=float)
    ls, cs = f.modes()
    out = np.zeros(x.shape[:-1], dtype=complex)
    for l, c in zip(ls, cs):
        out = out + np.exp(2j * np.pi * (x @ l)) * sigma(x, l) * c
    return out


def apply(sigma, f: TrigPolynomial, N: int):
    """Op(sigma) f sampled on the uniform N-point-per-axis grid.

    Fourier multipliers and symbols with a declared x-bandwidth go through
    the FFT; anything else is summed mode by mode on the grid.
    """
    sigma = as_lattice(sigma)
    if sigma.dim != f.dim:
        raise ValueError("dimension mismatch")
    F = f.max_frequency()
    _check_grid(N, F)
    dim = f.dim
    shape = (N,) * dim
    ls, cs = f.modes()
    if sigma.x_bandwidth is not None:
        B = sigma.x_bandwidth
        _check_grid(N, F + B)
        xs = torus_grid(dim, N)
        hat = np.zeros(shape, dtype=complex)
        for l, c in zip(ls, cs):
            # x-Fourier coefficients of sigma(., l), shifted by l
            a = np.fft.fftn(sigma(xs, l).reshape(shape)) / N**dim
            hat += np.roll(a, shift=tuple(int(v) for v in l), axis=tuple(range(dim))) * c
        return np.fft.ifftn(hat) * N**dim
    xs = torus_grid(dim, N)
    out = np.zeros(len(xs), dtype=complex)
    for l, c in zip(ls, cs):
        out += np.exp(2j * np.pi * (xs @ l)) * sigma(xs, l) * c
    return out.reshape(shape)


@dataclass
class KernelSlice:
    x: np.ndarray
    grid: np.ndarray
    values: np.ndarray


def kernel_slice(sigma, x, R: float, grid: int = 64) -> KernelSlice:
    """kappa_x(y) ~ sum_{|l| <= R} sigma(x, l) exp(2 pi i y.l) on a y-grid."""
    if R < 1:
        raise ValueError("R >= 1 required")
    sigma = as_lattice(sigma)
    dim = sigma.dim
    x = np.asarray(x, dtype=float)
    M = grid
    while M < 2 * int(R) + 1:
        M *= 2
    Ri = int(np.floor(R))
    axis = np.arange(-Ri, Ri + 1)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    ls = np.stack([m.ravel() for m in mesh], axis=-1)
    ls = ls[np.sum(ls * ls, axis=-1) <= R * R]
    hat = np.zeros((M,) * dim, dtype=complex)
    vals = sigma(x, ls.astype(float))
    np.add.at(hat, tuple((ls % M).T), vals)
    full = np.fft.ifftn(hat) * M**dim
    step = M // grid
    sub = full[(slice(None, None, step),) * dim]
    return KernelSlice(x, torus_grid(dim, grid).reshape((grid,) * dim + (dim,)), sub)


@dataclass
class TraceEstimate:
    value: complex
    tail: float


def trace_direct(sigma, m: float, R: float, x_grid: int = 16) -> TraceEstimate:
    """sum_{|l| <= R} int_T sigma(x, l) dx for a symbol of declared order m < -n.

    The tail bound C R^(m+n) / (-m-n) takes C from the outermost unit shell;
    it is an estimate, not a certificate.
    """
    sigma = as_lattice(sigma)
    n = sigma.dim
    if np.real(m) >= -n:
        raise OrderError(f"order {m} >= -{n}: the lattice sum is not absolutely convergent")
    if R < 1:
        raise ValueError("R >= 1 required")
    table = shell_table(sigma, int(np.floor(R * R)), x_grid)
    value = table.ball_sum(R, strict=False)
    inner = max(R - 1.0, 0.0)
    shell = abs(value - table.ball_sum(inner, strict=False))
    decay = -(np.real(m) + n)
    # shell ~ C R^(m+n-1); tail ~ C R^(m+n) / (-m-n)
    tail = shell * R / decay
    return TraceEstimate(complex(value), float(tail))


def translate(sigma, x0) -> LatticeSymbol:
    """(x, l) -> sigma(x - x0, l)."""
    sigma = as_lattice(sigma)
    x0 = np.asarray(x0, dtype=float)
    f = sigma.func
    return LatticeSymbol(
        sigma.dim,
        lambda x, l: f(np.mod(np.asarray(x) - x0, 1.0), l),
        sigma.x_independent,
        sigma.x_bandwidth,
    )


def operator_matrix(sigma, K: int, N: int = None):
    """Matrix entries <Op(sigma) e_k, e_k'> for modes with max|k_i| <= K.

    Returns (modes, matrix) with ``matrix[i, j] = <Op e_{k_j}, e_{k_i}>``.
    The inner products are computed by the FFT on an N-grid, which is exact
    when sigma has a declared x-bandwidth B and N > 2(K + B).
    """
    sigma = as_lattice(sigma)
    dim = sigma.dim
    B = sigma.x_bandwidth if sigma.x_bandwidth is not None else 8
    if N is None:
        N = 1
        while N < 2 * (K + B) + 1:
            N *= 2
    axis = np.arange(-K, K + 1)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    modes = np.stack([m.ravel() for m in mesh], axis=-1)
    mat = np.zeros((len(modes), len(modes)), dtype=complex)
    for j, k in enumerate(modes):
        g = apply(sigma, TrigPolynomial(dim, {tuple(int(v) for v in k): 1.0}), N)
        hat = np.fft.fftn(g) / N**dim
        mat[:, j] = hat[tuple((modes % N).T)]
    return modes, mat
