"""Lattice sums grouped by the squared norm |l|^2.

Every radial quantity used downstream (partial sums over balls, annulus
sums, sums weighted by eta(t |l|^2)) depends on l only through the
x-integral of sigma(x, l) aggregated over the shells |l|^2 = k.  A
:class:`ShellTable` stores those aggregates once.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import isqrt

import numpy as np

from .symbols import as_lattice


def workers():
    try:
        return max(1, int(os.environ.get("TORSYM_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ShellTable:
    """``values[k]`` is the sum of int_T sigma(x, l) dx over |l|^2 = k."""

    dim: int
    values: np.ndarray

    @property
    def r2max(self):
        return len(self.values) - 1

    def cumulative(self):
        if not hasattr(self, "_cum"):
            self._cum = np.cumsum(self.values)
        return self._cum

    def _check(self, k):
        if k > self.r2max:
            raise ValueError(f"table covers |l|^2 <= {self.r2max}, need {k}")

    def ball_sum(self, R, strict=True):
        """Sum over |l| < R (or |l| <= R when ``strict`` is False)."""
        R2 = R * R
        k = int(np.ceil(R2)) - 1 if strict else int(np.floor(R2))
        self._check(k)
        return self.cumulative()[k] if k >= 0 else 0j

    def annulus_sum(self, R):
        """Sum over R <= |l| <= 2R."""
        lo = int(np.ceil(R * R))
        hi = int(np.floor(4 * R * R))
        self._check(hi)
        cum = self.cumulative()
        return cum[hi] - (cum[lo - 1] if lo > 0 else 0)

    def weighted_sum(self, weights):
        """Sum of values[k] * weights(k) over the table."""
        k = np.arange(len(self.values), dtype=float)
        w = np.asarray(weights(k))
        nz = w != 0
        return complex(np.sum(self.values[nz] * w[nz]))


def _rows_block(dim, r2max, first):
    """Lattice points with the given first coordinates and |l|^2 <= r2max."""
    rest = dim - 1
    if rest == 0:
        pts = first[:, None].astype(float)
        return pts[pts[:, 0] ** 2 <= r2max]
    L = isqrt(r2max)
    axis = np.arange(-L, L + 1)
    mesh = np.meshgrid(first, *([axis] * rest), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    r2 = np.sum(pts * pts, axis=-1)
    return pts[r2 <= r2max].astype(float)


def shell_table(sigma, r2max: int, x_grid: int = 16, block: int = 64) -> ShellTable:
    """Aggregate int_T sigma(x, l) dx over every shell |l|^2 = k <= r2max.

    The lattice is swept in blocks of the first coordinate; blocks may be
    processed by ``TORSYM_THREADS`` workers, and partial histograms are
    reduced in block order so the result does not depend on the worker count.
    """
    sigma = as_lattice(sigma)
    dim = sigma.dim
    r2max = int(r2max)
    L = isqrt(r2max)
    firsts = np.arange(-L, L + 1)
    blocks = [firsts[i:i + block] for i in range(0, len(firsts), block)]
    if dim >= 3:
        blocks = [firsts[i:i + 1] for i in range(len(firsts))]

    def run(first):
        pts = _rows_block(dim, r2max, first)
        k = np.rint(np.sum(pts * pts, axis=-1)).astype(np.int64)
        vals = np.asarray(sigma.x_mean(pts, x_grid), dtype=complex)
        return np.bincount(k, weights=vals.real) + 1j * np.bincount(k, weights=vals.imag)

    total = np.zeros(r2max + 1, dtype=complex)
    n = workers()
    if n > 1:
        with ThreadPoolExecutor(n) as pool:
            for part in pool.map(run, blocks):
                total[: len(part)] += part
    else:
        for b in blocks:
            part = run(b)
            total[: len(part)] += part
    return ShellTable(dim, total)
