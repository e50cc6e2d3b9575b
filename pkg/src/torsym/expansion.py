"""Smoothed spectral traces tr(A eta(tL)) and their small-t expansions.

On the torus L is the Laplacian (eigenvalue |l|^2 on e_l); on SU(2) it is
the Casimir (eigenvalue j(j+1) on spin j).  Cutoffs are compactly
supported, so every weighted trace is a finite sum.  The expansion

    tr(A eta(tL)) ~ sum_j c_{m+n-j} t^(-(m+n-j)/m0)  (+ c' for plateau eta)

is fitted with the exponents fixed by the order, and the coefficients
factor as c_{m+n-j} = c^(sigma)_{m+n-j} * c^(eta)_{m+n-j}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import (DomainError, InconsistencyError, TruncationError,
                     UsageError)
from .shells import ShellTable, shell_table
from .traces import _lstsq, in_Zn

PER_DECADE = 24


def _smooth_step(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return a / (a + b)


@dataclass
class CutoffFunction:
    """Smooth compactly supported eta with support in [lo, hi].

    ``kind`` is "bump" (support inside (0, inf)) or "plateau" (eta = 1 on
    (-inf, width]).
    """

    kind: str
    func: Callable
    lo: float
    hi: float
    width: float = 0.0
    label: str = ""
    scale: float = 1.0

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape)
        inside = (u > self.lo) & (u < self.hi) if self.kind == "bump" else (u < self.hi)
        out[inside] = self.func(u[inside])
        return self.scale * out

    def scaled(self, factor):
        return CutoffFunction(self.kind, self.func, self.lo, self.hi, self.width,
                              self.label, self.scale * factor)

    @classmethod
    def bump(cls, a=1.0, b=4.0):
        if not 0 < a < b:
            raise ValueError("bump support must satisfy 0 < a < b")
        peak = np.exp(-4.0 / (b - a) ** 2)
        return cls("bump", lambda u: np.exp(-1.0 / ((u - a) * (b - u))) / peak, a, b,
                   label=f"bump({a:g},{b:g})")

    @classmethod
    def plateau(cls, width=1.0, support=2.0):
        if not 0 < width < support:
            raise ValueError("plateau needs 0 < width < support")
        return cls("plateau", lambda u: 1.0 - _smooth_step((u - width) / (support - width)),
                   -np.inf, support, width, label=f"plateau({width:g},{support:g})")

    @classmethod
    def smooth_indicator(cls, a=1.0, b=4.0, eps=1e-3):
        """Bump that is 1 on [a, b] and falls off within eps on each side."""
        if not 0 < a - eps:
            raise ValueError("support must stay inside (0, inf)")

        def f(u):
            return _smooth_step((u - (a - eps)) / eps) * (1.0 - _smooth_step((u - b) / eps))

        return cls("bump", f, a - eps, b + eps, label=f"indicator({a:g},{b:g},{eps:g})")

    @property
    def breakpoints(self):
        if self.kind == "plateau":
            return [self.width, self.hi]
        return [self.lo, self.hi]


def eta_moment(eta: CutoffFunction, s) -> complex:
    """c^(eta)_s = 1/2 int_0^inf eta(u) u^(s/2 - 1) du."""
    s = complex(s)
    p = s / 2 - 1

    def part(lo, hi, take):
        if hi <= lo:
            return 0.0
        fn = (lambda u: float(eta(np.array([u]))[0]) * (u**p).real) if take == "re" else \
             (lambda u: float(eta(np.array([u]))[0]) * (u**p).imag)
        val, _ = quad(fn, lo, hi, limit=200, epsabs=1e-14, epsrel=1e-12)
        return val

    if eta.kind == "plateau":
        if s.real <= 0:
            raise DomainError(f"plateau moment diverges at 0 for Re s = {s.real:g} <= 0")
        w = eta.width
        head = eta.scale * w ** (s / 2) / (s / 2)
        tail = part(w, eta.hi, "re") + 1j * part(w, eta.hi, "im")
        return complex(0.5 * (head + tail))
    return complex(0.5 * (part(eta.lo, eta.hi, "re") + 1j * part(eta.lo, eta.hi, "im")))


def t_grid(tmin=1e-5, tmax=1e-1, per_decade=PER_DECADE):
    count = int(round(np.log10(tmax / tmin) * per_decade)) + 1
    return np.geomspace(tmin, tmax, count)


def _support_r2(eta, t):
    return int(np.floor(eta.hi / t))


def weighted_trace_torus(sigma, eta: CutoffFunction, t: float, R_support: float = None,
                         x_grid: int = 16, table: ShellTable = None) -> complex:
    """sum_l int_T sigma(x, l) dx * eta(t |l|^2), an exact finite sum."""
    if t <= 0:
        raise ValueError("t must be positive")
    need = _support_r2(eta, t)
    if R_support is not None and R_support**2 < need:
        raise TruncationError(
            f"R_support = {R_support:g} misses shells up to |l|^2 = {need} (sup supp eta / t)"
        )
    if table is None:
        table = shell_table(sigma, need, x_grid)
    elif table.r2max < need:
        raise TruncationError(f"shell table covers |l|^2 <= {table.r2max}, need {need}")
    return table.weighted_sum(lambda k: eta(t * k))


def weighted_trace_series(sigma, eta: CutoffFunction, ts, x_grid: int = 16,
                          table: ShellTable = None) -> np.ndarray:
    """weighted_trace_torus on a whole t-grid from one shell table."""
    ts = np.asarray(ts, dtype=float)
    need = _support_r2(eta, ts.min())
    if table is None:
        table = shell_table(sigma, need, x_grid)
    return np.array([weighted_trace_torus(sigma, eta, t, table=table) for t in ts])


@dataclass
class ExpansionFit:
    order: complex
    dim: int
    m0: float
    mode: str
    exponents: list             # t-exponents -(m+n-j)/m0
    coefficients: list
    constant: complex = None    # plateau c'
    log_coefficient: complex = None
    t: np.ndarray = field(default=None, repr=False)
    values: np.ndarray = field(default=None, repr=False)
    residual: float = 0.0       # max |misfit| / max |value|

    def coefficient(self, exponent, tol=1e-12):
        for e, c in zip(self.exponents, self.coefficients):
            if abs(e - exponent) < tol:
                return c
        raise KeyError(exponent)

    @property
    def leading(self):
        return self.coefficients[0]

    def predict(self, t):
        t = np.asarray(t, dtype=float)
        out = sum(c * t ** e for e, c in zip(self.exponents, self.coefficients))
        if self.constant is not None:
            out = out + self.constant
        if self.log_coefficient is not None:
            out = out + self.log_coefficient * np.log(t)
        return out


def exponent_ladder(m, n, m0=2, terms=4):
    m = complex(m)
    return [-(m + n - j) / m0 for j in range(terms)]


def fit_expansion(t, values, m, n, m0=2, mode="bump", terms=4, log_term=None) -> ExpansionFit:
    """Least-squares fit of the small-t expansion with exponents fixed by the order.

    In plateau mode a constant c' is added; a ladder exponent equal to zero
    (m in Z) is then replaced by a log t column, since the constant already
    occupies t^0.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=complex)
    if mode not in ("bump", "plateau"):
        raise UsageError(f"unknown mode {mode!r}")
    exps = exponent_ladder(m, n, m0, terms)
    cols, kept = [], []
    has_zero = False
    for e in exps:
        if mode == "plateau" and abs(e) < 1e-12:
            has_zero = True
            continue
        kept.append(e)
        cols.append(t ** e)
    use_log = has_zero if log_term is None else bool(log_term)
    if mode == "plateau":
        cols.insert(0, np.ones_like(t))
    if use_log:
        cols.append(np.log(t))
    if len(t) < 2 * len(cols):
        raise UsageError(f"{len(t)} samples for {len(cols)} terms; need at least twice as many")
    design = np.column_stack(cols).astype(complex)
    coef, resid = _lstsq(design, values)
    coef = [complex(c) for c in coef]
    constant = coef.pop(0) if mode == "plateau" else None
    log_c = coef.pop() if use_log else None
    misfit = float(np.max(np.abs(resid)) / max(np.max(np.abs(values)), 1e-300))
    return ExpansionFit(complex(m), n, m0, mode, kept, coef, constant, log_c, t, values, misfit)


def extract_residue(fits, moments, rtol=0.05) -> complex:
    """res = c_0 / c^(eta)_0 from bump fits; the two cutoffs must agree within rtol."""
    fits = list(fits)
    moments = list(moments)
    if len(fits) != len(moments) or not fits:
        raise UsageError("need one eta moment per fit")
    m, n = fits[0].order, fits[0].dim
    if not in_Zn(m, n):
        return 0j
    vals = []
    for fit, mom in zip(fits, moments):
        if fit.mode != "bump":
            raise UsageError("residue extraction uses bump cutoffs")
        vals.append(fit.coefficient(0.0) / complex(mom))
    vals = np.array(vals)
    spread = np.max(np.abs(vals - vals[0]))
    if spread > rtol * np.max(np.abs(vals)):
        raise InconsistencyError(
            f"eta-normalised t^0 coefficients disagree: {', '.join(f'{v:.6g}' for v in vals)}"
        )
    return complex(np.mean(vals))


def extract_canonical_trace(fit: ExpansionFit) -> complex:
    if fit.constant is None:
        raise UsageError("the fit has no constant term; use a plateau cutoff")
    return fit.constant


def weighted_trace_su2(sigma, eta: CutoffFunction, t: float, J: float = None) -> complex:
    """sum over spins of (2j+1) eta(t j(j+1)) tr int sigma(x, pi_j) dx."""
    if t <= 0:
        raise ValueError("t must be positive")
    # largest 2j with t * j(j+1) <= sup supp eta
    lam_max = eta.hi / t
    two_j_max = int(np.floor(np.sqrt(1 + 4 * lam_max) - 1))
    if J is not None:
        two_J = int(round(2 * J))
        if two_J < two_j_max:
            raise TruncationError(
                f"spin cutoff J = {J:g} misses spins up to {two_j_max / 2:g} (sup supp eta / t)"
            )
    ks = np.arange(two_j_max + 1)
    lam = ks / 2 * (ks / 2 + 1)
    w = eta(t * lam)
    total = 0j
    for k in ks[w != 0]:
        total += (k + 1) * w[k] * sigma.trace(int(k))
    return complex(total)


def weighted_trace_su2_series(sigma, eta, ts) -> np.ndarray:
    return np.array([weighted_trace_su2(sigma, eta, t) for t in np.asarray(ts, dtype=float)])
