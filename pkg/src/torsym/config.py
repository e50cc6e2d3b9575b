"""Dataclass configurations for the reproducible experiments in ``scripts/``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .expansion import PER_DECADE, t_grid
from .traces import default_radii


@dataclass(frozen=True)
class TGrid:
    tmin: float = 1e-5
    tmax: float = 1e-2
    per_decade: int = PER_DECADE

    def values(self) -> np.ndarray:
        return t_grid(self.tmin, self.tmax, self.per_decade)


@dataclass(frozen=True)
class RadiusGrid:
    r_min: float = 32.5
    r_max: float = 2048.5
    count: int = 40

    def values(self) -> np.ndarray:
        return default_radii(self.r_min, self.r_max, self.count)


@dataclass(frozen=True)
class AnnulusConfig:
    r_max: float = 1024.0
    x_grid: int = 16


@dataclass(frozen=True)
class FactorizationConfig:
    """Leading coefficient of tr(A eta(tL)) for two bumps, sigma = <l>^order."""

    order: float = -2.5
    bumps: tuple = ((1.0, 4.0), (0.5, 2.0))
    t: TGrid = field(default_factory=TGrid)
    terms: int = 4


@dataclass(frozen=True)
class CanonicalTraceConfig:
    order: float = -2.5
    radii: RadiusGrid = field(default_factory=RadiusGrid)
    plateau: tuple = (1.0, 2.0)       # (width, support)
    t: TGrid = field(default_factory=TGrid)
    terms: int = 3


@dataclass(frozen=True)
class ResidueExpansionConfig:
    bumps: tuple = ((1.0, 4.0), (0.5, 2.0))
    t: TGrid = field(default_factory=TGrid)
    terms: int = 4


@dataclass(frozen=True)
class Su2ScalingConfig:
    """sigma(pi_j) = lambda_j^(m/2) I with a bump cutoff."""

    m: float = -1.0
    bump: tuple = (1.0, 4.0)
    tmin: float = 1e-5
    tmax: float = 1e-3
    count: int = 17

    def ts(self) -> np.ndarray:
        return np.geomspace(self.tmin, self.tmax, self.count)


@dataclass(frozen=True)
class PrincipalConfig:
    k_max: int = 256
    k_fit: tuple = (16, 256)


@dataclass(frozen=True)
class ExponentCheckConfig:
    """Growth of S(R) = sum_{0<|l|<R} |l|^m in dimension 2."""

    m: float = -1.0
    r_min: float = 32.0
    r_max: float = 1023.0
    count: int = 24
