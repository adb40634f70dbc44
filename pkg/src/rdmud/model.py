"""Vector-domain front-end model: y = A (R b + z) with z ~ N(0, sigma^2 G^-1).

Noise is generated in the N-dimensional matched-filter domain and projected
by A, which reproduces the front-end output covariance sigma^2 A G^-1 A^H
without factoring an M x M complex matrix, and keeps the waveform-domain
oracle directly comparable (the same z can be replayed in sample space).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import MeasurementMatrix
from .errors import DimensionMismatch, InvalidDimensions
from .waveforms import GramMatrix

__all__ = [
    "Scenario",
    "TransmitState",
    "FrontEndOutput",
    "random_transmit_state",
    "draw_noise",
    "synthesize",
    "project_mixture",
]


@dataclass(frozen=True)
class Scenario:
    """One complete problem instance shared immutably by all workers."""

    n: int
    k: int
    gains: np.ndarray
    gram: GramMatrix
    a: MeasurementMatrix
    sigma: float

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=float)
        object.__setattr__(self, "gains", gains)
        if not 1 <= self.k <= self.n:
            raise InvalidDimensions(f"need 1 <= K <= N, got K={self.k}, N={self.n}")
        if gains.shape != (self.n,):
            raise DimensionMismatch(f"gains shape {gains.shape}, expected ({self.n},)")
        if np.any(gains == 0):
            raise InvalidDimensions("all channel gains must be nonzero")
        if self.sigma < 0:
            raise InvalidDimensions("sigma must be nonnegative")
        if self.gram.n != self.n:
            raise DimensionMismatch(f"Gram is {self.gram.n}x{self.gram.n}, N={self.n}")
        if self.a.n != self.n:
            raise DimensionMismatch(f"measurement matrix has {self.a.n} columns, N={self.n}")
        object.__setattr__(self, "r_min", float(np.min(np.abs(gains))))
        object.__setattr__(self, "r_max", float(np.max(np.abs(gains))))

    @property
    def m(self) -> int:
        return self.a.m


@dataclass(frozen=True)
class TransmitState:
    """Ground truth: active-user index set and the +-1/0 symbol vector."""

    support: tuple[int, ...]
    b: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "b", b)
        active = np.flatnonzero(b)
        if tuple(int(i) for i in active) != self.support:
            raise InvalidDimensions("symbol vector support does not match index set")
        if not np.all(np.abs(b[active]) == 1.0):
            raise InvalidDimensions("active symbols must be +1 or -1")


@dataclass(frozen=True)
class FrontEndOutput:
    """Front-end output y plus the matched-filter-domain noise that produced it."""

    y: np.ndarray
    z: np.ndarray | None = None


def random_transmit_state(n: int, k: int, rng: np.random.Generator) -> TransmitState:
    """Uniformly random size-K support with i.i.d. equiprobable +-1 symbols."""
    if not 0 <= k <= n:
        raise InvalidDimensions(f"need 0 <= K <= N, got K={k}, N={n}")
    support = np.sort(rng.choice(n, size=k, replace=False)) if k else np.empty(0, dtype=int)
    b = np.zeros(n)
    b[support] = rng.integers(0, 2, size=k) * 2.0 - 1.0
    return TransmitState(support=tuple(int(i) for i in support), b=b)


def draw_noise(gram: GramMatrix, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Matched-filter-domain noise with covariance sigma^2 G^-1."""
    if sigma < 0:
        raise InvalidDimensions("sigma must be nonnegative")
    if sigma == 0:
        return np.zeros(gram.n)
    return sigma * (gram.inv_factor @ rng.standard_normal(gram.n))


def synthesize(scn: Scenario, state: TransmitState, rng: np.random.Generator) -> FrontEndOutput:
    """Draw one noisy front-end output y = A (R b + z) and retain z."""
    if state.b.shape != (scn.n,):
        raise DimensionMismatch(f"symbol vector shape {state.b.shape}, expected ({scn.n},)")
    z = draw_noise(scn.gram, scn.sigma, rng)
    x = scn.gains * state.b + z
    a = scn.a.a
    y = a.real @ x + 1j * (a.imag @ x)
    return FrontEndOutput(y=y, z=z)


def project_mixture(a: MeasurementMatrix, x: np.ndarray) -> np.ndarray:
    """Apply the measurement matrix to a real matched-filter-domain vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (a.n,):
        raise DimensionMismatch(f"vector shape {x.shape}, expected ({a.n},)")
    return a.a.real @ x + 1j * (a.a.imag @ x)
