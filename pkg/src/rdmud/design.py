"""Measurement (coefficient) matrices and their coherence diagnostics.

The front-end projects the N matched-filter outputs onto M correlators via a
complex M x N matrix with unit-norm columns.  Partial DFT matrices, built by
sampling M distinct rows of the N-point DFT, are the default construction.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, InvalidDimensions

__all__ = [
    "MeasurementMatrix",
    "partial_dft",
    "identity_matrix",
    "from_array",
    "load_custom",
    "coherence",
    "max_column_energy",
    "welch_bound",
]

COLUMN_NORM_TOL = 1e-9


@dataclass(frozen=True)
class MeasurementMatrix:
    """Complex M x N coefficient matrix with unit-norm columns.

    ``rows`` records the selected DFT row indices when ``kind`` is
    "partial-dft"; it is None otherwise.
    """

    a: np.ndarray
    kind: str = "custom"
    rows: tuple[int, ...] | None = None

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        if a.ndim != 2:
            raise InvalidDimensions("measurement matrix must be 2-D")
        norms = np.sum(np.abs(a) ** 2, axis=0)
        if np.any(np.abs(norms - 1.0) > COLUMN_NORM_TOL):
            worst = int(np.argmax(np.abs(norms - 1.0)))
            raise InvalidDimensions(
                f"column {worst} has squared norm {norms[worst]:.12g}, expected 1"
            )
        object.__setattr__(self, "a", a)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]


@lru_cache(maxsize=4)
def _dft_matrix(n: int) -> np.ndarray:
    grid = np.outer(np.arange(n), np.arange(n))
    f = np.exp(2j * np.pi * grid / n)
    f.setflags(write=False)
    return f


def partial_dft(n: int, m: int, rng: np.random.Generator) -> MeasurementMatrix:
    """M distinct rows of the N-point DFT matrix, columns scaled to unit norm.

    Row indices are drawn uniformly without replacement, so A A^H = (N/M) I
    and every column has exactly unit norm.
    """
    if not 1 <= m <= n:
        raise InvalidDimensions(f"need 1 <= M <= N, got M={m}, N={n}")
    rows = rng.choice(n, size=m, replace=False)
    a = _dft_matrix(n)[rows] / np.sqrt(m)
    return MeasurementMatrix(a=a, kind="partial-dft", rows=tuple(int(r) for r in rows))


def identity_matrix(n: int) -> MeasurementMatrix:
    """The M=N identity embedding used by the conventional-receiver baseline."""
    return MeasurementMatrix(a=np.eye(n, dtype=complex), kind="identity")


def from_array(a: np.ndarray, kind: str = "custom") -> MeasurementMatrix:
    """Wrap an arbitrary matrix, rescaling columns to unit norm if needed."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise InvalidDimensions("measurement matrix must be 2-D")
    norms = np.sqrt(np.sum(np.abs(a) ** 2, axis=0))
    if np.any(norms == 0):
        raise InvalidDimensions("measurement matrix has an all-zero column")
    if np.any(np.abs(norms - 1.0) > 1e-6):
        warnings.warn(
            f"rescaling custom matrix columns (worst norm {norms.max():.6g})",
            stacklevel=2,
        )
    return MeasurementMatrix(a=a / norms, kind=kind)


def load_custom(path: str) -> MeasurementMatrix:
    """Read a custom matrix from CSV: 2M rows (real block, then imaginary block).

    Both blocks are M x N; the second block may be omitted for a real matrix
    with an even row count declared by context.  See README for the format.
    """
    with open(path, newline="") as fh:
        rows = [[float(v) for v in line] for line in csv.reader(fh) if line]
    if not rows:
        raise InvalidDimensions(f"{path}: empty matrix file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DimensionMismatch(f"{path}: ragged CSV rows")
    block = np.asarray(rows, dtype=float)
    if block.shape[0] % 2 != 0:
        raise DimensionMismatch(
            f"{path}: expected an even row count (real block then imaginary block), "
            f"got {block.shape[0]}"
        )
    m = block.shape[0] // 2
    return from_array(block[:m] + 1j * block[m:])


def coherence(mat: MeasurementMatrix) -> float:
    """Largest magnitude inner product between distinct columns.

    Exact maximization over all column pairs.  Partial DFT matrices use the
    fact that a_n^H a_l depends only on (n - l) mod N, so the full pair set
    is covered by one length-N FFT of the selected-row indicator.
    """
    if mat.kind == "partial-dft" and mat.rows is not None:
        indicator = np.zeros(mat.n)
        indicator[list(mat.rows)] = 1.0
        return float(np.max(np.abs(np.fft.fft(indicator)[1:])) / mat.m)
    g = mat.a.conj().T @ mat.a
    np.fill_diagonal(g, 0.0)
    return float(np.max(np.abs(g)))


def max_column_energy(mat: MeasurementMatrix) -> float:
    """max_n a_n^H (A A^H) a_n, i.e. the largest squared norm of A^H a_n."""
    g = mat.a.conj().T @ mat.a
    return float(np.max(np.sum(np.abs(g) ** 2, axis=0)))


def welch_bound(n: int, m: int) -> float:
    """Lower bound on the coherence of any M x N matrix with unit-norm columns."""
    if m >= n:
        return 0.0
    return float(np.sqrt((n - m) / (m * (n - 1))))
