"""Digital detectors operating on the projected front-end output.

All detection statistics take the real part of the column inner products:
with binary antipodal symbols and real gains the signal component of
a_n^H y is real, so the imaginary part is discarded rather than tested.
Every selection rule breaks ties deterministically toward the lowest index,
and the sign of an exactly-zero statistic resolves to +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, NotIdentityMatrix, SingularSystem
from .model import Scenario, TransmitState

__all__ = [
    "DetectionResult",
    "rdd_detect",
    "rddf_detect",
    "rd_mmse_detect",
    "ml_detect",
    "decorrelating_baseline",
    "block_error",
]


@dataclass(frozen=True)
class DetectionResult:
    """Detected support and symbol vector; trace records RDDF iterations."""

    support: tuple[int, ...]
    bhat: np.ndarray
    trace: tuple[tuple[int, float], ...] | None = None


def _check_y(scn: Scenario, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (scn.m,):
        raise DimensionMismatch(f"front-end output shape {y.shape}, expected ({scn.m},)")
    return y


def _real_corr(a: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Re[A^H y] without forming a complex temporary."""
    return a.real.T @ y.real + a.imag.T @ y.imag


def _sign(x: np.ndarray | float) -> np.ndarray | float:
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def rdd_detect(scn: Scenario, y: np.ndarray) -> DetectionResult:
    """Linear detector: top-K magnitudes of Re[a_n^H y], then sign decisions.

    The K statistics with the largest magnitude name the detected active
    users; each detected symbol is sgn(r_n * Re[a_n^H y]).
    """
    y = _check_y(scn, y)
    c = _real_corr(scn.a.a, y)
    order = np.argsort(-np.abs(c), kind="stable")
    support = np.sort(order[: scn.k])
    bhat = np.zeros(scn.n)
    bhat[support] = _sign(scn.gains[support] * c[support])
    return DetectionResult(support=tuple(int(i) for i in support), bhat=bhat)


def rddf_detect(scn: Scenario, y: np.ndarray) -> DetectionResult:
    """Decision-feedback greedy detector (OMP with binary symbol feedback).

    Each of the K iterations picks the not-yet-selected column most
    correlated with the residual, decides that user's symbol by sign, and
    rebuilds the residual v = y - A R b with the updated symbol vector.
    Already-selected indices are excluded from later selections.
    """
    y = _check_y(scn, y)
    a = scn.a.a
    bhat = np.zeros(scn.n)
    v = y
    trace: list[tuple[int, float]] = []
    selected: list[int] = []
    for _ in range(scn.k):
        c = _real_corr(a, v)
        score = np.abs(c)
        if selected:
            score[selected] = -np.inf
        n_k = int(np.argmax(score))
        selected.append(n_k)
        trace.append((n_k, float(c[n_k])))
        bhat[n_k] = _sign(scn.gains[n_k] * c[n_k])
        x = scn.gains * bhat
        v = y - (a.real @ x + 1j * (a.imag @ x))
    support = np.sort(selected)
    return DetectionResult(
        support=tuple(int(i) for i in support), bhat=bhat, trace=tuple(trace)
    )


def rd_mmse_detect(scn: Scenario, y: np.ndarray, support) -> DetectionResult:
    """Minimum mean-square-error symbol detection on a given support.

    Solves (A_S R_S^2 A_S^H + sigma^2 A G^-1 A^H) w = y and decides
    bhat_n = sgn(Re[r_n a_n^H w]) for n in the support.
    """
    y = _check_y(scn, y)
    support = tuple(int(i) for i in support)
    a_s = scn.a.a[:, support]
    r_s = scn.gains[list(support)]
    cov = (a_s * r_s**2) @ a_s.conj().T + scn.sigma**2 * (
        scn.a.a @ scn.gram.inv @ scn.a.a.conj().T
    )
    cond = np.linalg.cond(cov)
    if not cond < 1e12:
        raise SingularSystem(
            f"MMSE system matrix is numerically singular (cond ~ {cond:.2e}); "
            "sigma=0 with a rank-deficient support?"
        )
    w = np.linalg.solve(cov, y)
    stats = r_s * np.real(a_s.conj().T @ w)
    bhat = np.zeros(scn.n)
    bhat[list(support)] = _sign(stats)
    return DetectionResult(support=tuple(sorted(support)), bhat=bhat)


@lru_cache(maxsize=8)
def _support_table(n: int, k: int) -> np.ndarray:
    table = np.array(list(combinations(range(n), k)), dtype=int)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=8)
def _sign_table(k: int) -> np.ndarray:
    # binary counting, bit 0 -> -1: pattern 0 is the lexicographically
    # smallest sign vector, the first support index is the most significant bit
    patterns = np.arange(2**k)[:, None] >> np.arange(k - 1, -1, -1)[None, :]
    table = np.where(patterns & 1, 1.0, -1.0)
    table.setflags(write=False)
    return table


def ml_detect(scn: Scenario, y: np.ndarray, budget: int = 10**6) -> DetectionResult:
    """Exhaustive maximum-likelihood detection over all K-sparse sign vectors.

    Maximizes 2 Re[y^H W A R b] - b^T R A^H W A R b with the whitening
    W = (A G^-1 A^H)^-1, scanning supports in lexicographic order and sign
    patterns in binary-counting order; only a strictly larger objective
    replaces the incumbent, so ties keep the lexicographically smallest
    (support, b).
    """
    y = _check_y(scn, y)
    n_candidates = comb(scn.n, scn.k) * 2**scn.k
    if n_candidates > budget:
        raise BudgetExceeded(
            f"{n_candidates} candidates exceed the budget of {budget}"
        )
    a = scn.a.a
    noise_shape = a @ scn.gram.inv @ a.conj().T
    if np.linalg.cond(noise_shape) > 1e12:
        raise SingularSystem(
            "A G^-1 A^H is numerically singular; the whitened objective is undefined"
        )
    w_y = np.linalg.solve(noise_shape, y)
    lin = scn.gains * _real_corr(a, w_y)
    quad = np.real(a.conj().T @ np.linalg.solve(noise_shape, a))
    quad = quad * np.outer(scn.gains, scn.gains)

    supports = _support_table(scn.n, scn.k)
    signs = _sign_table(scn.k)
    lin_s = lin[supports]                                # (C, K)
    quad_s = quad[supports[:, :, None], supports[:, None, :]]  # (C, K, K)
    objective = 2.0 * (lin_s @ signs.T) - np.einsum(
        "pi,cij,pj->cp", signs, quad_s, signs
    )
    # flat row-major scan = (support-major, pattern-minor) enumeration order;
    # argmax returns the first maximum, i.e. the earliest candidate wins ties
    flat = int(np.argmax(objective))
    sup_idx, pat_idx = divmod(flat, signs.shape[0])
    support = supports[sup_idx]
    bhat = np.zeros(scn.n)
    bhat[support] = signs[pat_idx]
    return DetectionResult(support=tuple(int(i) for i in support), bhat=bhat)


def decorrelating_baseline(scn: Scenario, y: np.ndarray) -> DetectionResult:
    """Conventional full-bank baseline: the top-K detector with A = I."""
    if scn.a.kind != "identity":
        raise NotIdentityMatrix(
            f"baseline requires the identity measurement matrix, got {scn.a.kind!r}"
        )
    return rdd_detect(scn, y)


def block_error(truth: TransmitState, detected: DetectionResult) -> bool:
    """Whether the detected support or any detected symbol is wrong."""
    return detected.support != truth.support or not np.array_equal(
        detected.bhat, truth.b
    )
