"""Coherence-based recovery conditions and probability-of-error bounds.

All logarithms here are natural.  The tail-bound constant tau grows with
sqrt(log N), so the natural log gives the larger tau and hence the more
conservative conditions; the empirical soundness tests only require the
resulting bound to hold.

The guarantees assume full-rank projections.  With M < N the columns of A
cannot all be linearly independent, so the hypothesis is read as
rank(A) = min(M, N); a rank-deficient matrix fails both conditions here
and is rejected by the correlator-count bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .design import MeasurementMatrix, coherence, max_column_energy
from .errors import HypothesisViolated
from .model import Scenario

__all__ = [
    "BoundReport",
    "CorrelatorBudget",
    "compute_tau",
    "pe_bound",
    "check_conditions",
    "min_correlators",
]


@dataclass(frozen=True)
class BoundReport:
    """Evaluation of both recovery conditions and the error-probability bound."""

    tau: float
    mu: float
    alpha: float
    rdd_condition_met: bool
    rddf_condition_met: bool
    pe_bound: float
    side_condition_ok: bool


@dataclass(frozen=True)
class CorrelatorBudget:
    """Smallest correlator count satisfying the partial-DFT lower bound."""

    detector: str
    threshold: float
    m_min: int
    failure_prob_bound: float


def _full_rank(mat: MeasurementMatrix) -> bool:
    return np.linalg.matrix_rank(mat.a) == min(mat.m, mat.n)


def compute_tau(scn: Scenario, alpha: float) -> float:
    """Noise-tail constant: sigma * sqrt(2(1+alpha) ln N) * sqrt(lam_max(G^-1))
    * sqrt(max_n a_n^H A A^H a_n)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return (
        scn.sigma
        * math.sqrt(2.0 * (1.0 + alpha) * math.log(scn.n))
        * math.sqrt(scn.gram.lam_max_inv)
        * math.sqrt(max_column_energy(scn.a))
    )


def pe_bound(n: int, alpha: float) -> float:
    """Block-error probability bound N^-alpha * (pi (1+alpha) ln N)^-1/2."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return n ** (-alpha) / math.sqrt(math.pi * (1.0 + alpha) * math.log(n))


def check_conditions(scn: Scenario, alpha: float) -> BoundReport:
    """Evaluate both coherence conditions and fill in the error bound.

    Top-K detection is guaranteed the bound when
    r_min - (2K-1) mu r_max >= 2 tau; decision feedback needs only the
    weaker r_min - (2K-1) mu r_min >= 2 tau.  Both inequalities are
    evaluated literally, with no special-casing for K = 1.
    """
    tau = compute_tau(scn, alpha)
    mu = coherence(scn.a)
    factor = (2 * scn.k - 1) * mu
    full_rank = _full_rank(scn.a)
    rdd_met = full_rank and scn.r_min - factor * scn.r_max >= 2.0 * tau
    rddf_met = full_rank and scn.r_min - factor * scn.r_min >= 2.0 * tau
    side_ok = (
        scn.n ** (-(1.0 + alpha)) / math.sqrt(math.pi * (1.0 + alpha) * math.log(scn.n))
        <= 1.0
    )
    return BoundReport(
        tau=tau,
        mu=mu,
        alpha=alpha,
        rdd_condition_met=bool(rdd_met),
        rddf_condition_met=bool(rddf_met),
        pe_bound=pe_bound(scn.n, alpha),
        side_condition_ok=bool(side_ok),
    )


def min_correlators(scn: Scenario, alpha: float, c: float, detector: str) -> CorrelatorBudget:
    """Correlator-count lower bound for a random partial DFT matrix.

    The bound is 4 [(2K-1) r / (r_min - 2 tau)]^2 (2 ln N + c) with r = r_max
    for the top-K detector and r = r_min for decision feedback; it grows like
    ln N.  Requires r_min > 2 tau, otherwise the bound is vacuous.
    """
    if detector not in ("rdd", "rddf"):
        raise ValueError(f"unknown detector {detector!r}, expected 'rdd' or 'rddf'")
    if c <= 0:
        raise ValueError("c must be positive")
    if not _full_rank(scn.a):
        raise HypothesisViolated("measurement matrix is rank deficient")
    tau = compute_tau(scn, alpha)
    if scn.r_min <= 2.0 * tau:
        raise HypothesisViolated(
            f"r_min={scn.r_min:.4g} must exceed 2*tau={2.0 * tau:.4g}"
        )
    numer = scn.r_max if detector == "rdd" else scn.r_min
    ratio = (2 * scn.k - 1) * numer / (scn.r_min - 2.0 * tau)
    threshold = 4.0 * ratio**2 * (2.0 * math.log(scn.n) + c)
    failure = 1.0 - (1.0 - pe_bound(scn.n, alpha)) * (1.0 - 2.0 * math.exp(-c))
    return CorrelatorBudget(
        detector=detector,
        threshold=threshold,
        m_min=math.ceil(threshold),
        failure_prob_bound=failure,
    )
