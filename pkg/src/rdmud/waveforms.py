"""Discrete-time signature waveforms and the analog-style correlator front-end.

Waveforms on a symbol interval are represented by L uniformly spaced samples,
and the analog inner product T^-1 * integral(x*y) becomes (1/L) * sum(x_i*y_i).
All energy and crosscorrelation conventions carry over exactly.

White-noise discretization: a correlator output <s_n, w> must have variance
sigma^2 when s_n has unit energy.  With i.i.d. per-sample noise of variance
v, Var(<s_n, w>) = (1/L^2) * v * sum(s_n^2) = v / L, so v = L * sigma^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .errors import DimensionMismatch, InvalidDimensions, NearSingularGram

__all__ = [
    "SignatureSet",
    "GramMatrix",
    "CorrelatorBank",
    "gram",
    "gram_identity",
    "gram_equicorrelated",
    "biorthogonal",
    "build_correlators",
    "frontend_correlate",
    "random_signatures",
    "draw_sample_noise",
]

ENERGY_TOL = 1e-9


def inner(x: np.ndarray, y: np.ndarray) -> float:
    """Sampled symbol-interval inner product (1/L) * sum(x_i * y_i)."""
    if x.shape[-1] != y.shape[-1]:
        raise DimensionMismatch(f"sample counts differ: {x.shape[-1]} vs {y.shape[-1]}")
    return float(np.dot(x, y) / x.shape[-1])


class SignatureSet:
    """N unit-energy signature waveforms, sampled as the rows of an N x L matrix."""

    def __init__(self, s: np.ndarray):
        s = np.asarray(s, dtype=float)
        if s.ndim != 2:
            raise InvalidDimensions("signature matrix must be 2-D (users x samples)")
        energies = np.sum(s * s, axis=1) / s.shape[1]
        if np.any(np.abs(energies - 1.0) > ENERGY_TOL):
            worst = int(np.argmax(np.abs(energies - 1.0)))
            raise InvalidDimensions(
                f"row {worst} has energy {energies[worst]:.12g}, expected 1"
            )
        self.s = s
        self.n = s.shape[0]
        self.l = s.shape[1]

    @classmethod
    def normalized(cls, raw: np.ndarray) -> "SignatureSet":
        """Rescale rows of ``raw`` to unit energy and wrap them."""
        raw = np.asarray(raw, dtype=float)
        norms = np.sqrt(np.sum(raw * raw, axis=1) / raw.shape[1])
        if np.any(norms == 0):
            raise InvalidDimensions("cannot normalize an all-zero signature row")
        return cls(raw / norms[:, None])


class GramMatrix:
    """Symmetric positive definite crosscorrelation matrix with cached factors.

    Caches the Cholesky factor C of G (G = C C^T), the triangular factor
    ``inv_factor`` with inv_factor @ inv_factor.T = G^-1 (used to draw
    correlated noise), the dense inverse, and the eigenvalue extremes.
    """

    def __init__(self, g: np.ndarray, cond_threshold: float = 1e12):
        g = np.asarray(g, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InvalidDimensions("Gram matrix must be square")
        if not np.allclose(g, g.T, atol=1e-12):
            raise InvalidDimensions("Gram matrix must be symmetric")
        if np.any(np.abs(np.diag(g) - 1.0) > ENERGY_TOL):
            raise InvalidDimensions("Gram diagonal must be 1 (unit-energy rows)")
        eigs = np.linalg.eigvalsh(g)
        self.lam_min = float(eigs[0])
        self.lam_max = float(eigs[-1])
        if self.lam_min <= 0:
            raise NearSingularGram(
                f"Gram matrix is not positive definite (lambda_min={self.lam_min:.3e})"
            )
        self.cond = self.lam_max / self.lam_min
        if self.cond > cond_threshold:
            raise NearSingularGram(
                f"Gram condition number {self.cond:.3e} exceeds {cond_threshold:.3e}"
            )
        self.g = g
        self.n = g.shape[0]
        self.chol = np.linalg.cholesky(g)
        # inv_factor @ inv_factor.T = (C C^T)^-1 with inv_factor = C^-T
        self.inv_factor = solve_triangular(self.chol, np.eye(self.n), lower=True).T
        self.inv = self.inv_factor @ self.inv_factor.T

    @property
    def lam_max_inv(self) -> float:
        """Largest eigenvalue of G^-1, computed as 1/lambda_min(G)."""
        return 1.0 / self.lam_min

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve G x = rhs using the cached Cholesky factor."""
        return cho_solve((self.chol, True), rhs)


@dataclass(frozen=True)
class CorrelatorBank:
    """Sampled correlating signals, stored as real and imaginary row banks."""

    re: np.ndarray
    im: np.ndarray

    @property
    def m(self) -> int:
        return self.re.shape[0]

    @property
    def l(self) -> int:
        return self.re.shape[1]


def gram(sigs: SignatureSet, cond_threshold: float = 1e12) -> GramMatrix:
    """Crosscorrelation matrix of a signature set, G[n,l] = <s_n, s_l>."""
    g = (sigs.s @ sigs.s.T) / sigs.l
    # exact-1 diagonal: constructor guarantees energies within tolerance
    np.fill_diagonal(g, 1.0)
    g = (g + g.T) / 2.0
    return GramMatrix(g, cond_threshold=cond_threshold)


def gram_identity(n: int) -> GramMatrix:
    return GramMatrix(np.eye(n))


def gram_equicorrelated(n: int, rho: float) -> GramMatrix:
    """Unit-diagonal matrix with constant off-diagonal crosscorrelation rho."""
    if not -1.0 / (n - 1) < rho < 1.0:
        raise InvalidDimensions(f"equicorrelated Gram with rho={rho} is not positive definite")
    g = np.full((n, n), float(rho))
    np.fill_diagonal(g, 1.0)
    return GramMatrix(g)


def biorthogonal(sigs: SignatureSet, g: GramMatrix) -> np.ndarray:
    """Rows dual to the signatures: shat = G^-1 S, so (1/L) S shat^T = I."""
    if g.n != sigs.n:
        raise DimensionMismatch(f"Gram is {g.n}x{g.n} but signature set has {sigs.n} rows")
    return g.solve(sigs.s)


def build_correlators(shat: np.ndarray, a: np.ndarray) -> CorrelatorBank:
    """Correlating signals h_m = sum_n a[m,n] * shat_n as real/imag banks."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[1] != shat.shape[0]:
        raise DimensionMismatch(
            f"coefficient matrix has {a.shape[-1] if a.ndim == 2 else '?'} columns, "
            f"need {shat.shape[0]}"
        )
    re = a.real @ shat
    im = a.imag @ shat if np.iscomplexobj(a) else np.zeros_like(re)
    return CorrelatorBank(re=re, im=im)


def frontend_correlate(bank: CorrelatorBank, received: np.ndarray) -> np.ndarray:
    """Correlate a received sample vector against every bank row.

    Returns the complex length-M vector with entries <h_m, received> under
    the (1/L)-normalized inner product.
    """
    received = np.asarray(received, dtype=float)
    if received.shape != (bank.l,):
        raise DimensionMismatch(f"received shape {received.shape}, bank expects ({bank.l},)")
    scale = 1.0 / bank.l
    return scale * (bank.re @ received) + 1j * scale * (bank.im @ received)


def random_signatures(
    n: int,
    l: int,
    rng: np.random.Generator,
    max_condition: float = 1e6,
    max_draws: int = 100,
) -> SignatureSet:
    """Random binary +-1 chip sequences, redrawn until the Gram is well conditioned.

    Chip rows have exactly unit energy.  Draws whose Gram condition number
    exceeds ``max_condition`` are rejected and redrawn.
    """
    if l < n:
        raise InvalidDimensions(f"need at least as many chips as users, got L={l} < N={n}")
    for _ in range(max_draws):
        s = rng.integers(0, 2, size=(n, l)) * 2.0 - 1.0
        g = (s @ s.T) / l
        eigs = np.linalg.eigvalsh((g + g.T) / 2.0)
        if eigs[0] > 0 and eigs[-1] / eigs[0] <= max_condition:
            return SignatureSet(s)
    raise NearSingularGram(
        f"no signature draw met condition <= {max_condition:.1e} in {max_draws} tries"
    )


def draw_sample_noise(l: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Sampled white noise with per-sample variance L * sigma^2.

    Under the (1/L) inner product this makes every unit-energy correlator
    output have variance sigma^2 (see module docstring).
    """
    if sigma < 0:
        raise InvalidDimensions("sigma must be nonnegative")
    return np.sqrt(l) * sigma * rng.standard_normal(l)
