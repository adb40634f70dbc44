"""Seeded Monte Carlo engine: per-point trial loops, sweeps, and CSV output.

Determinism contract: every trial derives its generator from
(master seed, detector, M, SNR, trial index) alone, and trials are grouped
into fixed-size chunks whose partial sums are combined in chunk order.
Results are therefore byte-identical for any worker count.
"""

from __future__ import annotations

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import SeedSequence, default_rng

from . import design, detectors, waveforms
from .config import ExperimentConfig
from .design import MeasurementMatrix
from .errors import ConfigError, RdmudError
from .model import Scenario, random_transmit_state, synthesize
from .waveforms import GramMatrix

__all__ = [
    "PeEstimate",
    "PointResult",
    "estimate_pe",
    "sigma_from_snr_db",
    "build_gram",
    "build_fixed_matrix",
    "run_point",
    "run_sweep",
    "CSV_HEADER",
]

CHUNK_TRIALS = 2048
_Z95 = 1.959963984540054  # two-sided 95% normal quantile

CSV_HEADER = "detector,N,K,M,L,snr_db,trials,errors,pe,ci_lo,ci_hi,mu_mean,seed"


@dataclass(frozen=True)
class PeEstimate:
    """Block-error count, rate, and Wilson 95% confidence interval."""

    errors: int
    trials: int
    pe: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class PointResult:
    detector: str
    n: int
    k: int
    m: int
    l: int
    snr_db: float
    estimate: PeEstimate
    mu_mean: float
    seed: int

    def csv_row(self) -> str:
        e = self.estimate
        return ",".join(
            [
                self.detector,
                str(self.n),
                str(self.k),
                str(self.m),
                str(self.l),
                repr(float(self.snr_db)),
                str(e.trials),
                str(e.errors),
                repr(e.pe),
                repr(e.ci_lo),
                repr(e.ci_hi),
                repr(self.mu_mean),
                str(self.seed),
            ]
        )


def estimate_pe(errors: int, trials: int) -> PeEstimate:
    """Point estimate with the Wilson score interval at 95% confidence."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if not 0 <= errors <= trials:
        raise ConfigError(f"errors={errors} out of range for trials={trials}")
    p = errors / trials
    z2 = _Z95**2
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = _Z95 * math.sqrt(p * (1.0 - p) / trials + z2 / (4 * trials**2)) / denom
    ci_lo = 0.0 if errors == 0 else max(0.0, center - half)
    ci_hi = 1.0 if errors == trials else min(1.0, center + half)
    return PeEstimate(errors=errors, trials=trials, pe=p, ci_lo=ci_lo, ci_hi=ci_hi)


def sigma_from_snr_db(snr_db: float, r_min: float = 1.0) -> float:
    """Noise level from SNR = r_min^2 / sigma^2 expressed in dB."""
    return r_min / 10.0 ** (snr_db / 20.0)


def build_gram(cfg: ExperimentConfig) -> GramMatrix:
    """Materialize the Gram matrix described by the config."""
    if cfg.gram == "identity":
        return waveforms.gram_identity(cfg.n)
    head, _, arg = cfg.gram.partition(":")
    if head == "equicorrelated":
        return waveforms.gram_equicorrelated(cfg.n, float(arg))
    sigs = waveforms.random_signatures(cfg.n, cfg.l, default_rng(int(arg)))
    return waveforms.gram(sigs)


_MATRIX_SALT = zlib.crc32(b"fixed-matrix")


def build_fixed_matrix(cfg: ExperimentConfig, m: int) -> MeasurementMatrix | None:
    """The per-point matrix for non-fresh modes; None when drawn per trial.

    A fixed partial DFT is derived from (seed, m) alone so that every
    detector and SNR shares the same matrix at a given M.
    """
    if cfg.matrix == "identity":
        return design.identity_matrix(cfg.n)
    if cfg.matrix.startswith("custom:"):
        mat = design.load_custom(cfg.matrix.partition(":")[2])
        if mat.n != cfg.n or mat.m != m:
            raise ConfigError(
                f"custom matrix is {mat.m}x{mat.n}, expected {m}x{cfg.n}"
            )
        return mat
    if cfg.fresh_a:
        return None
    rng = default_rng(SeedSequence([cfg.seed, _MATRIX_SALT, m]))
    return design.partial_dft(cfg.n, m, rng)


@dataclass(frozen=True)
class _PointTask:
    """Everything a worker needs to run a contiguous block of trials."""

    n: int
    k: int
    gains: tuple[float, ...]
    gram: GramMatrix
    sigma: float
    m: int
    detector: str
    fixed_matrix: MeasurementMatrix | None
    master_seed: int
    det_key: int
    snr_key: int
    mmse_support: str
    ml_budget: int


def _detect(task: _PointTask, scn: Scenario, y: np.ndarray) -> detectors.DetectionResult:
    name = task.detector
    if name == "rdd":
        return detectors.rdd_detect(scn, y)
    if name == "rddf":
        return detectors.rddf_detect(scn, y)
    if name == "rd-mmse":
        if task.mmse_support == "rddf":
            support = detectors.rddf_detect(scn, y).support
        else:
            support = detectors.rdd_detect(scn, y).support
        return detectors.rd_mmse_detect(scn, y, support)
    if name == "ml":
        return detectors.ml_detect(scn, y, budget=task.ml_budget)
    if name == "decorrelating":
        return detectors.decorrelating_baseline(scn, y)
    raise ConfigError(f"unknown detector {name!r}")


def _run_chunk(task: _PointTask, start: int, count: int) -> tuple[int, float]:
    """Run trials [start, start+count); returns (errors, sum of coherences)."""
    gains = np.asarray(task.gains)
    errors = 0
    fixed_mu = None if task.fixed_matrix is None else design.coherence(task.fixed_matrix)
    mus: list[float] = []
    for t in range(start, start + count):
        rng = default_rng(
            SeedSequence([task.master_seed, task.det_key, task.m, task.snr_key, t])
        )
        if task.fixed_matrix is None:
            mat = design.partial_dft(task.n, task.m, rng)
            mus.append(design.coherence(mat))
        else:
            mat = task.fixed_matrix
        scn = Scenario(
            n=task.n, k=task.k, gains=gains, gram=task.gram, a=mat, sigma=task.sigma
        )
        state = random_transmit_state(task.n, task.k, rng)
        out = synthesize(scn, state, rng)
        result = _detect(task, scn, out.y)
        if detectors.block_error(state, result):
            errors += 1
    mu_sum = fixed_mu * count if fixed_mu is not None else math.fsum(mus)
    return errors, mu_sum


def _point_task(cfg: ExperimentConfig, m: int, snr_db: float, detector: str) -> _PointTask:
    gains = cfg.gain_vector()
    if detector == "decorrelating":
        fixed = design.identity_matrix(cfg.n)
        m = cfg.n
    else:
        fixed = build_fixed_matrix(cfg, m)
    return _PointTask(
        n=cfg.n,
        k=cfg.k,
        gains=gains,
        gram=build_gram(cfg),
        sigma=sigma_from_snr_db(snr_db, min(abs(g) for g in gains)),
        m=m,
        detector=detector,
        fixed_matrix=fixed,
        master_seed=cfg.seed,
        det_key=zlib.crc32(detector.encode()),
        snr_key=zlib.crc32(repr(float(snr_db)).encode()),
        mmse_support=cfg.mmse_support,
        ml_budget=cfg.ml_budget,
    )


def run_point(
    cfg: ExperimentConfig,
    m: int,
    snr_db: float,
    detector: str,
    executor: ProcessPoolExecutor | None = None,
) -> PointResult:
    """Estimate the block-error rate of one (detector, M, SNR) grid point."""
    task = _point_task(cfg, m, snr_db, detector)
    chunks = [
        (start, min(CHUNK_TRIALS, cfg.trials - start))
        for start in range(0, cfg.trials, CHUNK_TRIALS)
    ]
    try:
        if executor is None:
            parts = [_run_chunk(task, start, count) for start, count in chunks]
        else:
            futures = [
                executor.submit(_run_chunk, task, start, count)
                for start, count in chunks
            ]
            parts = [f.result() for f in futures]
    except RdmudError as exc:
        raise type(exc)(
            f"point detector={detector} m={task.m} snr_db={snr_db}: {exc}"
        ) from exc
    errors = sum(p[0] for p in parts)
    mu_mean = math.fsum(p[1] for p in parts) / cfg.trials
    return PointResult(
        detector=detector,
        n=cfg.n,
        k=cfg.k,
        m=task.m,
        l=cfg.l,
        snr_db=snr_db,
        estimate=estimate_pe(errors, cfg.trials),
        mu_mean=mu_mean,
        seed=cfg.seed,
    )


def run_sweep(cfg: ExperimentConfig, output: str | None = None) -> list[PointResult]:
    """Run the full detectors x M x SNR grid, streaming rows to CSV.

    Rows appear in grid order (detector outermost, then M, then SNR);
    requested baseline rows follow at the end, one per SNR.  Rows already
    computed are flushed even if a later point aborts.
    """
    path = cfg.output if output is None else output
    points = [
        (detector, m, snr)
        for detector in cfg.detectors
        for m in cfg.m_values
        for snr in cfg.snr_db
    ]
    if cfg.include_baseline:
        points.extend(("decorrelating", cfg.n, snr) for snr in cfg.snr_db)
    results: list[PointResult] = []
    executor = None
    try:
        if cfg.workers > 1:
            executor = ProcessPoolExecutor(max_workers=cfg.workers)
        with open(path, "w", newline="") as fh:
            fh.write(CSV_HEADER + "\n")
            fh.flush()
            for detector, m, snr in points:
                result = run_point(cfg, m, snr, detector, executor=executor)
                results.append(result)
                fh.write(result.csv_row() + "\n")
                fh.flush()
    finally:
        if executor is not None:
            executor.shutdown()
    return results
