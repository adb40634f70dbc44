"""Experiment configuration: a small key-value file format and its validation.

The format is flat ``key = value`` lines; ``#`` starts a comment, blank lines
are ignored, and list values are comma separated.  A ``schema`` field
versions the layout.  See the README for the full key reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError

__all__ = ["ExperimentConfig", "parse_config", "load_config", "DETECTOR_NAMES"]

SCHEMA_VERSION = 1

DETECTOR_NAMES = ("rdd", "rddf", "rd-mmse", "ml", "decorrelating")

_KNOWN_KEYS = {
    "schema", "n", "k", "l", "gram", "matrix", "gains", "detectors",
    "m_values", "snr_db", "trials", "seed", "fresh_a", "workers",
    "mmse_support", "ml_budget", "alpha", "c", "include_baseline", "output",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated sweep description consumed by the Monte Carlo harness."""

    n: int
    k: int
    m_values: tuple[int, ...]
    snr_db: tuple[float, ...]
    detectors: tuple[str, ...]
    trials: int
    seed: int
    l: int = 128
    gram: str = "identity"
    matrix: str = "partial-dft"
    gains: tuple[float, ...] | float = 1.0
    fresh_a: bool = True
    workers: int = 1
    mmse_support: str = "rdd"
    ml_budget: int = 10**6
    alpha: float = 0.5
    c: float = 1.0
    include_baseline: bool = False
    output: str = "sweep.csv"

    def __post_init__(self):
        if self.n < 1 or self.k < 1 or self.l < 1:
            raise ConfigError("n, k and l must be positive")
        if self.k > self.n:
            raise ConfigError(f"k={self.k} cannot exceed n={self.n}")
        if not self.m_values:
            raise ConfigError("m_values must not be empty")
        if any(m < 1 or m > self.n for m in self.m_values):
            raise ConfigError(f"every m must be in [1, n={self.n}]: {self.m_values}")
        if not self.snr_db:
            raise ConfigError("snr_db must not be empty")
        if any(not math.isfinite(s) for s in self.snr_db):
            raise ConfigError(f"snr values must be finite: {self.snr_db}")
        if not self.detectors:
            raise ConfigError("detector list must not be empty")
        for d in self.detectors:
            if d not in DETECTOR_NAMES:
                raise ConfigError(f"unknown detector {d!r}, expected one of {DETECTOR_NAMES}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.mmse_support not in ("rdd", "rddf"):
            raise ConfigError("mmse_support must be 'rdd' or 'rddf'")
        if isinstance(self.gains, tuple):
            if len(self.gains) != self.n:
                raise ConfigError(
                    f"per-user gain list has {len(self.gains)} entries, need n={self.n}"
                )
            if any(g == 0 for g in self.gains):
                raise ConfigError("gains must be nonzero")
        elif self.gains == 0:
            raise ConfigError("gains must be nonzero")
        if not self._gram_spec_valid():
            raise ConfigError(
                f"gram must be 'identity', 'equicorrelated:<rho>' or "
                f"'signatures:<seed>', got {self.gram!r}"
            )
        if not self._matrix_spec_valid():
            raise ConfigError(
                f"matrix must be 'partial-dft', 'identity' or 'custom:<path>', "
                f"got {self.matrix!r}"
            )
        if self.matrix == "identity" and any(m != self.n for m in self.m_values):
            raise ConfigError("matrix=identity requires every m to equal n")
        if "decorrelating" in self.detectors and self.matrix != "identity":
            raise ConfigError(
                "the decorrelating detector requires matrix=identity; "
                "use include_baseline to add baseline rows to another sweep"
            )

    def _gram_spec_valid(self) -> bool:
        if self.gram == "identity":
            return True
        head, _, arg = self.gram.partition(":")
        if head == "equicorrelated":
            try:
                rho = float(arg)
            except ValueError:
                return False
            return -1.0 / (self.n - 1) < rho < 1.0 if self.n > 1 else False
        if head == "signatures":
            return arg.isdigit()
        return False

    def _matrix_spec_valid(self) -> bool:
        if self.matrix in ("partial-dft", "identity"):
            return True
        head, _, arg = self.matrix.partition(":")
        return head == "custom" and bool(arg)

    def gain_vector(self) -> tuple[float, ...]:
        if isinstance(self.gains, tuple):
            return self.gains
        return (float(self.gains),) * self.n


def _parse_bool(key: str, raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def _parse_value(key: str, raw: str):
    try:
        if key in ("n", "k", "l", "trials", "seed", "workers", "ml_budget"):
            return int(raw)
        if key in ("alpha", "c"):
            return float(raw)
        if key in ("fresh_a", "include_baseline"):
            return _parse_bool(key, raw)
        if key == "m_values":
            return tuple(int(v.strip()) for v in raw.split(",") if v.strip())
        if key == "snr_db":
            return tuple(float(v.strip()) for v in raw.split(",") if v.strip())
        if key == "detectors":
            return tuple(v.strip() for v in raw.split(",") if v.strip())
        if key == "gains":
            parts = [v.strip() for v in raw.split(",") if v.strip()]
            if len(parts) == 1:
                return float(parts[0])
            return tuple(float(v) for v in parts)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r} ({exc})") from exc
    return raw


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate config text; raises ConfigError on any problem."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw)
    schema = values.pop("schema", None)
    if schema is None:
        raise ConfigError("missing required 'schema' field")
    if str(schema) != str(SCHEMA_VERSION):
        raise ConfigError(f"unsupported schema version {schema!r}, expected {SCHEMA_VERSION}")
    required = ("n", "k", "m_values", "snr_db", "detectors", "trials", "seed")
    missing = [key for key in required if key not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    return ExperimentConfig(**values)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
