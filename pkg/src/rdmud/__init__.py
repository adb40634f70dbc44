"""Reduced-dimension multiuser detection.

A receiver front-end that projects N matched-filter outputs onto M < N
correlators, digital detectors on the projected output, coherence-based
performance bounds, and a deterministic Monte Carlo harness.
"""

from .analysis import (
    BoundReport,
    CorrelatorBudget,
    check_conditions,
    compute_tau,
    min_correlators,
    pe_bound,
)
from .config import ExperimentConfig, load_config, parse_config
from .design import (
    MeasurementMatrix,
    coherence,
    identity_matrix,
    load_custom,
    max_column_energy,
    partial_dft,
    welch_bound,
)
from .detectors import (
    DetectionResult,
    block_error,
    decorrelating_baseline,
    ml_detect,
    rd_mmse_detect,
    rdd_detect,
    rddf_detect,
)
from .errors import (
    BudgetExceeded,
    ConfigError,
    DimensionMismatch,
    HypothesisViolated,
    InvalidDimensions,
    NearSingularGram,
    NotIdentityMatrix,
    RdmudError,
    SingularSystem,
)
from .harness import (
    PeEstimate,
    PointResult,
    estimate_pe,
    run_point,
    run_sweep,
    sigma_from_snr_db,
)
from .model import (
    FrontEndOutput,
    Scenario,
    TransmitState,
    draw_noise,
    random_transmit_state,
    synthesize,
)
from .waveforms import (
    CorrelatorBank,
    GramMatrix,
    SignatureSet,
    biorthogonal,
    build_correlators,
    draw_sample_noise,
    frontend_correlate,
    gram,
    gram_equicorrelated,
    gram_identity,
    random_signatures,
)

__version__ = "0.1.0"
