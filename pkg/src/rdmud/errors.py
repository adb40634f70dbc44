"""Exception types shared across the library."""


class RdmudError(Exception):
    """Base class for all rdmud errors."""


class NearSingularGram(RdmudError):
    """Signature set whose Gram matrix is too ill conditioned to use."""


class DimensionMismatch(RdmudError):
    """Operands with incompatible shapes."""


class InvalidDimensions(RdmudError):
    """Requested sizes that are out of range (e.g. M > N or K > N)."""


class SingularSystem(RdmudError):
    """A linear system required by a detector is numerically singular."""


class BudgetExceeded(RdmudError):
    """Exhaustive search space exceeds the configured candidate budget."""


class NotIdentityMatrix(RdmudError):
    """The decorrelating baseline requires the identity measurement matrix."""


class HypothesisViolated(RdmudError):
    """A bound was evaluated outside its hypothesis (e.g. r_min <= 2*tau)."""


class ConfigError(RdmudError):
    """Invalid experiment configuration or unreadable config file."""
