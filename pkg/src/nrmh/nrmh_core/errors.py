"""
Exception hierarchy for the NRMH toolkit.

Every error carries the process exit code the command-line driver reports
when the error aborts a command.
"""

from typing import Optional, Tuple

EXIT_CONFIG_ERROR = 2
EXIT_INVARIANT_VIOLATION = 3
EXIT_NUMERICAL_FAILURE = 4


class NRMHError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = EXIT_NUMERICAL_FAILURE


class ConfigError(NRMHError, ValueError):
    """Invalid experiment configuration or command-line input."""

    exit_code = EXIT_CONFIG_ERROR


class InvariantViolation(NRMHError, ValueError):
    """An input or a constructed object breaks a mathematical invariant."""

    exit_code = EXIT_INVARIANT_VIOLATION


class PairError(InvariantViolation):
    """An invariant violation located at a specific state pair (x, y)."""

    def __init__(self, message: str, pair: Optional[Tuple[int, int]] = None):
        super().__init__(message)
        self.pair = pair


class NotPositiveDefinite(InvariantViolation):
    pass


class NotSymmetric(InvariantViolation):
    pass


class NotStochastic(InvariantViolation):
    pass


class NotVorticity(InvariantViolation):
    pass


class NotInvariant(InvariantViolation):
    pass


class NotReversible(InvariantViolation):
    pass


class NotAperiodic(InvariantViolation):
    pass


class SymmetricStructureViolated(PairError):
    pass


class VorticityBoundViolated(PairError):
    pass


class NegativeEntry(PairError):
    pass


class ParameterViolation(InvariantViolation):
    """Step size, diffusivity or vorticity scale outside the admissible region."""


class EnvelopeViolationDetected(InvariantViolation):
    """A sampled pair proves that k * pi_0 <= pi does not hold."""


class NumericalError(NRMHError, ArithmeticError):
    """A numerical procedure failed at runtime."""

    exit_code = EXIT_NUMERICAL_FAILURE


class NoConvergence(NumericalError):
    pass


class UnstableMatrix(NumericalError):
    """Spectral radius is not below one."""


class UnstableStepSize(UnstableMatrix):
    """The proposal recursion I + hB is not a contraction for this step size."""


class Singular(NumericalError):
    pass


class Reducible(NumericalError):
    pass


class NonFiniteRatio(NumericalError):
    pass


class TraceTooShort(NumericalError):
    pass
