"""Exception hierarchy. Every numerical failure mode gets its own class so the
CLI can map them to exit codes and tests can assert on them precisely."""


class LambdaForgeError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(LambdaForgeError):
    """Operator or state requested with an unusable truncation dimension."""


class DimensionMismatchError(LambdaForgeError):
    """Operands live on different Hilbert spaces."""


class ContractViolationError(LambdaForgeError):
    """An input broke a documented precondition (e.g. non-Hermitian matrix)."""


class StiffnessError(LambdaForgeError):
    """Adaptive integrator drove the step size below the resolvable minimum."""

    def __init__(self, t, message=None):
        self.t = t
        super().__init__(message or f"step size underflow at t={t:.6e} s")


class DegenerateSteadyStateError(LambdaForgeError):
    """Liouvillian null space is not one-dimensional."""


class DegenerateDriveError(LambdaForgeError):
    """Drive response undefined (zero linewidth and zero detuning)."""


class TruncationError(LambdaForgeError):
    """Basis truncation too small for the requested computation."""


class LabelingError(LambdaForgeError):
    """Dressed eigenstate could not be matched to a bare product state."""


class NoMinimumError(LambdaForgeError):
    """Potential minimum could not be bracketed (out-of-regime parameters)."""


class OutOfRegimeError(LambdaForgeError):
    """Parameters violate a validity condition of the requested model."""


class CalibrationError(LambdaForgeError):
    """Nonlinear calibration solver failed to converge to a physical root."""


class ConfigError(LambdaForgeError):
    """Configuration file or override is malformed."""
