"""
Exception hierarchy shared by the algebra layer, the services and the CLI.
"""


class WorkbenchError(Exception):
    """Base class for every error raised by the workbench."""


class ConfigError(WorkbenchError, ValueError):
    """Invalid job configuration or command-line usage."""


class SideMismatchError(WorkbenchError, ValueError):
    """Exterior masks living on different sides (Λ(V) versus Λ(V^∨)) were combined."""


class MatrixFactorizationError(WorkbenchError):
    """The square of the deformed differential is not a scalar multiple of the identity."""


class EquivarianceError(WorkbenchError):
    """A structure is not equivariant for the group it is paired with."""


class DeterminacyError(WorkbenchError):
    """An ideal-membership or Koszul-cocycle problem has no solution at the requested order."""


class ToricError(WorkbenchError):
    """Inconsistent toric chart data."""


class VerificationFailure(WorkbenchError):
    """A verification report came back with failures."""

    def __init__(self, message: str, first_failure: str = "") -> None:
        super().__init__(message)
        self.first_failure = first_failure
