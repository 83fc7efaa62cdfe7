"""Exception types shared across the package."""


class VineError(Exception):
    """Base class for all vinesim errors."""


class DomainError(VineError, ValueError):
    """Input outside the validity range of a model relation."""


class InvalidDesignError(VineError, ValueError):
    """Design parameters violate a construction invariant."""


class SessionFinishedError(VineError, RuntimeError):
    """Command applied to a session that already hit its length limit."""


class InfeasibleCurvatureError(VineError, ValueError):
    """A shape primitive bends tighter than the design allows."""

    def __init__(self, index: int, message: str):
        super().__init__(message)
        self.index = index


class InfeasibleShapeError(VineError, ValueError):
    """A shape cannot be realized by any command schedule."""


class LengthBudgetError(VineError, ValueError):
    """A plan needs more tubing than the design provides."""


class UnreachableToleranceError(VineError, RuntimeError):
    """No fit within the primitive budget met the requested tolerance."""

    def __init__(self, message: str, best_report=None):
        super().__init__(message)
        self.best_report = best_report


class InsufficientSamplesError(VineError, ValueError):
    """Too few calibration samples for a meaningful fit."""


class SchemaError(VineError, ValueError):
    """Structured input failed validation; carries a JSON-pointer path."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer
