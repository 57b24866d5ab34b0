"""Exception types shared across the package."""


class TropicalError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(TropicalError):
    """Operand shapes are incompatible with the requested operation."""


class PivotError(TropicalError):
    """A rank-one factorization was requested but the (1,1) pivot is -inf."""


class AssumptionError(TropicalError):
    """A derivation was requested on a family that violates its preconditions.

    Carries the validation report (when available) so callers can show which
    assumption failed and on what witness.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class BudgetExceededError(TropicalError):
    """An exhaustive computation would exceed its configured work budget."""


class FamilyFileError(TropicalError):
    """An input file could not be parsed or failed structural validation.

    ``position`` is a human-readable locator (member name, row, column or
    line number) for the offending token, when one is known.
    """

    def __init__(self, message: str, position: str | None = None):
        super().__init__(message if position is None else f"{message} (at {position})")
        self.position = position
