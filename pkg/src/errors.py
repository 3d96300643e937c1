"""Exception hierarchy for the energy block simulator."""


class FlexblockError(Exception):
    """Base class for all simulator errors."""


class BalanceViolation(FlexblockError, ValueError):
    """A zero-capacity unit's energy balance does not close."""


class SocOutOfRange(FlexblockError, ValueError):
    """A state update would leave [soc_min, soc_max]."""


class IndexOutOfRange(FlexblockError, IndexError):
    """A time index lies outside a series."""


class LengthMismatch(FlexblockError, ValueError):
    """Two series that must align have different lengths."""


class DivisionByZero(FlexblockError, ZeroDivisionError):
    """A ratio has an empty denominator."""


class MissingUnit(FlexblockError, ValueError):
    """A block lacks one of the five unit kinds."""


class DuplicateUnit(FlexblockError, ValueError):
    """A block holds the same unit kind twice."""


class DimensionMismatch(FlexblockError, ValueError):
    """Matrix or vector shapes are inconsistent."""


class ParseError(FlexblockError, ValueError):
    """A profile file cannot be parsed."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column '{column}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class ValidationError(FlexblockError, ValueError):
    """Input parsed but breaks a named rule."""

    def __init__(self, rule: str, message: str):
        self.rule = rule
        super().__init__(f"{rule}: {message}")


class ConfigError(FlexblockError, ValueError):
    """A scenario document has a malformed or unknown field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class SolverExhausted(FlexblockError, RuntimeError):
    """The MPC relaxation ladder ran out of rungs."""
