"""
Hindsight exception hierarchy.

Every failure raised by the library derives from HindsightError, so callers
can catch one type. The CLI maps InputError to exit status 2 and ConfigError
to exit status 3.
"""
from typing import Optional, Tuple


class HindsightError(Exception):
    """Base class for all hindsight failures."""

    exit_code = 1


class InputError(HindsightError):
    """Input data cannot be read or is ill-formed."""

    exit_code = 2

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class ConfigError(HindsightError):
    """Run configuration or command-line arguments are invalid."""

    exit_code = 3


class LengthMismatchError(HindsightError, ValueError):
    """Two sequences that must be aligned have different lengths."""

    def __init__(self, what: str, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}: expected length {expected}, got {actual}")


class InvalidStrategyError(HindsightError, ValueError):
    """Positions are not binary, or a trade list is not sorted and disjoint."""

    def __init__(self, message: str, pair: Optional[Tuple] = None):
        self.pair = pair
        super().__init__(message)


class BudgetExceededError(HindsightError):
    """An oracle was asked for more work than its budget allows."""


class UnknownOperationError(ConfigError):
    """A benchmark operation name is not registered."""


class InfeasibleProblemError(HindsightError, ValueError):
    """An interval problem admits no interval, or its data is malformed."""
