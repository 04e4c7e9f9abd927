"""Exception types shared across the package."""

from __future__ import annotations


class LogicError(Exception):
    """Base class for every error raised deliberately by this package."""


class ParseError(LogicError, ValueError):
    """Malformed formula or sequent text. ``offset`` is 0-based."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.reason = message


class SignatureError(LogicError, ValueError):
    """Inconsistent signature, or a connective used outside its signature."""


class CoverageError(LogicError, ValueError):
    """An engine was handed a formula it has no semantics for."""


class MatrixError(LogicError, ValueError):
    """Ill-formed matrix, or a restriction that breaks a matrix invariant."""


class ConstraintError(LogicError, ValueError):
    """A recapture constraint that cannot be applied to the given host."""


class DefinitionError(LogicError, ValueError):
    """Problem in a logic definition file; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line
        self.reason = message


class BoundsTooLarge(LogicError):
    """The requested bounds exceed what the chosen route can enumerate."""


class CacheCorruption(LogicError):
    """A snapshot cache file failed its integrity check."""


class BudgetExhausted(LogicError):
    """Proof search ran out of steps. This is not a verdict of invalidity."""

    def __init__(self, sequent, steps: int):
        super().__init__(f"step budget of {steps} exhausted on {sequent}")
        self.sequent = sequent
        self.steps = steps
