"""Exception hierarchy shared by all locallim modules."""

from __future__ import annotations


class LocalLimError(Exception):
    """Base class for every error raised by the package."""


class ContractViolation(LocalLimError, ValueError):
    """An operation was called with arguments outside its precondition."""


class ParseError(LocalLimError, ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class BudgetError(LocalLimError, RuntimeError):
    """A sampler or enumerator ran out of its attempt budget."""

    def __init__(self, message: str, attempts: int | None = None, achieved: float | None = None):
        self.attempts = attempts
        self.achieved = achieved
        super().__init__(message)


class EmptyClassError(LocalLimError, ValueError):
    """The requested uniform class has no members."""


class OversizeError(LocalLimError, ValueError):
    """A ball exceeds the configured canonical-code size limit."""


class EmptyTargetError(LocalLimError, ValueError):
    """A root policy selected an empty vertex set."""


class UnsupportedCombination(LocalLimError, ValueError):
    """No theorem covers the requested (regime, root policy) pair."""


class ConfigError(LocalLimError, ValueError):
    """An experiment configuration is invalid."""
