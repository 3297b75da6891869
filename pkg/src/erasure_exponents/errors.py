"""Exception types shared across the package."""

from __future__ import annotations


class ExponentError(ValueError):
    """Base class for every domain or validation failure raised here."""


class NonStochastic(ExponentError):
    pass


class NegativeEntry(ExponentError):
    pass


class AlphabetTooSmall(ExponentError):
    pass


class AlphabetTooLarge(ExponentError):
    pass


class DomainError(ExponentError):
    pass


class NotSymmetric(ExponentError):
    pass


class RateOutOfRange(ExponentError):
    pass


class InvalidThreshold(ExponentError):
    pass


class ThresholdTooLarge(ExponentError):
    pass


class BudgetExceeded(ExponentError):
    pass


class TruncationWarning(UserWarning):
    """The binomial truncation window ran into the edge of the support."""
