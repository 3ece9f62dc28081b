"""Semantic exception hierarchy shared across the package."""

from __future__ import annotations


class LhvError(Exception):
    """Base class for every error raised by this package."""


class InvalidResponseError(LhvError, ValueError):
    """A detection response leaves [0, 1] somewhere on the hidden-variable range.

    Carries the offending validity report on ``.report`` when available.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class AsymmetricModelError(LhvError, ValueError):
    """Operation requires identical Alice/Bob response coefficients."""


class AsymmetricRatesError(LhvError, ValueError):
    """Memory-rule algebra requires equal singles probabilities (p_a = p_b)."""


class AllDarkModelError(LhvError, ZeroDivisionError):
    """The Bell ratio is undefined when both singles probabilities vanish."""


class EfficiencyRangeError(LhvError, ValueError):
    """Detector efficiency must lie in [0, 1]."""


class InsufficientSamplesError(LhvError, ValueError):
    """Too few event pairs to form the requested number of batches."""


class RejectionLimitError(LhvError, RuntimeError):
    """Rejection sampler exhausted its attempt budget; indicates RNG misuse."""


class EmptySpaceError(LhvError, ValueError):
    """Search space declares no free parameters."""
