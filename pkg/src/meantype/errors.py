"""Exception types shared across the package.

Every error raised on purpose by this package derives from
:class:`MeanTypeError`, so callers (notably the CLI) can treat
"library error" as a single category distinct from genuine bugs.
"""

from __future__ import annotations


class MeanTypeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInterval(MeanTypeError):
    """Interval endpoints do not describe a nondegenerate interval."""


class InvalidMeanSpec(MeanTypeError):
    """A mean description violates its structural constraints."""


class InvalidMapping(MeanTypeError):
    """A mean-type mapping description is structurally inconsistent."""


class ParseError(MeanTypeError):
    """A textual form (mean string, interval, config file) failed to parse.

    ``token`` holds the offending piece of text.
    """

    def __init__(self, message: str, token: str | None = None):
        super().__init__(message)
        self.token = token


class ArityMismatch(MeanTypeError):
    """Vector length does not match the arity of the mean or mapping."""


class DomainViolation(MeanTypeError):
    """A coordinate falls outside the interval or the mean's natural domain."""


class NonFiniteInput(MeanTypeError):
    """An input coordinate is NaN or infinite."""


class EmptyVector(MeanTypeError):
    """An operation requiring a nonempty vector received an empty one."""


class ConstantVector(MeanTypeError):
    """An operation defined only for nonconstant vectors received a constant one."""


class NotFoundWithinCap(MeanTypeError):
    """No iterate within the cap strictly decreased the diameter.

    Carries the full iteration trace for diagnosis.  This is a negative
    search result, not a proof that the mapping fails to be weakly
    contractive: the cap may simply be too small for this vector.
    """

    def __init__(self, message: str, trace=None, cap: int | None = None):
        super().__init__(message)
        self.trace = trace
        self.cap = cap
