"""Exception hierarchy shared by all jagg modules."""


class JaggError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(JaggError):
    """Objects built over incompatible issue sets or lengths."""


class UnknownIssue(JaggError):
    """A literal or name refers to an issue that does not exist."""


class FragmentError(JaggError):
    """Input formula or circuit is outside the fragment an operation requires."""


class NotDecomposable(FragmentError):
    """Circuit failed the decomposability check required for DNNF operations."""


class RationalityError(JaggError):
    """A ballot violates the integrity constraint it was validated against."""


class ResourceLimit(JaggError):
    """An exponential fallback was asked to exceed its configured cap."""


class ContractViolation(JaggError):
    """An operation's precondition does not hold (bad labelling, bad engine, ...)."""


class ParseError(JaggError):
    """Malformed input file or string."""
