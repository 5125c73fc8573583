"""Exception types shared across the package."""


class BeliefBetError(Exception):
    """Base class for every structured error raised by this package."""


class DuplicateLabelError(BeliefBetError):
    """Outcome labels of a space are not distinct."""


class SizeOutOfRangeError(BeliefBetError):
    """Outcome count is outside the supported 1..24 range."""


class EndpointViolationError(BeliefBetError):
    """A set function does not vanish on the empty set or is not 1 on the full set."""


class FamilyTooLargeError(BeliefBetError):
    """An inclusion-exclusion instance was requested for more than 20 sets."""


class SpaceMismatchError(BeliefBetError):
    """Two values built over different outcome spaces were combined."""


class NotNegativeError(BeliefBetError):
    """A negative-mass certificate was requested for a subset whose mass is not negative."""


class SingletonCoreError(BeliefBetError):
    """A negative-mass certificate needs a subset with at least two outcomes."""


class NoGapError(BeliefBetError):
    """A pricing-gap certificate was requested where model and Choquet prices agree."""


class SchemaError(BeliefBetError):
    """An input document does not match its schema."""
