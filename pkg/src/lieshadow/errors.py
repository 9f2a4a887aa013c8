"""Exception hierarchy shared across the package."""


class LieshadowError(Exception):
    """Base class for all package errors."""


class FormatError(LieshadowError):
    """Malformed or rejected input file."""


class PreconditionError(LieshadowError):
    """An operation was called outside its stated preconditions."""


class UndecidedAtPrecision(LieshadowError):
    """A certified numeric decision could not be resolved at the precision floor."""


class VerificationError(LieshadowError):
    """A self-check that should hold by theorem failed; indicates a bug or bad input."""
