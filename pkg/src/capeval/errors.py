"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ValidationError -> 1, InputError -> 2,
NumericalError -> 3.
"""


class CapevalError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(CapevalError):
    """Input violates a documented invariant or precondition."""


class InputError(CapevalError):
    """A file could not be read, parsed, or matched to its wire format."""


class NumericalError(CapevalError):
    """A numerical routine failed (rank deficiency, non-convergence, ...)."""
