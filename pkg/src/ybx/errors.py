"""Exception types raised by the engine.

Numerical guards derive from :class:`NumericalGuard`; the CLI maps them to
exit code 3, and :class:`ConfigError` to exit code 2.
"""


class YbxError(Exception):
    """Base class for all package errors."""


class ConfigError(YbxError, ValueError):
    """Invalid parameters or configuration."""


class DimensionMismatch(YbxError, ValueError):
    """Operands have incompatible shapes or bases."""


class ZeroMatrix(YbxError, ValueError):
    """A normalization pivot was requested from an all-zero matrix."""


class NumericalGuard(YbxError, ArithmeticError):
    """A numerical safety check failed."""


class PoleProximity(NumericalGuard):
    """An evaluation point lies too close to a pole."""


class IllConditioned(NumericalGuard):
    """A collocation or extraction system exceeds the condition bound."""


class InvarianceViolation(NumericalGuard):
    """A subspace expected to be invariant is not."""


class BranchGuard(NumericalGuard):
    """A non-integer power was requested of a non-positive base."""
