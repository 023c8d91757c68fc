"""Exception types raised across oranmtd.

Every class derives from a builtin so callers can catch either the specific
type or the usual ``ValueError`` / ``ArithmeticError`` / ``RuntimeError``.
"""


class InvalidParameterError(ValueError):
    """A sampler, environment or training parameter is out of range."""


class ShapeError(ValueError):
    """Array dimensions do not chain."""


class InvalidInputError(ValueError):
    """Detector inputs are malformed (window counts, fleet size)."""


class OracleSizeError(ValueError):
    """The exhaustive admission oracle refused an instance that is too large."""


class ConfigError(ValueError):
    """The experiment configuration is unreadable or has unknown keys."""


class NumericalError(ArithmeticError):
    """A network, loss or update produced non-finite values."""


class GradientCheckError(NumericalError):
    """The loss under a finite-difference check was not finite."""


class InvariantError(RuntimeError):
    """Internal bookkeeping no longer satisfies its invariant."""


class NoActiveMemberError(RuntimeError):
    """Model selection was asked for but every ensemble member is pruned."""


class PruneError(RuntimeError):
    """Pruning would leave the ensemble without an active member."""
