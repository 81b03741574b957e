"""Exception types raised across the package."""


class ParameterError(ValueError):
    """Invalid instance parameters (sizes, divisibility, regime)."""


class RegimeError(ParameterError):
    """A storage/computation point outside 1 <= c <= r <= K, or an infeasible quadruple."""


class SchemeError(RuntimeError):
    """The scheme construction or execution broke one of its own invariants."""


class MissingSignalError(SchemeError):
    pass


class DecodeError(SchemeError):
    pass


class InvalidSchemeError(SchemeError):
    """A compute-set snapshot in which some IV is computed nowhere."""
