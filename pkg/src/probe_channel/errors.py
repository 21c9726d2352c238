"""Exception types raised across the package."""


class ProbeChannelError(Exception):
    """Base class for all package errors."""


class DimensionError(ProbeChannelError, ValueError):
    pass


class HermiticityError(ProbeChannelError, ValueError):
    pass


class DegenerateEstimateError(ProbeChannelError, ValueError):
    """A matrix estimate has non-positive trace and cannot be normalized."""


class ZeroProbabilityError(ProbeChannelError, ArithmeticError):
    """The channel annihilates the input (success probability is zero)."""


class ParamError(ProbeChannelError, ValueError):
    pass


class UnitarityError(ParamError):
    pass


class RankError(ProbeChannelError, ValueError):
    """A probe matrix is not full rank within the configured threshold."""

    def __init__(self, message: str, ratio: float | None = None):
        super().__init__(message)
        self.ratio = ratio


class IncompleteSettingsError(ProbeChannelError, ValueError):
    """Measurement settings do not span the operator space."""
