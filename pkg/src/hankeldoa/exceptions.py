"""Exception types raised by hankeldoa."""


class HankelDoaError(Exception):
    """Base class for all library errors."""


class DimensionError(HankelDoaError, ValueError):
    """Array sizes do not agree with the declared geometry."""


class InvalidSceneError(HankelDoaError, ValueError):
    """A source scene violates its invariants (duplicate tau, zero amplitude...)."""


class OutOfRangeError(HankelDoaError, ValueError):
    """A normalized frequency does not map to a physical direction."""


class DegenerateInputError(HankelDoaError, ValueError):
    """Input carries no information (e.g. an all-zero snapshot)."""


class InfeasiblePlanError(HankelDoaError, ValueError):
    """Too few elements requested for completion to be possible."""


class UndefinedMetricError(HankelDoaError, ValueError):
    """A metric is undefined for the given inputs (e.g. nothing missing)."""
