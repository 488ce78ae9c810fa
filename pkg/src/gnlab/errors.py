"""Exception types shared across the package.

Every error carries a stable ``code`` string so reports and tests can match
on machine-readable tags instead of message text.
"""

from __future__ import annotations


class GNLabError(Exception):
    """Base class; ``code`` identifies the failure mode."""

    code = "ERROR"

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.code)
        self.context = context


# exponent calculus

class InvalidIndex(GNLabError):
    code = "INVALID_INDEX"


class NegativeReciprocal(GNLabError):
    code = "NEGATIVE_RECIPROCAL"


class Degenerate(GNLabError):
    code = "DEGENERATE"


class AlphaOutOfRange(GNLabError):
    code = "ALPHA_OUT_OF_RANGE"


class NoMatchingFactor(GNLabError):
    code = "NO_MATCHING_FACTOR"


class SelfPowerGeqOne(GNLabError):
    code = "SELF_POWER_GEQ_ONE"


class ExponentMismatch(GNLabError):
    code = "EXPONENT_MISMATCH"


class InadmissibleParams(GNLabError):
    code = "INADMISSIBLE_PARAMS"


# grid functions

class AxisOutOfRange(GNLabError):
    code = "AXIS_OUT_OF_RANGE"


class GridTooCoarse(GNLabError):
    code = "GRID_TOO_COARSE"


class EmptyRegion(GNLabError):
    code = "EMPTY_REGION"


class SupportExceedsBox(GNLabError):
    code = "SUPPORT_EXCEEDS_BOX"


class NonpositiveScale(GNLabError):
    code = "NONPOSITIVE_SCALE"


class EpsTooSmall(GNLabError):
    code = "EPS_TOO_SMALL"


# covering

class WindowEmpty(GNLabError):
    code = "WINDOW_EMPTY"


class NoCrossing(GNLabError):
    code = "NO_CROSSING"


class ZeroFunction(GNLabError):
    code = "ZERO_FUNCTION"


# front end

class ConfigInvalid(GNLabError):
    code = "CONFIG_INVALID"


class ContractFailed(GNLabError):
    code = "CONTRACT_FAILED"
