"""
errors.py -- Exception hierarchy for the translation-surface toolkit.

Every error an operation can raise derives from SurfaceError, which is a
ValueError so callers that only care about "bad input" can catch that.
"""


class SurfaceError(ValueError):
    """Base class for all toolkit errors."""


# geom_core


class NonUnitDeterminant(SurfaceError):
    pass


class DegeneratePolygon(SurfaceError):
    pass


class DependentInput(SurfaceError):
    pass


# surface


class UnpairedEdge(SurfaceError):
    pass


class NonParallelPair(SurfaceError):
    pass


class IncongruentPair(SurfaceError):
    pass


class BadConeAngle(SurfaceError):
    pass


# tracing / saddle


class CornerAmbiguity(SurfaceError):
    pass


class NoConePoints(SurfaceError):
    pass


# constructions


class BadParameters(SurfaceError):
    pass


class PairingImpossible(SurfaceError):
    pass


# veech


class NoVertices(SurfaceError):
    pass


class DegenerateHolonomy(SurfaceError):
    pass


class NotClosed(SurfaceError):
    pass


class NotAGroup(SurfaceError):
    pass


# cli_render


class ParseError(SurfaceError):
    pass


class ValidationError(SurfaceError):
    """Raised when a loaded or built surface fails an internal invariant."""

    def __init__(self, check: str, message: str):
        super().__init__(f"{check}: {message}")
        self.check = check
