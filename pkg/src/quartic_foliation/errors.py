"""Named failure modes raised across the package."""

from __future__ import annotations


class QuarticFoliationError(Exception):
    """Base class; ``payload`` carries machine-readable context for reports."""

    def __init__(self, message: str = "", **payload):
        super().__init__(message or self.__class__.__name__)
        self.payload = payload

    def to_json(self) -> dict:
        out = {"error": self.__class__.__name__, "message": str(self)}
        for key, val in self.payload.items():
            out[key] = val if isinstance(val, (int, float, str, bool, list, dict, type(None))) else str(val)
        return out


class ParseError(QuarticFoliationError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})", line=line, column=column)
        self.line = line
        self.column = column


# algebra
class BothZeroDegree(QuarticFoliationError):
    pass


class NoConvergence(QuarticFoliationError):
    pass


class AmbiguousRank(QuarticFoliationError):
    pass


# geometry
class NotDegree4(QuarticFoliationError):
    pass


class SingularCurve(QuarticFoliationError):
    pass


class TangentAtInfinity(QuarticFoliationError):
    pass


class SharedComponent(QuarticFoliationError):
    pass


class SolverIncomplete(QuarticFoliationError):
    pass


class NormalizationBreaksTransversality(QuarticFoliationError):
    pass


class DegenerateNormalization(QuarticFoliationError):
    """Normalized bitangents have a = 0 or b = 0; such pairs are rejected."""


# divisors
class UnbalancedTrace(QuarticFoliationError):
    pass


class ChartUnavailable(QuarticFoliationError):
    pass


# localform
class DegenerateTangency(QuarticFoliationError):
    pass


class ResidueUndefined(QuarticFoliationError):
    pass


# preregularity
class NonTransverseC(QuarticFoliationError):
    pass


class FYVanishes(QuarticFoliationError):
    pass


class PointOnC(QuarticFoliationError):
    pass


class FXXVanishes(QuarticFoliationError):
    pass


class GenericityFails(QuarticFoliationError):
    pass


class VerdictMismatch(QuarticFoliationError):
    pass


class NoDecomposition(QuarticFoliationError):
    pass


class NotSameDivisor(QuarticFoliationError):
    pass


class RescaleDegenerate(QuarticFoliationError):
    pass
