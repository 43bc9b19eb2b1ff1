"""Exact and high-precision algebra used by the geometric layers."""

from .linalg import DEFAULT_POLICY, RankCertificate, SolveOutcome, TolPolicy, nullspace, solve_or_refute
from .numbers import DEFAULT_PRECISION, working_precision
from .poly import BiPoly, UniPoly, X, Y, monomials
from .resultant import resultant
from .roots import univariate_roots
from .series import Series1, Series2, compose_poly, compose_poly_curve

__all__ = [
    "BiPoly",
    "UniPoly",
    "X",
    "Y",
    "monomials",
    "resultant",
    "univariate_roots",
    "Series1",
    "Series2",
    "compose_poly",
    "compose_poly_curve",
    "nullspace",
    "solve_or_refute",
    "TolPolicy",
    "DEFAULT_POLICY",
    "RankCertificate",
    "SolveOutcome",
    "DEFAULT_PRECISION",
    "working_precision",
]
