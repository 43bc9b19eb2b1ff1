"""Seeded fixture generators and scenario loading from plain dicts."""

from __future__ import annotations

import random
from dataclasses import replace

from gmpy2 import mpc, mpq

from .algebra.numbers import cabs, num_from_json, resolve_precision, working_precision
from .algebra.poly import BiPoly, X, Y, monomials
from .geometry import (
    Bitangent,
    bitangent_from_line,
    find_bitangents,
    intersect_curves,
    validate_quartic,
)

FERMAT = BiPoly.parse("X^4 + Y^4 - 1")


def fermat_perturbation(seed: int, height: int = 10) -> BiPoly:
    """X^4 + Y^4 - 1 plus p/q X^i Y^j for every i + j <= 4, with |p| <= 3 and 4 <= q <= height."""
    rng = random.Random(seed)
    terms = {}
    for mon in monomials(4):
        p = rng.randint(-3, 3)
        q = rng.randint(4, height)
        terms[mon] = mpq(p, q)
    return FERMAT + BiPoly(terms)


def random_poly(rng: random.Random, degree: int, height: int = 10, exact: bool = True) -> BiPoly:
    terms = {}
    for mon in monomials(degree):
        if exact:
            terms[mon] = mpq(rng.randint(-height, height), rng.randint(1, height))
        else:
            terms[mon] = mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return BiPoly(terms)


def select_bitangents(F, selection: dict, precision_bits: int | None = None) -> tuple[Bitangent, Bitangent]:
    """Pair from {"select": [i, j], "seed": s, "starts": n} or {"lines": [[a, b, c], [a, b, c]]}.

    An optional "q13" point picks which contact point of the first line becomes Q13."""
    prec = resolve_precision(precision_bits)
    if "lines" in selection:
        lines = [tuple(num_from_json(v) for v in L) for L in selection["lines"]]
        pair = (bitangent_from_line(F, lines[0], prec), bitangent_from_line(F, lines[1], prec))
    else:
        bts = find_bitangents(
            F,
            count=selection.get("count"),
            seed=int(selection.get("seed", 0)),
            starts=int(selection.get("starts", 2000)),
            precision_bits=prec,
        )
        i, j = selection["select"]
        pair = (bts[i], bts[j])
    if "q13" in selection:
        # put the contact point of l1 nearest to the hint first
        hint = tuple(num_from_json(v) for v in selection["q13"])
        pts = sorted(pair[0].tangency_points, key=lambda r: cabs(r.point[0] - hint[0]) + cabs(r.point[1] - hint[1]))
        pair = (replace(pair[0], tangency_points=tuple(pts)), pair[1])
    return pair


def scenario_from_dict(obj: dict, precision_bits: int | None = None, **kwargs):
    from .preregularity import build_neeman

    prec = int(precision_bits or obj.get("precision", 256))
    F = BiPoly.parse(obj["quartic"]) if isinstance(obj["quartic"], str) else BiPoly.from_json(obj["quartic"])
    with working_precision(prec):
        q = validate_quartic(F, prec)
        bt1, bt2 = select_bitangents(q, obj["bitangents"], prec)
        inf = obj.get("infinity_line")
        inf = None if inf is None else tuple(num_from_json(v) for v in inf)
        return build_neeman(
            q, bt1, bt2, prec, infinity_line=inf, check_genericity=obj.get("check_genericity", True), **kwargs
        )


def transverse_pair(F: BiPoly, seed: int, tries: int = 20) -> BiPoly:
    """A second perturbed Fermat quartic meeting F in 16 simple affine points."""
    for k in range(tries):
        F2 = fermat_perturbation(seed + k)
        try:
            validate_quartic(F2)
            recs = intersect_curves(F, F2)
        except Exception:
            continue
        if len(recs) == 16 and all(r.multiplicity == 1 and not r.at_infinity for r in recs):
            return F2
    raise RuntimeError("no transverse partner found")


def tangent_line_through(F: BiPoly, P: tuple, avoid: list, precision_bits: int | None = None) -> tuple:
    """A line through the projective point P tangent to F = 0 away from the points in ``avoid``.

    Tangency points are the intersections of F with the polar P_x F_X + P_y F_Y + P_z F_Z."""
    prec = resolve_precision(precision_bits)
    with working_precision(prec):
        px, py, pz = P
        # F_Z of the homogenization at Z = 1: 4F - X F_X - Y F_Y
        FZ = F * 4 - X * F.dX - Y * F.dY
        polar = F.dX * px + F.dY * py + FZ * pz
        for rec in intersect_curves(F, polar, prec):
            if rec.at_infinity:
                continue
            x0, y0 = rec.point
            if any(cabs(x0 - a) + cabs(y0 - b) < 1e-20 for a, b in avoid):
                continue
            # tangent line at (x0, y0): F_X (X - x0) + F_Y (Y - y0) = 0
            fx, fy = F.dX(x0, y0), F.dY(x0, y0)
            return (fx, fy, -(fx * x0 + fy * y0))
    raise RuntimeError("no tangent line found")


def genericity_breaking(scenario) -> BiPoly:
    """F + e l1^2 l2^2 keeps both bitangents and contact points but zeroes the genericity expression at Q13.

    At Q13 (on l1) the added term contributes 3 e a^2 b^3 to a F_X + b F_XX/2 + a b F_XY."""
    from .preregularity import genericity_value

    F, a, b = scenario.F, scenario.a, scenario.b
    g0 = genericity_value(F, a, b, scenario.points[12])
    e = -g0 / (3 * a**2 * b**3)
    return F + (scenario.l1**2) * (scenario.l2**2) * e
