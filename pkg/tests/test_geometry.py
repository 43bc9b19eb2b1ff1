import random

import pytest
from gmpy2 import mpfr, mpq

from conftest import ORACLES, load_fixture, oracle_point
from quartic_foliation.algebra.numbers import cabs
from quartic_foliation.algebra.poly import BiPoly
from quartic_foliation.errors import NotDegree4, SharedComponent, SingularCurve, TangentAtInfinity
from quartic_foliation.fixtures import random_poly
from quartic_foliation.geometry import (
    find_bitangents,
    infinity_divisor,
    intersect_curves,
    line_poly,
    local_order,
    normalize_pair,
    validate_quartic,
)

TOL = mpfr(2) ** -128


def P(text):
    return BiPoly.parse(text)


def close(p, q, tol=mpfr(10) ** -50):
    return cabs(p[0] - q[0]) + cabs(p[1] - q[1]) < tol


@pytest.fixture(scope="module")
def bitangents(fixture_quartic):
    return find_bitangents(fixture_quartic, seed=0, starts=2000)


def test_fermat_is_valid():
    q = validate_quartic(P("X^4 + Y^4 - 1"))
    assert q.smooth and q.transverse_at_infinity


def test_repeated_direction_at_infinity():
    with pytest.raises(TangentAtInfinity):
        validate_quartic(P("X^4 - 2*X^2*Y^2 + Y^4 - 1"))


def test_degree_and_singularity_checks():
    with pytest.raises(NotDegree4):
        validate_quartic(P("X^3 + Y^3 - 1"))
    # a node at the origin
    with pytest.raises(SingularCurve):
        validate_quartic(P("X^4 + Y^4 + X^2 - Y^2"))


def test_fixture_quartic_is_valid(fixture_quartic):
    assert validate_quartic(fixture_quartic).smooth


def test_infinity_divisor_of_fermat():
    recs = infinity_divisor(P("X^4 + Y^4 - 1"))
    assert len(recs) == 4 and all(r.multiplicity == 1 and r.at_infinity for r in recs)
    for r in recs:
        d1, d2 = r.point
        assert cabs(d1**4 + d2**4) < TOL * (cabs(d1) + cabs(d2)) ** 4


def test_infinity_divisor_degenerate():
    with pytest.raises(TangentAtInfinity):
        infinity_divisor(P("X^4 - 2*X^2*Y^2 + Y^4 - 1"))


def test_line_through_two_points_of_Q(fixture_quartic):
    F = fixture_quartic
    a, b = (oracle_point(p) for p in ORACLES["C_cap_Q"][:2])
    L = (a[1] - b[1], b[0] - a[0], a[0] * b[1] - a[1] * b[0])
    recs = intersect_curves(F, line_poly(L))
    assert sum(r.multiplicity for r in recs) == 4
    assert any(close(r.point, a) for r in recs) and any(close(r.point, b) for r in recs)


def test_C_cap_Q_matches_independent_newton(fixture_quartic):
    F = fixture_quartic
    recs = [r for r in intersect_curves(F, F.dX) if not r.at_infinity]
    assert len(recs) == 12 and all(r.multiplicity == 1 for r in recs)
    for pair in ORACLES["C_cap_Q"]:
        q = oracle_point(pair)
        assert any(close(r.point, q) for r in recs)


def test_pencil_base_points_match_independent_newton(pencil_pair):
    F, F2 = pencil_pair
    recs = intersect_curves(F, F2)
    assert len(recs) == 16 and sum(r.multiplicity for r in recs) == 16
    for pair in ORACLES["pencil_points"]:
        q = oracle_point(pair)
        assert any(close(r.point, q) for r in recs)


def test_bezout_and_residuals_random_curves(fixture_quartic):
    rng = random.Random(11)
    for deg in (1, 2, 3):
        H = random_poly(rng, deg, height=6)
        recs = intersect_curves(fixture_quartic, H)
        assert sum(r.multiplicity for r in recs) == 4 * deg
        for r in recs:
            if not r.at_infinity:
                assert r.residual < TOL


def test_shared_component():
    F = P("X^4 + Y^4 - 1")
    with pytest.raises(SharedComponent):
        intersect_curves(F, F * P("X + 1"))


def test_intersection_at_infinity_is_counted():
    # the line X = Y * e passes through a point at infinity of a quartic with direction (e : 1)
    F = P("X^4 + Y^4 - 1") + P("X*Y^3")
    recs = intersect_curves(F, P("X"))
    assert sum(r.multiplicity for r in recs) == 4


def test_bitangent_search(fixture_quartic, bitangents):
    F = fixture_quartic
    assert len(bitangents) == 28
    for bt in bitangents:
        assert bt.residual < TOL
        assert len(bt.tangency_points) == 2
        for rec in bt.tangency_points:
            assert cabs(F(*rec.point)) < TOL * (F.eval_scale(*rec.point) + 1)
            assert local_order(F, bt.line, rec.point, 4) == 2


def test_bitangent_is_double_contact_in_intersections(fixture_quartic, bitangents):
    recs = intersect_curves(fixture_quartic, bitangents[0].line)
    assert [r.multiplicity for r in recs if not r.at_infinity] == [2, 2]


def test_bitangent_request_and_dedup(fixture_quartic, bitangents):
    two = find_bitangents(fixture_quartic, count=2, seed=0, starts=2000)
    assert [b.line for b in two] == [b.line for b in bitangents[:2]]
    # a second seed finds the same set of lines
    again = find_bitangents(fixture_quartic, seed=3, starts=2000)
    assert len(again) == 28


def test_parallel_pair_is_identity():
    F = P("X^4 + Y^4 - 1")
    from quartic_foliation.geometry import Bitangent, IntersectionRecord

    def fake(c):
        # only the line and its contact points matter to the normalization
        return Bitangent(P(f"Y + 2*X + {c}"), (mpq(2), mpq(1), mpq(c)), (IntersectionRecord((mpq(0), mpq(-c)), 2), IntersectionRecord((mpq(1), mpq(-c - 2)), 2)), (None,) * 3, mpfr(0))

    norm = normalize_pair(F, fake(0), fake(1))
    assert norm.change.is_identity() and norm.a == 2 and norm.b == 1


def test_normalization_conjugation(scenario, fixture_quartic):
    """Intersecting then transforming equals transforming then intersecting."""
    change = scenario.normalization.change
    assert change.check() < mpfr(2) ** -200
    # F_X is not projectively natural, so transport the original cubic rather than recomputing C
    Hn = change.apply_poly(fixture_quartic.dX, 3)
    recs = [r for r in intersect_curves(scenario.F, Hn) if not r.at_infinity]
    mapped = [change.apply_point(oracle_point(p)) for p in ORACLES["C_cap_Q"]]
    assert len(recs) == 12
    for r in recs:
        assert any(close(r.point, m, mpfr(10) ** -40) for m in mapped)
    # contact points of the bitangents are transported as well
    touch = [change.apply_point(t.point) for t in scenario_touch_points()]
    for q in scenario.points[12:]:
        assert any(close(q, m, mpfr(10) ** -40) for m in touch)
    Fn = change.apply_poly(fixture_quartic, 4)
    # the scenario quartic is the transformed one up to a constant factor
    ratio = [scenario.F.coeff(*mon) / Fn.coeff(*mon) for mon in Fn.terms]
    assert all(cabs(r - ratio[0]) < mpfr(2) ** -200 for r in ratio)


def scenario_touch_points():
    from quartic_foliation.fixtures import select_bitangents

    obj = load_fixture("neeman.json")
    bt1, bt2 = select_bitangents(BiPoly.parse(obj["quartic"]), obj["bitangents"])
    return list(bt1.tangency_points) + list(bt2.tangency_points)


def test_normalized_lines(scenario):
    a, b = scenario.a, scenario.b
    assert scenario.l1 == BiPoly.parse("Y") + BiPoly.parse("X") * a
    assert scenario.l2 == BiPoly.parse("Y") + BiPoly.parse("X") * a + b
    assert cabs(a) > 0 and cabs(b) > 0
    validate_quartic(scenario.F)


def test_adversarial_infinity_fixture():
    from quartic_foliation.errors import NormalizationBreaksTransversality
    from quartic_foliation.fixtures import scenario_from_dict

    with pytest.raises(NormalizationBreaksTransversality):
        scenario_from_dict(load_fixture("adversarial-infinity.json"))
