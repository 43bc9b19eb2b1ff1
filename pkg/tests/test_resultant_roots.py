import random

import pytest
from gmpy2 import mpc, mpfr, mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ORACLES
from quartic_foliation.algebra.numbers import cabs
from quartic_foliation.algebra.poly import BiPoly, UniPoly, poly_from_roots
from quartic_foliation.algebra.resultant import det_bareiss, resultant, sylvester
from quartic_foliation.algebra.roots import univariate_roots
from quartic_foliation.errors import BothZeroDegree


def P(text):
    return BiPoly.parse(text)


def test_resultant_substitution():
    assert resultant(P("X^2 - Y"), P("X - 1"), eliminate=0) == UniPoly([1, -1])


def test_resultant_no_common_root():
    r = resultant(P("X - 1"), P("X + 1"), eliminate=0)
    assert r.degree == 0 and r.c[0] != 0 and abs(r.c[0]) == 2


def test_resultant_both_zero_degree():
    with pytest.raises(BothZeroDegree):
        resultant(P("Y + 1"), P("Y^2"), eliminate=0)


def test_resultant_of_fixture_matches_frozen_sympy(fixture_quartic):
    r = resultant(fixture_quartic, fixture_quartic.dX, eliminate=1)
    frozen = [mpq(c) for c in ORACLES["res_F_FX_Y"]][::-1]
    assert r.degree == 12 and r.is_exact()
    # same polynomial up to the constant normalization
    ratio = r.c[-1] / frozen[-1]
    assert list(r.c) == [c * ratio for c in frozen]


def test_det_bareiss_small():
    assert det_bareiss([[2, 1], [1, 3]]) == 5
    assert det_bareiss([[0, 1], [1, 0]]) == -1
    assert det_bareiss([[1, 2], [2, 4]]) == 0
    assert len(sylvester([1, 2, 1], [1, 1])) == 3


def test_roots_perfect_square():
    assert univariate_roots(UniPoly([1, -2, 1])) == [(mpc(1), 2)]


def test_roots_of_unity():
    roots = univariate_roots(UniPoly([-1, 0, 0, 0, 1]))
    assert [m for _, m in roots] == [1, 1, 1, 1]
    expected = [mpc(-1), mpc(0, -1), mpc(0, 1), mpc(1)]
    for (r, _), e in zip(roots, expected):
        assert cabs(r - e) < mpfr(2) ** -200


def test_roots_of_fixture_resultant_match_oracle_points(fixture_quartic):
    r = resultant(fixture_quartic, fixture_quartic.dX, eliminate=1)
    roots = [z for z, m in univariate_roots(r)]
    for pair in ORACLES["C_cap_Q"]:
        x = mpc(mpfr(pair[0][0]), mpfr(pair[0][1]))
        assert min(cabs(z - x) for z in roots) < mpfr(10) ** -60


def test_inexact_cluster_merges_double_root():
    p = poly_from_roots([mpc("0.5"), mpc("0.5"), mpc(2, 1), mpc(0)]) * mpc(1)
    roots = univariate_roots(UniPoly([mpc(c) for c in p.c]))
    assert sorted(m for _, m in roots) == [1, 1, 2]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=2, max_size=5), st.integers(1, 3))
def test_resultant_of_product_with_factor_vanishes(coeffs, seed):
    rng = random.Random(seed)
    p = BiPoly({(i, j): mpq(rng.randint(-4, 4), rng.randint(1, 4)) for i in range(2) for j in range(2)}) + BiPoly.parse("X")
    q = BiPoly({(k, 1): mpq(c) for k, c in enumerate(coeffs)}) + BiPoly.parse("X^2 + 1")
    assert resultant(p * q, p, eliminate=0).is_zero()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=1, max_size=6))
def test_roots_multiplicities_and_residuals(gaussian_ints):
    zs = [mpq(a, 2) for a, _ in gaussian_ints]
    p = poly_from_roots(zs)
    out = univariate_roots(p, 256)
    assert sum(m for _, m in out) == p.degree
    scale = sum(cabs(c) for c in p.c)
    for z, _ in out:
        assert cabs(p(z)) < scale * mpfr(2) ** -128
