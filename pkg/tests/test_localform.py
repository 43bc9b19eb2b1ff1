import math
import random

import pytest
from gmpy2 import mpc, mpfr, mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ORACLES
from models import random_local_model
from quartic_foliation.algebra.numbers import cabs
from quartic_foliation.algebra.poly import BiPoly
from quartic_foliation.algebra.series import Series2
from quartic_foliation.errors import DegenerateTangency, ResidueUndefined
from quartic_foliation.localform import (
    NormalForm,
    adapted_chart,
    analyze_point,
    blow_up_once,
    camacho_sad,
    chart_residual_at,
    jet_conditions,
    jet_verdict,
    localize_form,
    normal_form,
)
from quartic_foliation.preregularity import check_point

N = 6


def P(text):
    return BiPoly.parse(text)


def S(d, order=N):
    return Series2(order, {k: mpq(v) for k, v in d.items()})


def model(g0, at=None, be=None, gt=None):
    g0 = [mpq(v) for v in g0]
    return NormalForm.from_series(g0 + [mpq(0)] * (N + 1 - len(g0)), S(gt or {}), S(at or {}), S(be or {}))


def test_chart_of_a_line():
    ch = adapted_chart(P("Y"), (mpq(0), mpq(0)))
    assert [(k, v) for k, v in ch.l.items() if v != 0] == [((0, 1), 1)]


def test_chart_of_a_parabola():
    ch = adapted_chart(P("Y - X^2"), (mpq(0), mpq(0)))
    assert ch.jet(2, 0) == 2 and ch.jet(1, 0) == 0 and ch.jet(0, 1) == 1
    assert [(k, v) for k, v in ch.l.items() if v != 0] == [((0, 1), 1), ((2, 0), 1)]


@pytest.mark.parametrize("seed", sorted(ORACLES["chart_jets"]))
def test_chart_jets_match_sympy(seed):
    entry = ORACLES["chart_jets"][seed]
    F = BiPoly({(i, j): mpq(c) for i, j, c in entry["F_terms"]})
    ch = adapted_chart(F, (mpq(0), mpq(0)), order=4)
    for key, val in entry["l"].items():
        r, s = map(int, key.split(","))
        assert ch.l[r, s] == mpq(val)


def test_chart_first_and_second_order_closed_forms(scenario):
    F = scenario.F
    for p in scenario.points:
        ch = adapted_chart(F, p)
        fx, fy = F.dX(*p), F.dY(*p)
        fxx, fxy, fyy = F.dX.dX(*p), F.dX.dY(*p), F.dY.dY(*p)
        ly, lx = ch.jet(0, 1), ch.jet(1, 0)
        tol = mpfr(2) ** -128
        assert cabs(ly - 1 / fy) < tol * cabs(ly)
        assert cabs(lx + fx / fy) < tol * (cabs(lx) + 1)
        assert cabs(ch.jet(0, 2) + fyy * ly**2 / fy) < tol * (cabs(ch.jet(0, 2)) + 1)
        assert cabs(ch.jet(1, 1) + (fxy * ly + fyy * lx * ly) / fy) < tol * (cabs(ch.jet(1, 1)) + 1)
        assert cabs(ch.jet(2, 0) + (fxx + 2 * fxy * lx + fyy * lx**2) / fy) < tol * (cabs(ch.jet(2, 0)) + 1)


def test_chart_residual_slope(scenario):
    F = scenario.F
    for p in scenario.points[:4] + scenario.points[12:13]:
        ch = adapted_chart(F, p)
        rhos = [mpfr(10) ** -k for k in (3, 4, 5)]
        res = [chart_residual_at(ch, r * mpc(mpfr("0.6"), mpfr("0.3")), r * mpc(mpfr("-0.4"), mpfr("0.5"))) for r in rhos]
        slopes = [float((math.log10(res[i]) - math.log10(res[i + 1])) / 1.0) for i in range(2)]
        assert all(abs(s - (N + 1)) < 0.2 for s in slopes)


def test_localize_with_zero_foliation_data(scenario):
    p = scenario.points[0]
    ch = adapted_chart(scenario.F, p)
    z = BiPoly()
    loc = localize_form(scenario.F, scenario.G, z, z, ch)
    assert all(v == 0 for _, v in loc.alpha.items()) and all(v == 0 for _, v in loc.beta.items())
    assert normal_form(loc).m == 2


def test_pencil_beta_at_base_point(pencil_pair):
    from quartic_foliation.geometry import intersect_curves
    from quartic_foliation.localform import swap_form

    F, F2 = pencil_pair
    p = intersect_curves(F, F2)[0].point
    ch = adapted_chart(F, p)
    G, A, B = F2, F2.dY, -F2.dX
    q = p
    if ch.swapped:
        G, A, B = swap_form(G, A, B)
        q = (p[1], p[0])
    loc = localize_form(F, F2, F2.dY, -F2.dX, ch)
    # beta(0,0) = B - l_x A; nonzero since the two quartics cross transversally
    direct = B(*q) - ch.jet(1, 0) * A(*q)
    assert cabs(loc.beta[0, 0] - direct) < mpfr(2) ** -200
    assert cabs(direct) > mpfr(10) ** -10


def test_normal_form_examples():
    nf = model([0, 0, 1])
    assert nf.m == 2 and nf.lam == 1 and nf.lam_field == -1
    assert all(v == 0 for _, v in nf.alpha_tilde.items())
    # g = x^2 + y x, alpha = x  ->  g~ = x, alpha~ = 0
    g = S({(2, 0): 1, (1, 1): 1}, N + 1)
    loc_alpha = S({(1, 0): 1})
    from quartic_foliation.localform import LocalForm

    nf2 = normal_form(LocalForm(g, loc_alpha, S({}), None))
    assert nf2.g_tilde[1, 0] == 1 and all(v == 0 for _, v in nf2.alpha_tilde.items())


def test_degenerate_tangency():
    with pytest.raises(DegenerateTangency):
        model([0, 0, 0])


def test_fixture_points_have_multiplicity_two(scenario):
    z = BiPoly()
    for p in scenario.points:
        _, _, nf = analyze_point(scenario.F, scenario.G, z, z, p)
        assert nf.m == 2


def test_radial_surrogate():
    # x' = x, y' = y: g(x, 0) = -x, beta = 1
    nf = model([0, -1], be={(0, 0): 1})
    bu = blow_up_once(nf)
    assert bu.q_corner_regular and bu.e_invariant is False
    assert camacho_sad(nf) == 1


def test_preregular_model():
    # lam = 1, all conditions of the m = 2 set satisfied with a nonzero beta_y = alpha~_x
    nf = model([0, 0, 1], at={(1, 0): 3}, be={(1, 0): -1, (0, 1): 3})
    ok, conds = jet_verdict(nf)
    assert ok and set(conds) == {"alpha_tilde", "beta", "beta_y-alpha_tilde_x", "alpha_tilde_y", "beta_x+lambda"}
    assert blow_up_once(nf).q_corner_regular
    assert camacho_sad(nf) == 1


def test_violating_beta_gives_singular_corner():
    nf = model([0, 0, 1], at={(1, 0): 3}, be={(0, 0): mpq(1, 10), (1, 0): -1, (0, 1): 3})
    assert not jet_verdict(nf)[0]
    assert not blow_up_once(nf).q_corner_regular


def test_index_two():
    nf = model([0, 0, 1], be={(1, 0): -2})
    assert camacho_sad(nf) == 2


def test_residue_needs_enough_jets():
    nf = NormalForm.from_series([mpq(0), mpq(0), mpq(1)], S({}, 1), S({}, 1), S({}, 0))
    with pytest.raises(ResidueUndefined):
        camacho_sad(nf)


def test_m3_conditions_are_flagged_partial():
    nf = model([0, 0, 0, 1], be={(2, 0): -1})
    assert nf.partial and nf.m == 3
    conds = jet_conditions(nf)
    assert "beta[2,0]+lambda" in conds
    ok, _ = jet_verdict(nf)
    assert ok == blow_up_once(nf).q_corner_regular


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([None, None, 0, 1, 2, 3, 4]))
def test_consistency_triangle(seed, broken):
    F, G, A, B, expected = random_local_model(seed, broken)
    rep = check_point(F, G, A, B, (mpq(0), mpq(0)), label=f"seed{seed}")
    assert rep.m == 2
    assert rep.jet_ok == rep.point_ok == rep.blowup_regular == expected
    if expected:
        assert rep.cs_index == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10**6))
def test_blowup_agrees_with_divisibility_for_general_m(m, seed):
    rng = random.Random(seed)
    lam = mpq(rng.choice([-3, -1, 2, 5]), rng.randint(1, 3))
    g0 = [mpq(0)] * m + [lam] + [mpq(rng.randint(-2, 2)) for _ in range(N - m)]
    at = {(r, s): mpq(rng.randint(-2, 2)) for r in range(N) for s in range(N - r)}
    be = {(r, s): mpq(rng.randint(-2, 2)) for r in range(N) for s in range(N - r)}
    if rng.random() < 0.6:
        # force the degree <= m - 1 conditions
        for k in range(m - 1):
            for r in range(k + 1):
                at[(r, k - r)] = mpq(0)
                be[(r, k - r)] = mpq(0)
        be[(m - 1, 0)] = -lam
        for s in range(1, m):
            be[(m - 1 - s, s)] = at[(m - s, s - 1)]
        at[(0, m - 1)] = mpq(0)
    nf = NormalForm.from_series(g0, S({}, N - 1), S(at, N - 1), S(be, N - 1))
    ok, _ = jet_verdict(nf)
    assert ok == blow_up_once(nf).q_corner_regular
