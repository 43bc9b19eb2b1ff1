import random

import pytest
from gmpy2 import mpc, mpfr

from quartic_foliation.algebra.numbers import cabs
from quartic_foliation.algebra.poly import BiPoly
from quartic_foliation.divisors import (
    Divisor,
    class_order,
    f_multiples_dim,
    interpolation_space,
    is_principal,
    trace_divisor,
)
from quartic_foliation.errors import UnbalancedTrace
from quartic_foliation.geometry import intersect_curves, local_order
from quartic_foliation.preregularity import decompose_prop1, divisor_verdicts


@pytest.fixture(scope="module")
def verdicts(scenario):
    # module fixtures run outside the per-test precision context, so let the scenario pin it
    dv = divisor_verdicts(scenario)
    return dv.D, dv.twoD


def test_f_multiples_dim():
    assert [f_multiples_dim(L) for L in (3, 4, 5, 8)] == [0, 1, 3, 15]


def test_D_is_not_principal(verdicts):
    v1, _ = verdicts
    assert not v1.principal and v1.kernel_dim == v1.f_multiples_dim == 1
    assert v1.cert.gap_ratio > mpfr(10) ** 20


def test_2D_is_principal_with_witness_G(scenario, verdicts):
    _, v2 = verdicts
    assert v2.principal and v2.kernel_dim == 16 and v2.f_multiples_dim == 15
    assert v2.cert.gap_ratio > mpfr(10) ** 20
    assert all(o >= 2 for o in v2.witness_orders)
    c, k = decompose_prop1(v2.witness, scenario.G, scenario.F)
    assert cabs(c) > 0


def test_class_orders(scenario, pencil_pair):
    assert class_order(scenario.F, scenario.divisor(1), max_m=2) == 2
    F, F2 = pencil_pair
    D = Divisor([(r, 1) for r in intersect_curves(F, F2)], 4)
    assert class_order(F, D, max_m=1) == 1


def test_generic_points_are_not_torsion_quickly(scenario):
    # 16 points cut by a random quartic then one replaced by another point of Q
    rng = random.Random(4)
    H = BiPoly({(i, j): mpc(rng.randint(-5, 5)) for i in range(5) for j in range(5 - i)})
    recs = intersect_curves(scenario.F, H)
    assert len(recs) == 16
    D = Divisor([(r, 1) for r in recs], 4)
    assert is_principal(scenario.F, D).principal
    moved = Divisor([(r, 1) for r in recs[:15]] + [(scenario.divisor(1).entries[0][0], 1)], 4)
    assert not is_principal(scenario.F, moved).principal


def test_relabeling_does_not_change_verdict(scenario):
    D = scenario.divisor(1)
    rev = Divisor(list(reversed(D.entries)), D.infinity_coeff)
    a, b = interpolation_space(scenario.F, D)[0], interpolation_space(scenario.F, rev)[0]
    assert len(a) == len(b)


def test_trace_divisor(scenario):
    D = trace_divisor(scenario.F, scenario.G, scenario.points)
    assert [m for _, m in D.entries] == [2] * 16 and D.infinity_coeff == 8


def test_unbalanced_trace(scenario):
    with pytest.raises(UnbalancedTrace):
        trace_divisor(scenario.F, scenario.G, scenario.points[:15])


def test_json_round_trip(scenario):
    D = scenario.divisor(1)
    back = Divisor.from_json(D.to_json())
    assert back.infinity_coeff == 4 and len(back.entries) == 16
    for p, q in zip(D.points, back.points):
        assert cabs(p[0] - q[0]) + cabs(p[1] - q[1]) < mpfr(2) ** -200
    assert back.balanced()


def test_local_order_of_G(scenario):
    for p in scenario.points:
        assert local_order(scenario.F, scenario.G, p, 4) == 2
