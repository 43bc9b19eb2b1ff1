import random

import pytest
from gmpy2 import mpc, mpfr, mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ORACLES
from quartic_foliation.algebra.linalg import (
    TolPolicy,
    certify_rank,
    matvec,
    normalize_rows,
    nullspace,
    rank,
    solve_or_refute,
    solve_square,
    vnorm,
)
from quartic_foliation.algebra.numbers import cabs, working_precision
from quartic_foliation.algebra.svd import available_backends, jacobi_svd
from quartic_foliation.errors import AmbiguousRank


def eye(n):
    return [[mpc(int(i == j)) for j in range(n)] for i in range(n)]


def test_identity_has_full_rank():
    basis, cert = nullspace(eye(3))
    assert basis == [] and cert.rank == 3


def test_zero_matrix_kernel_is_everything():
    basis, cert = nullspace([[mpc(0)] * 4 for _ in range(2)])
    assert len(basis) == 4 and cert.rank == 0


def test_solve_identity():
    out = solve_or_refute(eye(3), [mpc(1), mpc(0), mpc(0)])
    assert out.feasible and out.rank_jump == 0
    assert all(cabs(a - b) < mpfr(2) ** -200 for a, b in zip(out.solution, [1, 0, 0]))


def test_refute_zero_matrix():
    out = solve_or_refute([[mpc(0)] * 2 for _ in range(2)], [mpc(1), mpc(0)])
    assert not out.feasible and out.margin == 1 and out.rank_jump == 1


def test_ambiguous_rank_is_an_error():
    m = [[mpc(1), mpc(0)], [mpc(0), mpc(mpfr(2) ** -110)]]
    with pytest.raises(AmbiguousRank):
        rank(m)
    # a coarser policy accepts the same matrix
    assert rank(m, TolPolicy(rank_bits=40, min_gap=2.0**10)).rank == 1


def test_certificate_fields():
    cert = certify_rank([mpfr(3), mpfr(1), mpfr(0)])
    assert cert.rank == 2 and cert.gap_ratio == float("inf")
    assert cert.to_json()["gap_ratio"] == "inf"


def grid_rows(L, n):
    pts = [(i, j) for i in range(1, 5) for j in range(1, 5)][:n]
    mons = [(a, t - a) for t in range(L + 1) for a in range(t, -1, -1)]
    return normalize_rows([[mpc(mpq(x) ** a * mpq(y) ** b) for a, b in mons] for x, y in pts])


@pytest.mark.parametrize("key", sorted(ORACLES["grid_kernel_dims"]))
def test_kernel_dims_match_exact_elimination(key):
    L, n = int(key[1]), int(key.split("_n")[1])
    basis, cert = nullspace(grid_rows(L, n))
    assert len(basis) == ORACLES["grid_kernel_dims"][key]
    assert cert.gap_ratio > mpfr(10) ** 20


def test_solve_square():
    x = solve_square([[2, 1], [1, 3]], [3, 5])
    assert cabs(x[0] - mpq(4, 5)) < mpfr(2) ** -200 and cabs(x[1] - mpq(7, 5)) < mpfr(2) ** -200
    assert solve_square([[1, 2], [2, 4]], [1, 1]) is None


@pytest.mark.parametrize("backend", available_backends())
def test_svd_backends_reconstruct(backend):
    rng = random.Random(5)
    A = [[mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(4)] for _ in range(6)]
    s = jacobi_svd(A, backend=backend)
    assert s.backend == backend
    assert all(a >= b for a, b in zip(s.sigma, s.sigma[1:]))
    for k in range(4):
        Av = matvec(A, s.V[k])
        assert vnorm([a - s.sigma[k] * u for a, u in zip(Av, s.U[k])]) < mpfr(2) ** -240


def test_backends_agree():
    if len(available_backends()) < 2:
        pytest.skip("compiled kernel not built")
    rng = random.Random(9)
    A = [[mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(7)] for _ in range(9)]
    a = jacobi_svd(A, backend="cython")
    b = jacobi_svd(A, backend="python")
    assert all(abs(x - y) < mpfr(2) ** -240 for x, y in zip(a.sigma, b.sigma))


def test_unknown_backend():
    with pytest.raises(ValueError):
        jacobi_svd(eye(2), backend="fortran")


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 6), st.integers(1, 5), st.integers(0, 10**6))
def test_nullspace_vectors_are_orthonormal_kernel(n, r, seed):
    r = min(r, n - 1)
    rng = random.Random(seed)
    with working_precision(256):
        B = [[mpc(rng.randint(-5, 5), rng.randint(-5, 5)) for _ in range(n)] for _ in range(r)]
        W = [[mpc(rng.randint(-3, 3)) for _ in range(r)] for _ in range(n + 1)]
        M = [[sum((W[i][k] * B[k][j] for k in range(r)), mpc(0)) for j in range(n)] for i in range(n + 1)]
        if all(v == 0 for row in M for v in row):
            return
        try:
            basis, cert = nullspace(M)
        except AmbiguousRank:
            return
        scale = max(vnorm(row) for row in M)
        for v in basis:
            assert vnorm(matvec(M, v)) <= scale * mpfr(2) ** -128
        for i, u in enumerate(basis):
            for j, v in enumerate(basis):
                ip = sum((a.conjugate() * b for a, b in zip(u, v)), mpc(0))
                assert cabs(ip - (1 if i == j else 0)) < mpfr(2) ** -200
