"""Sylvester resultants of bivariate polynomials.

The resultant is computed by evaluating the Sylvester determinant at enough
values of the surviving variable and interpolating.  Rational input stays
exact (integer nodes, fraction-free elimination, Newton interpolation);
floating input uses roots-of-unity nodes and an inverse DFT.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from ..errors import BothZeroDegree
from .numbers import cabs, current_precision
from .poly import BiPoly, UniPoly


def sylvester(f: list, g: list) -> list[list]:
    """Sylvester matrix of f, g given as coefficient lists (constant first)."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    zero = mpq(0)
    rows = []
    for i in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(f)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(g)):
            row[i + k] = c
        rows.append(row)
    return rows


def det_bareiss(a: list[list]) -> mpq:
    """Fraction-free determinant of an exact square matrix."""
    n = len(a)
    if n == 0:
        return mpq(1)
    m = [list(map(mpq, row)) for row in a]
    sign = 1
    prev = mpq(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return mpq(0)
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) / prev
            row_i[k] = mpq(0)
        prev = pivot
    return sign * m[n - 1][n - 1]


def det_pivot(a: list[list]):
    """Determinant by Gaussian elimination with partial pivoting (floating input)."""
    n = len(a)
    m = [[mpc(v) for v in row] for row in a]
    det = mpc(1)
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(m[i][k]))
        if m[p][k] == 0:
            return mpc(0)
        if p != k:
            m[k], m[p] = m[p], m[k]
            det = -det
        pivot = m[k][k]
        det *= pivot
        inv = 1 / pivot
        row_k = m[k]
        for i in range(k + 1, n):
            f = m[i][k] * inv
            if f == 0:
                continue
            row_i = m[i]
            for j in range(k + 1, n):
                row_i[j] -= f * row_k[j]
    return det


def _newton_interpolate(xs: list, ys: list) -> UniPoly:
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = UniPoly([coef[-1]])
    for i in range(n - 2, -1, -1):
        poly = poly * UniPoly([-xs[i], 1]) + UniPoly([coef[i]])
    return poly


def resultant(p: BiPoly, q: BiPoly, eliminate: int = 1) -> UniPoly:
    """Res_v(p, q) as a polynomial in the other variable; ``eliminate`` is 0 for X, 1 for Y."""
    if eliminate not in (0, 1):
        raise ValueError("eliminate must be 0 (X) or 1 (Y)")
    pc = p.coeffs_in(eliminate)
    qc = q.coeffs_in(eliminate)
    if not pc or not qc:
        return UniPoly()
    m, n = len(pc) - 1, len(qc) - 1
    if m == 0 and n == 0:
        raise BothZeroDegree("both polynomials are free of the eliminated variable")
    other = 1 - eliminate
    bound = min(
        int(p.degree()) * int(q.degree()),
        n * int(p.degree_in(other)) + m * int(q.degree_in(other)),
    )
    exact = p.is_exact() and q.is_exact()
    npts = bound + 1
    if exact:
        nodes = [mpq(k) for k in range(npts)]
        vals = [det_bareiss(sylvester([c(w) for c in pc], [c(w) for c in qc])) for w in nodes]
        return _newton_interpolate(nodes, vals)
    prec = current_precision()
    with gmpy2.context(gmpy2.get_context(), precision=prec + 32, real_prec=prec + 32, imag_prec=prec + 32):
        two_pi = 2 * gmpy2.const_pi()
        nodes = [gmpy2.exp(mpc(0, two_pi * k / npts)) for k in range(npts)]
        pcm = [c for c in pc]
        qcm = [c for c in qc]
        vals = [det_pivot(sylvester([c(w) for c in pcm], [c(w) for c in qcm])) for w in nodes]
        coeffs = []
        for j in range(npts):
            acc = mpc(0)
            for k in range(npts):
                acc += vals[k] * nodes[(-j * k) % npts]
            coeffs.append(acc / npts)
    coeffs = [mpc(c) for c in coeffs]
    top = max((cabs(c) for c in coeffs), default=mpfr(0))
    if top == 0:
        return UniPoly()
    cut = top * mpfr(2) ** (-(3 * prec) // 4)
    while coeffs and cabs(coeffs[-1]) <= cut:
        coeffs.pop()
    return UniPoly(coeffs)
