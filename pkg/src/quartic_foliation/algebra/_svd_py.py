"""Pure-Python one-sided Jacobi SVD on gmpy2 mpc columns (fallback backend)."""

from __future__ import annotations

import gmpy2
from gmpy2 import mpc, mpfr

MAX_SWEEPS = 80


def jacobi_svd_columns(cols: list[list], n_rows: int, want_v: bool = True, prec: int | None = None):
    """Orthogonalize the columns of A in place.

    Returns (cols, V, sweeps) where cols are the columns of A V (mutually
    orthogonal) and V is unitary, given column-wise.
    """
    n = len(cols)
    m = n_rows
    if prec is None:
        prec = gmpy2.get_context().precision
    eps = mpfr(2) ** (-(prec - 8))
    V = None
    if want_v:
        V = [[mpc(1) if i == j else mpc(0) for i in range(n)] for j in range(n)]
    norms = [sum(abs(v) ** 2 for v in c) if m else mpfr(0) for c in cols]
    sweeps = 0
    for sweeps in range(1, MAX_SWEEPS + 1):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                a = norms[p]
                b = norms[q]
                if a == 0 or b == 0:
                    continue
                cp, cq = cols[p], cols[q]
                g = mpc(0)
                for k in range(m):
                    g += cp[k].conjugate() * cq[k]
                ag = abs(g)
                if ag <= eps * gmpy2.sqrt(a * b):
                    continue
                rotated = True
                zeta = (b - a) / (2 * ag)
                t = 1 / (abs(zeta) + gmpy2.sqrt(1 + zeta * zeta))
                if zeta < 0:
                    t = -t
                c = 1 / gmpy2.sqrt(1 + t * t)
                s = c * t
                w = (s / ag) * g.conjugate()
                wc = w.conjugate()
                for k in range(m):
                    x, y = cp[k], cq[k]
                    cp[k] = c * x - w * y
                    cq[k] = wc * x + c * y
                if V is not None:
                    vp, vq = V[p], V[q]
                    for k in range(n):
                        x, y = vp[k], vq[k]
                        vp[k] = c * x - w * y
                        vq[k] = wc * x + c * y
                norms[p] = a - t * ag
                norms[q] = b + t * ag
        norms = [sum(abs(v) ** 2 for v in col) for col in cols]
        if not rotated:
            break
    return cols, V, sweeps
