"""Backend selection for the Jacobi SVD.

The compiled MPFR kernel is used when it imports; setting the environment
variable QUARTIC_FOLIATION_PURE_PYTHON=1 forces the gmpy2 fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr

from . import _svd_py
from .numbers import current_precision

try:
    from . import _svdcore  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on the build
    _svdcore = None

if os.environ.get("QUARTIC_FOLIATION_PURE_PYTHON") == "1":
    _svdcore = None

BACKEND = "cython" if _svdcore is not None else "python"


@dataclass
class SVD:
    sigma: list  # mpfr, descending
    U: list  # columns (lists of mpc) for sigma > 0, else None entries
    V: list | None  # columns of the right singular matrix, aligned with sigma
    sweeps: int
    backend: str


def _hex(x: mpfr) -> str:
    if x == 0:
        return "0"
    mant, exp = x.as_mantissa_exp()
    return f"{int(mant):x}p{int(exp)}"


def _unhex(pair) -> mpfr:
    h, e = pair
    if h == "0":
        return mpfr(0)
    return gmpy2.mul_2exp(mpfr(int(h, 16)), e)


def available_backends() -> list[str]:
    return ["cython", "python"] if _svdcore is not None else ["python"]


def jacobi_svd(rows: list[list], want_v: bool = True, backend: str | None = None) -> SVD:
    """Singular value decomposition of a complex matrix given by rows."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    prec = current_precision()
    backend = backend or BACKEND
    cols = [[mpc(rows[i][j]) for i in range(m)] for j in range(n)]
    if backend == "cython":
        if _svdcore is None:
            raise RuntimeError("compiled SVD kernel is not available")
        re = [_hex(cols[j][i].real) for j in range(n) for i in range(m)]
        im = [_hex(cols[j][i].imag) for j in range(n) for i in range(m)]
        cre, cim, vre, vim, sweeps = _svdcore.jacobi_svd(re, im, m, n, prec, want_v)
        cols = [[mpc(_unhex(cre[j * m + i]), _unhex(cim[j * m + i])) for i in range(m)] for j in range(n)]
        V = None
        if want_v:
            V = [[mpc(_unhex(vre[j * n + i]), _unhex(vim[j * n + i])) for i in range(n)] for j in range(n)]
    elif backend == "python":
        cols, V, sweeps = _svd_py.jacobi_svd_columns(cols, m, want_v, prec)
    else:
        raise ValueError(f"unknown SVD backend {backend!r}")
    norms = [gmpy2.sqrt(sum((abs(v) ** 2 for v in c), mpfr(0))) for c in cols]
    order = sorted(range(n), key=lambda j: -norms[j])
    sigma = [norms[j] for j in order]
    U = [[v / norms[j] for v in cols[j]] if norms[j] > 0 else None for j in order]
    Vs = [V[j] for j in order] if V is not None else None
    return SVD(sigma, U, Vs, sweeps, backend)
