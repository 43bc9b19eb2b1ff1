"""Roots of univariate polynomials with multiplicities.

Exact input is split into squarefree factors first (Yun), so multiplicities
are exact and every numeric root problem is simple.  Floating input is solved
directly; near-coincident roots are clustered and the cluster centre is
refined by Newton's method on the appropriate derivative.
"""

from __future__ import annotations

import logging

import numpy as np
from gmpy2 import mpc, mpfr

from ..errors import NoConvergence
from .numbers import CLUSTER_TOL_BITS, cabs, resolve_precision, working_precision
from .poly import UniPoly

log = logging.getLogger(__name__)

MAX_ABERTH_ITER = 400


def _horner2(c: list, z):
    """p(z) and p'(z) for coefficients c (constant first)."""
    p = mpc(0)
    dp = mpc(0)
    for v in reversed(c):
        dp = dp * z + p
        p = p * z + v
    return p, dp


def _initial_guesses(c: list) -> list:
    n = len(c) - 1
    top = max(cabs(v) for v in c)
    dbl = [complex(float(v.real / top), float(v.imag / top)) for v in (mpc(x) for x in c)]
    guesses = None
    if dbl[-1] != 0:
        try:
            r = np.roots(dbl[::-1])
            if len(r) == n and np.all(np.isfinite(r)):
                guesses = [complex(z) for z in r]
        except np.linalg.LinAlgError:
            guesses = None
    if guesses is None:
        # Cauchy-style radius on a slightly rotated circle
        lead = abs(dbl[-1]) or 1e-300
        rad = 1 + max(abs(v) for v in dbl[:-1]) / lead
        guesses = [rad * np.exp(2j * np.pi * (k + 0.25) / n) for k in range(n)]
    # separate exact duplicates so the Aberth correction is defined
    seen: dict[complex, int] = {}
    out = []
    for z in guesses:
        k = seen.get(z, 0)
        seen[z] = k + 1
        out.append(mpc(z) * (1 + mpc(k) * mpfr(2) ** -20) + mpc(k) * mpfr(2) ** -30)
    return out


def _aberth(c: list, prec: int) -> tuple[list, bool]:
    """Simultaneous Aberth-Ehrlich iteration; returns (roots, converged)."""
    z = _initial_guesses(c)
    n = len(z)
    tol = mpfr(2) ** (-(prec - 6))
    for _ in range(MAX_ABERTH_ITER):
        biggest = mpfr(0)
        for i in range(n):
            zi = z[i]
            p, dp = _horner2(c, zi)
            if p == 0:
                continue
            if dp == 0:
                ratio_inv = None
            else:
                ratio = p / dp
                s = mpc(0)
                for j in range(n):
                    if j != i:
                        d = zi - z[j]
                        if d != 0:
                            s += 1 / d
                denom = 1 - ratio * s
                w = ratio / denom if denom != 0 else ratio
                ratio_inv = w
            if ratio_inv is None:
                w = mpc(mpfr(2) ** -40, mpfr(2) ** -41)
            z[i] = zi - w
            rel = cabs(w) / max(mpfr(1), cabs(z[i]))
            if rel > biggest:
                biggest = rel
        if biggest <= tol:
            return z, True
    return z, False


def _newton_polish(c: list, z, prec: int, max_iter: int = 80):
    dc = [v * i for i, v in enumerate(c)][1:]
    tol = mpfr(2) ** (-(prec - 4))
    for _ in range(max_iter):
        p = mpc(0)
        for v in reversed(c):
            p = p * z + v
        d = mpc(0)
        for v in reversed(dc):
            d = d * z + v
        if d == 0 or p == 0:
            return z
        step = p / d
        z = z - step
        if cabs(step) <= tol * max(mpfr(1), cabs(z)):
            return z
    return z


def _eval_scale(c: list, z) -> mpfr:
    az = cabs(z)
    acc = mpfr(0)
    for v in reversed(c):
        acc = acc * az + cabs(v)
    return acc


def _solve_simple(c: list, prec: int) -> list:
    """All roots of a polynomial assumed squarefree (floating coefficients, constant first)."""
    n = len(c) - 1
    if n == 0:
        return []
    if n == 1:
        return [-c[0] / c[1]]
    zeros = 0
    while c[zeros] == 0:
        zeros += 1
    core = c[zeros:]
    roots = [mpc(0)] * zeros
    if len(core) > 1:
        z, ok = _aberth(core, prec)
        if not ok:
            log.debug("Aberth iteration hit the cap at degree %d; polishing", len(core) - 1)
        z = [_newton_polish(core, r, prec) for r in z]
        for r in z:
            if cabs(_horner2(core, r)[0]) > _eval_scale(core, r) * mpfr(2) ** (-(prec // 2)):
                raise NoConvergence("root refinement did not converge", degree=len(core) - 1)
        roots.extend(z)
    return roots


def _cluster(z: list, bits: int) -> list[list[int]]:
    n = len(z)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    tol = mpfr(2) ** (-bits)
    for i in range(n):
        for j in range(i + 1, n):
            if cabs(z[i] - z[j]) <= tol * max(mpfr(1), cabs(z[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _solve_with_clusters(c: list, prec: int) -> list[tuple]:
    n = len(c) - 1
    zeros = 0
    while c[zeros] == 0:
        zeros += 1
    core = c[zeros:]
    if len(core) == 1:
        return [(mpc(0), zeros)]
    if len(core) == 2 and not zeros:
        return [(-core[0] / core[1], 1)]
    z, ok = _aberth(core, prec) if len(core) > 2 else ([-core[0] / core[1]], True)
    # exact zeros join the clustering: a chopped constant term can leave a partner root near 0
    z = list(z) + [mpc(0)] * zeros
    out = []
    for group in _cluster(z, CLUSTER_TOL_BITS):
        k = len(group)
        if k == 1:
            r = z[group[0]]
            out.append((r if r == 0 else _newton_polish(c, r, prec), 1))
            continue
        centre = sum((z[i] for i in group), mpc(0)) / k
        deriv = UniPoly(c).diff(k - 1).c
        r = _newton_polish(list(deriv), centre, prec)
        good = True
        lower = UniPoly(c)
        for j in range(k - 1):
            val = lower(r)
            # scale at max(1, |r|): near 0 the local value of the coefficients says nothing
            if cabs(val) > _eval_scale(list(lower.c), max(mpfr(1), cabs(r))) * mpfr(2) ** (-(prec // 2)):
                good = False
                break
            lower = lower.diff()
        if good:
            out.append((r, k))
        else:
            out.extend((_newton_polish(c, z[i], prec), 1) for i in group)
    if sum(m for _, m in out) != n:
        raise NoConvergence("multiplicities do not add up to the degree", degree=n)
    return out


def univariate_roots(p: UniPoly, precision_bits: int | None = None) -> list[tuple[mpc, int]]:
    """Roots of p with multiplicities, sorted by (real, imaginary) part."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no finite root set")
    prec = resolve_precision(precision_bits)
    if p.degree < 1:
        return []
    with working_precision(prec):
        if p.is_exact():
            out = []
            for s, k in p.squarefree_decomposition():
                for r in _solve_simple([mpc(v) for v in s.c], prec):
                    out.append((r, k))
        else:
            out = _solve_with_clusters([mpc(v) for v in p.c], prec)
    out.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return out


__all__ = ["univariate_roots"]
