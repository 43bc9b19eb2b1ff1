"""Divisors sum m_j Q_j - L D_inf on Q and their principality.

A divisor of this shape is treated as principal when some degree-L curve,
not a multiple of F, vanishes along Q to order m_j at every Q_j."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from gmpy2 import mpc, mpfr, mpq

from .algebra.linalg import DEFAULT_POLICY, RankCertificate, TolPolicy, nullspace
from .algebra.numbers import cabs, current_precision, num_from_json, num_to_json
from .algebra.poly import BiPoly, monomials
from .algebra.series import Series1
from .errors import UnbalancedTrace
from .geometry import IntersectionRecord, curve_germ, local_order

MAX_CLASS_ORDER = 8


@dataclass
class Divisor:
    entries: list  # (IntersectionRecord, coeff)
    infinity_coeff: int

    @property
    def points(self) -> list:
        return [rec.point for rec, _ in self.entries]

    @property
    def degree_affine(self) -> int:
        return sum(c for _, c in self.entries)

    def balanced(self, quartic_degree: int = 4) -> bool:
        return self.degree_affine == quartic_degree * self.infinity_coeff

    def scaled(self, k: int) -> "Divisor":
        return Divisor([(rec, c * k) for rec, c in self.entries], self.infinity_coeff * k)

    def to_json(self) -> dict:
        return {
            "points": [{"xy": [num_to_json(v) for v in rec.point], "m": c} for rec, c in self.entries],
            "Linf": self.infinity_coeff,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Divisor":
        entries = []
        for p in obj["points"]:
            pt = tuple(num_from_json(v) for v in p["xy"])
            entries.append((IntersectionRecord(pt, int(p["m"]), False, mpfr(0)), int(p["m"])))
        return cls(entries, int(obj["Linf"]))

    @classmethod
    def from_points(cls, points: list, m: int, L: int) -> "Divisor":
        return cls([(IntersectionRecord(tuple(p), m, False, mpfr(0)), m) for p in points], L)


@dataclass
class PrincipalityVerdict:
    principal: bool
    witness: BiPoly | None
    kernel_dim: int
    cert: RankCertificate
    f_multiples_dim: int
    kernel: list = field(repr=False, default_factory=list)
    witness_orders: list | None = None

    def to_json(self) -> dict:
        return {
            "principal": self.principal,
            "kernel_dim": self.kernel_dim,
            "f_multiples_dim": self.f_multiples_dim,
            "gap_ratio": self.cert.to_json()["gap_ratio"],
            "log10_gap_ratio": self.cert.to_json()["log10_gap_ratio"],
            "rank": self.cert.rank,
            "witness": None if self.witness is None else self.witness.to_text(),
            "witness_orders": self.witness_orders,
        }


def trace_divisor(F, G: BiPoly, singular_points: list) -> Divisor:
    """m_j = order of G along Q at each point; L = sum m_j / 4."""
    from .localform import adapted_chart, localize_form, normal_form

    Fp = F.F if hasattr(F, "F") else F
    zero = BiPoly()
    entries = []
    for P in singular_points:
        pt = P.point if isinstance(P, IntersectionRecord) else tuple(P)
        chart = adapted_chart(Fp, pt)
        m = normal_form(localize_form(Fp, G, zero, zero, chart)).m
        entries.append((IntersectionRecord(pt, m, False, mpfr(0)), m))
    total = sum(m for _, m in entries)
    if total % 4:
        raise UnbalancedTrace("sum of multiplicities is not divisible by 4", total=total)
    return Divisor(entries, total // 4)


def _condition_rows(F: BiPoly, pt: tuple, m: int, mons: list) -> list[list]:
    """Rows k = 0..m-1: k-th Taylor coefficient of t -> X^i Y^j along the germ of Q at pt."""
    if m <= 0:
        return []
    dx, dy, _ = curve_germ(F, pt, m - 1)
    xs = Series1([pt[0]], m - 1) + dx
    ys = Series1([pt[1]], m - 1) + dy
    dmax = max(i + j for i, j in mons)
    xp = [Series1([mpq(1)], m - 1)]
    yp = [Series1([mpq(1)], m - 1)]
    for _ in range(dmax):
        xp.append(xp[-1] * xs)
        yp.append(yp[-1] * ys)
    cols = [(xp[i] * yp[j]).c for i, j in mons]
    return [[mpc(col[k]) if k < len(col) else mpc(0) for col in cols] for k in range(m)]


def _row_normalize(rows: list[list]) -> list[list]:
    out = []
    for row in rows:
        s = max(cabs(v) for v in row)
        out.append([v / s for v in row] if s > 0 else row)
    return out


def interpolation_space(F, divisor: Divisor, degree: int | None = None, policy: TolPolicy = DEFAULT_POLICY):
    """Kernel basis of {P : deg P <= L, P vanishes to order m_j along Q at Q_j}, with certificate."""
    Fp = F.F if hasattr(F, "F") else F
    L = divisor.infinity_coeff if degree is None else degree
    mons = monomials(L)
    rows = []
    for rec, m in divisor.entries:
        rows.extend(_condition_rows(Fp, rec.point, m, mons))
    if not rows:
        return [[mpc(1) if k == i else mpc(0) for k in range(len(mons))] for i in range(len(mons))], None
    basis, cert = nullspace(_row_normalize(rows), policy)
    return basis, cert


def _vec_to_poly(v: list, L: int) -> BiPoly:
    return BiPoly({mon: c for mon, c in zip(monomials(L), v)})


def f_multiples(F: BiPoly, L: int) -> list[list]:
    if L < 4:
        return []
    mons = monomials(L)
    return [(F * BiPoly({mon: 1})).vector(mons) for mon in monomials(L - 4)]


def f_multiples_dim(L: int) -> int:
    return math.comb(L - 2, 2) if L >= 4 else 0


def is_principal(F, divisor: Divisor, policy: TolPolicy = DEFAULT_POLICY, check_orders: bool = True) -> PrincipalityVerdict:
    Fp = F.F if hasattr(F, "F") else F
    L = divisor.infinity_coeff
    basis, cert = interpolation_space(Fp, divisor, L, policy)
    kdim = len(basis)
    fdim = f_multiples_dim(L)
    principal = kdim > fdim
    witness = None
    orders = None
    if principal:
        witness = _witness(Fp, basis, L, policy)
        if check_orders:
            orders = [local_order(Fp, witness, rec.point, m + 2) for rec, m in divisor.entries]
    return PrincipalityVerdict(principal, witness, kdim, cert, fdim, basis, orders)


def _witness(F: BiPoly, basis: list[list], L: int, policy: TolPolicy) -> BiPoly:
    """A kernel element orthogonal to the multiples of F, scaled to max coefficient 1."""
    W = f_multiples(F, L)
    if W:
        # coefficients c with <w_i, sum c_j b_j> = 0 for every multiple w_i
        M = [[sum((wv.conjugate() * bv for wv, bv in zip(w, b)), mpc(0)) for b in basis] for w in W]
        sub, _ = nullspace(_row_normalize(M), policy)
        c = sub[0]
    else:
        c = [mpc(1)] + [mpc(0)] * (len(basis) - 1)
    v = [sum((cj * b[i] for cj, b in zip(c, basis)), mpc(0)) for i in range(len(basis[0]))]
    big = max(v, key=cabs)
    return _vec_to_poly([x / big for x in v], L).chop(current_precision() // 2)


def class_order(F, divisor: Divisor, max_m: int = MAX_CLASS_ORDER, policy: TolPolicy = DEFAULT_POLICY) -> int | None:
    if max_m > MAX_CLASS_ORDER:
        raise ValueError(f"max_m is capped at {MAX_CLASS_ORDER}")
    for k in range(1, max_m + 1):
        if is_principal(F, divisor.scaled(k), policy, check_orders=False).principal:
            return k
    return None
