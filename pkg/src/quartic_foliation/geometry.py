"""Plane quartics: validation, intersections with multiplicity, points at
infinity, bitangent lines and the projective change that puts a bitangent
pair in the form Y + aX, Y + aX + b."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr, mpq

from .algebra.linalg import solve_square
from .algebra.numbers import (
    cabs,
    current_precision,
    is_exact,
    num_to_json,
    resolve_precision,
    tiny,
    working_precision,
)
from .algebra.poly import ONE, BiPoly, UniPoly, X, Y
from .algebra.resultant import resultant
from .algebra.roots import univariate_roots
from .algebra.series import Series1, compose_poly_curve
from .errors import (
    DegenerateNormalization,
    NoConvergence,
    NormalizationBreaksTransversality,
    NotDegree4,
    SharedComponent,
    SingularCurve,
    SolverIncomplete,
    TangentAtInfinity,
)

log = logging.getLogger(__name__)

Point = tuple  # (x, y) of mpc / mpq


# ---------------------------------------------------------------- types

@dataclass(eq=False)
class Quartic:
    F: BiPoly
    smooth: bool = False
    transverse_at_infinity: bool = False

    def __post_init__(self):
        self.FX = self.F.dX
        self.FY = self.F.dY

    def to_json(self) -> dict:
        return {"text": self.F.to_text(), "smooth": self.smooth, "transverse_at_infinity": self.transverse_at_infinity}


@dataclass
class IntersectionRecord:
    point: Point
    multiplicity: int
    at_infinity: bool = False
    residual: mpfr | None = None

    def to_json(self) -> dict:
        if self.at_infinity:
            return {"dir": [num_to_json(v) for v in self.point], "inf": True, "m": self.multiplicity}
        return {"xy": [num_to_json(v) for v in self.point], "m": self.multiplicity}


@dataclass
class Bitangent:
    line: BiPoly
    coeffs: tuple  # (alpha, beta, gamma) of alpha X + beta Y + gamma
    tangency_points: tuple
    square: tuple  # (p, q, r) with F restricted = (p s^2 + q s + r)^2
    residual: mpfr
    swapped: bool = False

    def to_json(self) -> dict:
        return {
            "line": self.line.to_text(),
            "swapped_chart": self.swapped,
            "tangency_points": [t.to_json() for t in self.tangency_points],
            "square_residual": float(self.residual),
        }


@dataclass
class ProjectiveChange:
    """New homogeneous coordinates are matrix @ (X, Y, Z)."""

    matrix: list
    inverse: list = field(default=None)

    def __post_init__(self):
        if self.inverse is None:
            self.inverse = _inv3(self.matrix)

    @classmethod
    def identity(cls) -> "ProjectiveChange":
        e = [[mpq(int(i == j)) for j in range(3)] for i in range(3)]
        return cls(e, [row[:] for row in e])

    def is_identity(self) -> bool:
        return all(self.matrix[i][j] == (1 if i == j else 0) for i in range(3) for j in range(3))

    def check(self) -> mpfr:
        """max |M M^-1 - I|."""
        worst = mpfr(0)
        for i in range(3):
            for j in range(3):
                v = sum((self.matrix[i][k] * self.inverse[k][j] for k in range(3)), mpq(0)) - (1 if i == j else 0)
                worst = max(worst, cabs(v))
        return worst

    def apply_point(self, pt: Point) -> Point:
        v = [pt[0], pt[1], 1]
        w = [sum((self.matrix[i][k] * v[k] for k in range(3)), mpq(0)) for i in range(3)]
        return (w[0] / w[2], w[1] / w[2])

    def apply_poly(self, P: BiPoly, degree: int | None = None) -> BiPoly:
        """The affine polynomial P'(x', y') = P^h(M^-1 (x', y', 1))."""
        d = int(P.degree()) if degree is None else degree
        inv = self.inverse
        lin = [X * inv[i][0] + Y * inv[i][1] + inv[i][2] for i in range(3)]
        return homogeneous_substitute(P, d, lin[0], lin[1], lin[2])

    def apply_line(self, L: tuple) -> tuple:
        inv = self.inverse
        return tuple(sum((L[k] * inv[k][j] for k in range(3)), mpq(0)) for j in range(3))

    def to_json(self) -> dict:
        return {"matrix": [[num_to_json(v) for v in row] for row in self.matrix]}


def homogeneous_substitute(P: BiPoly, d: int, Xl: BiPoly, Yl: BiPoly, Zl: BiPoly) -> BiPoly:
    """sum c_ij Xl^i Yl^j Zl^(d-i-j)."""
    xp, yp, zp = [ONE], [ONE], [ONE]
    for _ in range(d):
        xp.append(xp[-1] * Xl)
        yp.append(yp[-1] * Yl)
        zp.append(zp[-1] * Zl)
    acc = BiPoly()
    for (i, j), c in P.terms.items():
        acc = acc + xp[i] * yp[j] * zp[d - i - j] * c
    return acc


def _inv3(m: list) -> list:
    a = m
    det = (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )
    if det == 0:
        raise ValueError("singular projective change")
    cof = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = a[r[0]][c[0]] * a[r[1]][c[1]] - a[r[0]][c[1]] * a[r[1]][c[0]]
            cof[i][j] = minor if (i + j) % 2 == 0 else -minor
    return [[cof[j][i] / det for j in range(3)] for i in range(3)]


def line_poly(L: tuple) -> BiPoly:
    return X * L[0] + Y * L[1] + L[2]


# ---------------------------------------------------------------- infinity

def infinity_chart(P: BiPoly, d: int, direction: tuple) -> tuple[BiPoly, Point]:
    """Dehomogenize P^h near the infinity point (d1 : d2 : 0); returns (poly in (u, v), point)."""
    d1, d2 = direction
    terms = {}
    if d2 != 0 and cabs(d2) >= cabs(d1):
        # u = X/Y, v = Z/Y
        for (i, j), c in P.terms.items():
            terms[(i, d - i - j)] = c
        return BiPoly(terms), (d1 / d2, mpq(0))
    for (i, j), c in P.terms.items():
        terms[(j, d - i - j)] = c
    return BiPoly(terms), (d2 / d1, mpq(0))


def _leading_form_roots(F: BiPoly, d: int | None = None) -> list[tuple[tuple, int]]:
    """Directions (d1, d2) of the degree-d part, with multiplicities."""
    d = int(F.degree()) if d is None else d
    lead = F.homogeneous_part(d)
    f = UniPoly([lead.coeff(i, d - i) for i in range(d + 1)])
    out = []
    if f.is_zero():
        return out
    if f.degree < d:
        out.append(((mpc(1), mpc(0)), d - int(f.degree)))
    if f.degree >= 1:
        for t, k in univariate_roots(f):
            out.append(((t, mpc(1)), k))
    return out


def infinity_divisor(F) -> list[IntersectionRecord]:
    P = F.F if isinstance(F, Quartic) else F
    recs = []
    for direction, k in _leading_form_roots(P, 4):
        if k > 1:
            raise TangentAtInfinity(
                "leading form has a repeated linear factor",
                direction=[str(direction[0]), str(direction[1])],
                multiplicity=k,
            )
        recs.append(IntersectionRecord(direction, 1, at_infinity=True))
    if len(recs) != 4:
        raise TangentAtInfinity("leading form does not have four distinct roots")
    return recs


# ---------------------------------------------------------------- validation

SHEARS = (mpq(0), mpq(1, 3), mpq(-2, 5), mpq(3, 7), mpq(-5, 11), mpq(7, 13))


def _shear_parameters(F: BiPoly, d: int) -> list:
    """Shears s for which F(X + sY, Y) keeps a nonzero Y^d coefficient (so (0:1:0) is not on the curve)."""
    lead = F.homogeneous_part(d)
    return [s for s in SHEARS if not tiny(lead(s, 1), lead.max_abs() * 8, current_precision())]


def _shear_parameter(F: BiPoly, d: int):
    ok = _shear_parameters(F, d)
    if not ok:
        raise ValueError("could not find a generic shear")
    return ok[0]


def _shear(P: BiPoly, s) -> BiPoly:
    return P if s == 0 else P.compose(X + Y * s, Y)


def critical_points(F: BiPoly) -> list[Point]:
    """Common zeros of F_X and F_Y (affine)."""
    FX, FY = F.dX, F.dY
    if FX.is_zero() or FY.is_zero():
        return []
    s = _shear_parameter(F, int(F.degree()))
    FXs, FYs = _shear(FX, s), _shear(FY, s)
    R = resultant(FXs, FYs, 1)
    if R.is_zero():
        raise SingularCurve("gradient components share a component")
    pts = []
    if R.degree < 1:
        return pts
    for x0, _ in univariate_roots(R):
        fy = FYs.restrict_x(x0)
        cands = []
        if fy.degree is not None and fy.degree >= 1:
            cands = [y for y, _ in univariate_roots(fy)]
        else:
            fx = FXs.restrict_x(x0)
            if fx.degree >= 1:
                cands = [y for y, _ in univariate_roots(fx)]
        for y0 in cands:
            if tiny(FXs(x0, y0), FXs.eval_scale(x0, y0) + 1, current_precision() // 2):
                pts.append((x0 + s * y0, y0))
    return pts


def validate_quartic(F: BiPoly, precision_bits: int | None = None) -> Quartic:
    """Degree, transversality at infinity, then smoothness (affine critical points on the curve)."""
    if F.degree() != 4:
        raise NotDegree4(f"total degree is {F.degree()}, expected 4", degree=str(F.degree()))
    prec = resolve_precision(precision_bits)
    with working_precision(prec):
        infinity_divisor(F)
        for pt in critical_points(F):
            if tiny(F(*pt), F.eval_scale(*pt) + 1, prec):
                raise SingularCurve("singular point on the curve", witness=[str(pt[0]), str(pt[1])])
    return Quartic(F, smooth=True, transverse_at_infinity=True)


# ---------------------------------------------------------------- local data

def curve_germ(F: BiPoly, pt: Point, order: int) -> tuple[Series1, Series1, bool]:
    """Local parametrization t -> (x0 + dx(t), y0 + dy(t)) of F = 0 through pt.

    Uses X as parameter when |F_Y| >= |F_X| at pt, else Y (the swapped chart)."""
    x0, y0 = pt
    fx, fy = F.dX(x0, y0), F.dY(x0, y0)
    swapped = cabs(fy) < cabs(fx)
    if fx == 0 and fy == 0:
        from .errors import ChartUnavailable

        raise ChartUnavailable("both partial derivatives vanish", point=[str(x0), str(y0)])
    t = Series1([mpq(0), mpq(1)], order)
    lam = Series1([mpq(0)], order)
    G = F.swap() if swapped else F
    gx0, gy0 = (y0, x0) if swapped else (x0, y0)
    Gd = G.dY
    for _ in range(max(2, math.ceil(math.log2(order + 1)) + 2)):
        val = compose_poly_curve(G, gx0, gy0, t, lam)
        der = compose_poly_curve(Gd, gx0, gy0, t, lam)
        lam = lam - val * der.inverse()
        lam.c[0] = mpq(0)
    if swapped:
        return lam, t, True
    return t, lam, False


def local_order(F: BiPoly, H: BiPoly, pt: Point, max_order: int) -> int | None:
    """Order of vanishing of H along F = 0 at pt, or None if it exceeds max_order."""
    dx, dy, _ = curve_germ(F, pt, max_order)
    s = compose_poly_curve(H, pt[0], pt[1], dx, dy)
    scale = H.eval_scale(cabs(pt[0]) + 1, cabs(pt[1]) + 1)
    prec = current_precision()
    return s.valuation(lambda c: tiny(c, scale, prec))


def tangent_derivative(F: BiPoly, P: BiPoly) -> BiPoly:
    """F_Y P_X - F_X P_Y: derivative of P along the Hamiltonian field of F."""
    return F.dY * P.dX - F.dX * P.dY


def refine_point(F: BiPoly, H: BiPoly, pt: Point, k: int, max_iter: int = 60) -> Point:
    """Newton on (F, D^(k-1) H), whose zero at pt is simple when H meets F with order k."""
    W = H
    for _ in range(max(k - 1, 0)):
        W = tangent_derivative(F, W)
    FX, FY, WX, WY = F.dX, F.dY, W.dX, W.dY
    x, y = mpc(pt[0]), mpc(pt[1])
    prec = current_precision()
    tol = mpfr(2) ** (-(prec - 8))
    for _ in range(max_iter):
        step = solve_square([[FX(x, y), FY(x, y)], [WX(x, y), WY(x, y)]], [F(x, y), W(x, y)])
        if step is None:
            break
        x, y = x - step[0], y - step[1]
        if cabs(step[0]) + cabs(step[1]) <= tol * (1 + cabs(x) + cabs(y)):
            break
    return (x, y)


# ---------------------------------------------------------------- intersections

def _affine_intersections(P: BiPoly, H: BiPoly, s, prec: int) -> list[IntersectionRecord]:
    Ps, Hs = _shear(P, s), _shear(H, s)
    R = resultant(Ps, Hs, 1)
    if R.is_zero():
        raise SharedComponent("resultant vanishes identically")
    records: list[IntersectionRecord] = []
    if R.degree < 1:
        return records
    for x0, k in univariate_roots(R):
        ys = univariate_roots(Ps.restrict_x(x0))
        scored = sorted(
            ((cabs(Hs(x0, y)) / (Hs.eval_scale(x0, y) + 1), y) for y, _ in ys),
            key=lambda sy: sy[0],
        )
        cands = [y for sc, y in scored if sc <= mpfr(2) ** (-(prec // 8))]
        if not cands:
            cands = [scored[0][1]]
        found = 0
        for y0 in cands:
            pt = (x0 + s * y0, y0)
            order = local_order(P, H, pt, k + 2)
            if order is None or order == 0:
                continue
            pt = refine_point(P, H, pt, order)
            order2 = local_order(P, H, pt, k + 2)
            if order2 is not None and order2 > 0:
                order = order2
            res = max(cabs(P(*pt)) / (P.eval_scale(*pt) + 1), cabs(H(*pt)) / (H.eval_scale(*pt) + 1))
            records.append(IntersectionRecord(pt, order, residual=res))
            found += order
        if found != k:
            raise NoConvergence(
                "local orders disagree with the resultant multiplicity",
                x=str(x0),
                resultant_multiplicity=k,
                local_total=found,
            )
    return records


def intersect_curves(F, H: BiPoly, precision_bits: int | None = None) -> list[IntersectionRecord]:
    """All intersections of F = 0 and H = 0 with multiplicities (affine first, then infinity)."""
    P = F.F if isinstance(F, Quartic) else F
    prec = resolve_precision(precision_bits)
    if H.is_zero():
        raise SharedComponent("H is the zero polynomial")
    dF, dH = int(P.degree()), int(H.degree())
    with working_precision(prec):
        if dH == 0:
            return []
        at_inf: list[IntersectionRecord] = []
        for direction, _ in _leading_form_roots(P, dF):
            lead = H.homogeneous_part(dH)
            if not tiny(lead(*direction), lead.eval_scale(*direction) + 1, prec):
                continue
            Fi, pt = infinity_chart(P, dF, direction)
            Hi, _ = infinity_chart(H, dH, direction)
            order = local_order(Fi, Hi, pt, 4 * dH + 2)
            if order:
                at_inf.append(IntersectionRecord(direction, order, at_infinity=True))
        shears = _shear_parameters(P, dF)
        if not shears:
            raise ValueError("could not find a generic shear")
        for attempt, s in enumerate(shears):
            # a shear under which distinct points share an x-coordinate can merge them into one
            # high-multiplicity root that clustering cannot resolve; the next shear separates them
            try:
                records = _affine_intersections(P, H, s, prec) + at_inf
                total = sum(r.multiplicity for r in records)
                if total != dF * dH:
                    raise NoConvergence("Bezout count mismatch", total=total, expected=dF * dH)
                break
            except NoConvergence:
                if attempt == len(shears) - 1:
                    raise
    records.sort(key=lambda r: (r.at_infinity, r.point[0].real, r.point[0].imag, r.point[1].real, r.point[1].imag))
    return records


# ---------------------------------------------------------------- bitangents

def _restriction_coeff_polys(F: BiPoly) -> list[BiPoly]:
    """phi_k(m, c) = coefficient of s^k in F(s, m s + c), as polynomials in (m, c) -> (X, Y)."""
    phis = [dict() for _ in range(int(F.degree()) + 1)]
    for (i, j), coef in F.terms.items():
        for l in range(j + 1):
            key = (l, j - l)
            v = coef * math.comb(j, l)
            phis[i + l][key] = phis[i + l].get(key, 0) + v
    return [BiPoly(p) for p in phis]


def _np_eval(P: BiPoly):
    items = list(P.terms.items())
    ex = np.array([k for k, _ in items], dtype=int).reshape(-1, 2)
    co = np.array([complex(v) if not isinstance(v, mpc) else complex(float(v.real), float(v.imag)) for _, v in items])

    def ev(m, c):
        if len(items) == 0:
            return np.zeros_like(m)
        return (co[None, :] * m[:, None] ** ex[None, :, 0] * c[:, None] ** ex[None, :, 1]).sum(axis=1)

    return ev


def _square_coeffs(p, q, r):
    return [r * r, 2 * q * r, q * q + 2 * p * r, 2 * p * q, p * p]


def _square_jac(p, q, r, zero):
    # d/d(p, q, r) of the square's coefficients, for k = 0..4
    return [
        [zero, zero, 2 * r],
        [zero, 2 * r, 2 * q],
        [2 * r, 2 * q, 2 * p],
        [2 * q, 2 * p, zero],
        [2 * p, zero, zero],
    ]


def _bitangent_candidates(F: BiPoly, starts: int, rng: np.random.Generator) -> list[tuple]:
    phis = _restriction_coeff_polys(F)
    ev = [_np_eval(p) for p in phis]
    evm = [_np_eval(p.dX) for p in phis]
    evc = [_np_eval(p.dY) for p in phis]
    m = rng.normal(size=starts) + 1j * rng.normal(size=starts)
    c = rng.normal(size=starts) + 1j * rng.normal(size=starts)
    f = [e(m, c) for e in ev]
    with np.errstate(all="ignore"):
        p = np.sqrt(f[4])
        q = f[3] / (2 * p)
        r = (f[2] - q * q) / (2 * p)
    z = np.stack([m, c, p, q, r], axis=1)
    alive = np.all(np.isfinite(z), axis=1)
    z = z[alive]
    scale = max(float(abs(complex(v))) if not isinstance(v, mpc) else float(abs(v)) for v in F.terms.values())
    for _ in range(60):
        m, c, p, q, r = z.T
        sq = _square_coeffs(p, q, r)
        E = np.stack([ev[k](m, c) - sq[k] for k in range(5)], axis=1)
        zero = np.zeros_like(m)
        sj = _square_jac(p, q, r, zero)
        J = np.empty((len(m), 5, 5), dtype=complex)
        for k in range(5):
            J[:, k, 0] = evm[k](m, c)
            J[:, k, 1] = evc[k](m, c)
            J[:, k, 2] = -sj[k][0]
            J[:, k, 3] = -sj[k][1]
            J[:, k, 4] = -sj[k][2]
        with np.errstate(all="ignore"):
            try:
                step = np.linalg.solve(J, E[:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                step = np.stack([np.linalg.lstsq(J[i], E[i], rcond=None)[0] for i in range(len(m))])
            size = np.linalg.norm(step, axis=1)
            cap = 10 * (1 + np.linalg.norm(z, axis=1))
            damp = np.where(size > cap, cap / np.maximum(size, 1e-300), 1.0)
            z = z - step * damp[:, None]
        ok = np.all(np.isfinite(z), axis=1) & (np.linalg.norm(z, axis=1) < 1e8)
        z = z[ok]
    m, c, p, q, r = z.T
    sq = _square_coeffs(p, q, r)
    E = np.stack([ev[k](m, c) - sq[k] for k in range(5)], axis=1)
    res = np.linalg.norm(E, axis=1) / (scale * (1 + np.abs(m) + np.abs(c)) ** 4)
    good = z[(res < 1e-9) & (np.abs(z[:, 2]) > 1e-8)]
    # coarse dedupe in double precision, deterministic order
    uniq: list[np.ndarray] = []
    for row in good[np.lexsort((good[:, 1].imag, good[:, 1].real, good[:, 0].imag, good[:, 0].real))]:
        if all(abs(row[0] - u[0]) + abs(row[1] - u[1]) > 1e-6 * (1 + abs(u[0]) + abs(u[1])) for u in uniq):
            uniq.append(row)
    return [tuple(complex(v) for v in row) for row in uniq]


def _refine_bitangent(phis: list[BiPoly], z0: tuple, prec: int):
    z = [mpc(v) for v in z0]
    dphis = [(p.dX, p.dY) for p in phis]
    tol = mpfr(2) ** (-(prec - 10))
    for _ in range(80):
        m, c, p, q, r = z
        sq = _square_coeffs(p, q, r)
        E = [phis[k](m, c) - sq[k] for k in range(5)]
        sj = _square_jac(p, q, r, mpc(0))
        J = [[dphis[k][0](m, c), dphis[k][1](m, c), -sj[k][0], -sj[k][1], -sj[k][2]] for k in range(5)]
        step = solve_square(J, E)
        if step is None:
            return None
        z = [a - b for a, b in zip(z, step)]
        if sum(cabs(v) for v in step) <= tol * (1 + sum(cabs(v) for v in z)):
            break
    m, c, p, q, r = z
    sq = _square_coeffs(p, q, r)
    resid = max(cabs(phis[k](m, c) - sq[k]) for k in range(5))
    return z, resid


def _normalized_line(L: tuple) -> tuple:
    k = max(range(3), key=lambda i: cabs(L[i]))
    return tuple(v / L[k] for v in L)


def find_bitangents(
    F,
    count: int | None = None,
    seed: int = 0,
    starts: int = 2000,
    precision_bits: int | None = None,
) -> list[Bitangent]:
    """Bitangent lines by multi-start Newton on F(s, ms + c) = (ps^2 + qs + r)^2, in both charts."""
    P = F.F if isinstance(F, Quartic) else F
    prec = resolve_precision(precision_bits)
    rng = np.random.default_rng(seed)
    found: list[Bitangent] = []
    keys: list[tuple] = []
    with working_precision(prec):
        coef_scale = P.max_abs()
        for swapped in (False, True):
            G = P.swap() if swapped else P
            phis = _restriction_coeff_polys(G)
            for cand in _bitangent_candidates(G, starts, rng):
                out = _refine_bitangent(phis, cand, prec)
                if out is None:
                    continue
                (m, c, p, q, r), resid = out
                scale = coef_scale * (1 + cabs(m) + cabs(c)) ** 4
                if resid > scale * mpfr(2) ** (-128) or tiny(p, 1 + cabs(q) + cabs(r), prec // 2):
                    continue
                disc = q * q - 4 * p * r
                if tiny(disc, cabs(q) ** 2 + cabs(p * r) + 1, prec // 2):
                    continue  # hyperflex line: one contact point of order 4
                L = (mpc(1), -m, -c) if swapped else (-m, mpc(1), -c)
                key = _normalized_line(L)
                if any(
                    all(cabs(a - b) <= mpfr(2) ** -40 * (1 + cabs(b)) for a, b in zip(key, k2)) for k2 in keys
                ):
                    continue
                keys.append(key)
                sq = gmpy2.sqrt(disc)
                roots = [(-q + sq) / (2 * p), (-q - sq) / (2 * p)]
                pts = []
                for s0 in roots:
                    pt = (m * s0 + c, s0) if swapped else (s0, m * s0 + c)
                    pts.append(IntersectionRecord(pt, 2, residual=cabs(P(*pt)) / (P.eval_scale(*pt) + 1)))
                pts.sort(key=lambda rr: (rr.point[0].real, rr.point[0].imag, rr.point[1].real, rr.point[1].imag))
                found.append(Bitangent(line_poly(L), L, tuple(pts), (p, q, r), resid / scale, swapped))
    found.sort(key=lambda b: tuple((v.real, v.imag) for v in _normalized_line(b.coeffs)[::-1]))
    log.info("found %d bitangents", len(found))
    if count is not None:
        if len(found) < count:
            raise SolverIncomplete(f"found {len(found)} bitangents, {count} requested", found=len(found))
        return found[:count]
    return found


def bitangent_from_line(F, L: tuple, precision_bits: int | None = None) -> Bitangent:
    """Certify a user-supplied line alpha X + beta Y + gamma as a bitangent."""
    P = F.F if isinstance(F, Quartic) else F
    prec = resolve_precision(precision_bits)
    with working_precision(prec):
        recs = intersect_curves(P, line_poly(L), prec)
        if len(recs) != 2 or any(r.multiplicity != 2 or r.at_infinity for r in recs):
            raise ValueError("line is not a bitangent with two distinct affine contact points")
    return Bitangent(line_poly(L), tuple(L), tuple(recs), (None, None, None), max(r.residual for r in recs), False)


# ---------------------------------------------------------------- normalization

@dataclass
class Normalization:
    change: ProjectiveChange
    quartic: Quartic
    l1: BiPoly
    l2: BiPoly
    a: object
    b: object
    touch1: tuple  # images of the contact points of l1 (first is Q13)
    touch2: tuple

    def to_json(self) -> dict:
        return {
            "change": self.change.to_json(),
            "identity": self.change.is_identity(),
            "a": num_to_json(self.a),
            "b": num_to_json(self.b),
            "l1": self.l1.to_text(),
            "l2": self.l2.to_text(),
        }


def _cross(u: tuple, v: tuple) -> tuple:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v)), mpq(0))


def _chordal_min_separation(dirs: list[tuple]) -> mpfr:
    best = mpfr("inf")
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            a, b = dirs[i], dirs[j]
            num = cabs(a[0] * b[1] - a[1] * b[0])
            den = gmpy2.sqrt((cabs(a[0]) ** 2 + cabs(a[1]) ** 2) * (cabs(b[0]) ** 2 + cabs(b[1]) ** 2))
            best = min(best, num / den)
    return best


def _finish_normalization(F: BiPoly, M: list, pts1: list, pts2: list, exact: bool) -> tuple:
    change = ProjectiveChange(M)
    Fn = change.apply_poly(F, 4)
    if not exact:
        Fn = Fn / Fn.max_abs()
    t1 = [change.apply_point(p) for p in pts1]
    t2 = [change.apply_point(p) for p in pts2]
    return change, Fn, t1, t2


def normalize_pair(
    F,
    bt1: Bitangent,
    bt2: Bitangent,
    infinity_line: tuple | None = None,
    precision_bits: int | None = None,
) -> Normalization:
    """Projective change making the pair Y + aX and Y + aX + b, with the first contact point of l1 as Q13."""
    P = F.F if isinstance(F, Quartic) else F
    prec = resolve_precision(precision_bits)
    with working_precision(prec):
        L1, L2 = tuple(bt1.coeffs), tuple(bt2.coeffs)
        pts1 = [r.point for r in bt1.tangency_points]
        pts2 = [r.point for r in bt2.tangency_points]
        exact = all(is_exact(v) for v in L1 + L2) and all(is_exact(v) for pt in pts1 + pts2 for v in pt)
        Pint = _cross(L1, L2)
        scale12 = max(cabs(v) for v in L1) * max(cabs(v) for v in L2)
        parallel = tiny(Pint[2], scale12, prec) if not exact else Pint[2] == 0
        if parallel and infinity_line is None:
            if cabs(L1[1]) == 0 or tiny(L1[1], max(cabs(v) for v in L1), prec):
                raise DegenerateNormalization("vertical parallel pair gives a = 0 after the swap")
            a = L1[0] / L1[1]
            c1, c2 = L1[2] / L1[1], L2[2] / L2[1]
            b = c2 - c1
            one, zero = (mpq(1), mpq(0)) if exact else (mpc(1), mpc(0))
            M = [[one, zero, zero], [zero, one, c1], [zero, zero, one]]
            change, Fn, t1, t2 = _finish_normalization(P, M, pts1, pts2, exact)
        else:
            T = pts1[0]
            # X' through T and "perpendicular" to l1; must avoid the intersection point
            rX = (L1[1], -L1[0], -(L1[1] * T[0] - L1[0] * T[1]))
            if tiny(_dot(rX, Pint), max(cabs(v) for v in rX) * max(cabs(v) for v in Pint), prec // 2):
                rX = (mpc(1), mpc(0), -T[0]) if not tiny(L1[1], 1, prec) else (mpc(0), mpc(1), -T[1])
            n1 = max(cabs(v) for v in L1)
            n2 = max(cabs(v) for v in L2)
            if infinity_line is not None:
                Linf = tuple(mpc(v) for v in infinity_line)
                if not tiny(_dot(Linf, Pint), max(cabs(v) for v in Linf) * max(cabs(v) for v in Pint), prec // 2):
                    raise ValueError("the requested line at infinity does not pass through l1 ∩ l2")
                # Linf = u L1 + v L2
                sol = _two_term_decomposition(Linf, L1, L2)
                u, v = sol
                if tiny(u, cabs(u) + cabs(v), prec // 2) or tiny(v, cabs(u) + cabs(v), prec // 2):
                    raise ValueError("the line at infinity must differ from both bitangents")
                candidates = [(Linf, -1 / u)]
            else:
                candidates = []
                for rho in (mpq(1), mpq(1, 3), mpq(3)):
                    for k in range(8):
                        nu = (n1 / n2) * rho * gmpy2.exp(mpc(0, 2 * gmpy2.const_pi() * (k + mpq(1, 2)) / 8))
                        candidates.append((tuple(nu * L2[i] - L1[i] for i in range(3)), mpc(1)))
            best = None
            for rZ, b in candidates:
                a = mpc(1)
                rY = tuple(L1[i] - a * rX[i] for i in range(3))
                M = [list(rX), list(rY), list(rZ)]
                try:
                    change, Fn, t1, t2 = _finish_normalization(P, M, pts1, pts2, False)
                except (ValueError, ZeroDivisionError):
                    continue
                dirs = [d for d, _ in _leading_form_roots(Fn, 4)]
                sep = _chordal_min_separation(dirs) if len(dirs) == 4 else mpfr(0)
                mags = [max(cabs(p[0]), cabs(p[1])) for p in t1[1:] + t2]
                spread = max(mags) / min(mags) if min(mags) > 0 else mpfr("inf")
                score = float(gmpy2.log(spread + 1)) - float(gmpy2.log(sep)) if sep > 0 else float("inf")
                if best is None or score < best[0]:
                    best = (score, M, b)
                if infinity_line is not None:
                    best = (score, M, b)
            if best is None:
                raise NormalizationBreaksTransversality("no admissible line at infinity through l1 ∩ l2")
            _, M, b = best
            change, Fn, t1, t2 = _finish_normalization(P, M, pts1, pts2, False)
            # balance coordinates: x'' = s1 x', y'' = s2 y'
            xs = [cabs(p[0]) for p in t1[1:] + t2]
            ys = [cabs(p[1]) for p in t1[1:] + t2]
            s1 = 1 / max(xs) if max(xs) > 0 else mpfr(1)
            s2 = 1 / max(ys) if max(ys) > 0 else mpfr(1)
            S = [[s1, 0, 0], [0, s2, 0], [0, 0, 1]]
            M = [[sum((S[i][k] * M[k][j] for k in range(3)), mpc(0)) for j in range(3)] for i in range(3)]
            # l1 = Y' + X' becomes Y''/s2 + X''/s1 ~ Y'' + (s2/s1) X''; l2 likewise with b -> s2 b
            a = mpc(s2 / s1)
            b = b * s2
            change, Fn, t1, t2 = _finish_normalization(P, M, pts1, pts2, False)
        if (exact and (a == 0 or b == 0)) or (not exact and (tiny(a, 1, prec // 2) or tiny(b, 1, prec // 2))):
            raise DegenerateNormalization("normalized constants must satisfy a != 0 and b != 0", a=str(a), b=str(b))
        try:
            q = validate_quartic(Fn, prec)
        except TangentAtInfinity as exc:
            raise NormalizationBreaksTransversality(
                "the new line at infinity is tangent to the transformed quartic", **exc.payload
            ) from exc
        l1n = Y + X * a
        l2n = Y + X * a + b
        # the transformed lines must be exactly these up to scale
        for L, ln in ((L1, l1n), (L2, l2n)):
            Lt = change.apply_line(L)
            k = Lt[1]
            for got, want in zip(Lt, (ln.coeff(1, 0), ln.coeff(0, 1), ln.coeff(0, 0))):
                if not tiny(got / k - want, 1 + cabs(want), prec // 2):
                    raise AssertionError("normalized lines do not have the expected form")
    return Normalization(change, q, l1n, l2n, a, b, tuple(t1), tuple(t2))


def _two_term_decomposition(L: tuple, A: tuple, B: tuple) -> tuple:
    """(u, v) with L = u A + v B, by least squares on the 3 equations."""
    rows = [[A[i], B[i]] for i in range(3)]
    # normal equations are fine for a 3 x 2 well-separated system
    g = [[sum((rows[i][p].conjugate() * rows[i][q] for i in range(3)), mpc(0)) for q in range(2)] for p in range(2)]
    h = [sum((rows[i][p].conjugate() * L[i] for i in range(3)), mpc(0)) for p in range(2)]
    sol = solve_square(g, h)
    if sol is None:
        raise ValueError("bitangents are proportional")
    return tuple(sol)
