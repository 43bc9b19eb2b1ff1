"""Local analysis of Omega = G dF + F (B dX - A dY) near a singular point on Q.

In the adapted chart x = X, y = F(X, Y), with inverse Y = l(x, y), the form
becomes (g - y l_y A) dy + y (B - l_x A) dx, i.e. the vector field
    x' = -g + y alpha,   y' = y beta,
with g = G(x, l), alpha = l_y A(x, l), beta = B(x, l) - l_x A(x, l).
Writing g = lam x^m + y g~ and alpha~ = alpha - g~ gives
    x' = -g(x, 0) + y alpha~,   y' = y beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from gmpy2 import mpc, mpfr, mpq

from .algebra.numbers import cabs, current_precision, num_to_json, resolve_precision, tiny, working_precision
from .algebra.poly import BiPoly
from .algebra.roots import univariate_roots
from .algebra.series import Series1, Series2, compose_poly
from .algebra.poly import UniPoly
from .errors import ChartUnavailable, DegenerateTangency, ResidueUndefined

DEFAULT_ORDER = 6


@dataclass
class AdaptedChart:
    base_point: tuple
    order: int
    l: Series2
    swapped: bool
    residual: mpfr
    F: BiPoly = field(repr=False)

    def jet(self, r: int, s: int):
        """Partial derivative d^(r+s) l / dx^r dy^s at the origin."""
        return self.l[r, s] * math.factorial(r) * math.factorial(s)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "swapped": self.swapped,
            "l": [[r, s, num_to_json(v)] for (r, s), v in self.l.items()],
        }


def adapted_chart(F, P: tuple, order: int = DEFAULT_ORDER, precision_bits: int | None = None) -> AdaptedChart:
    """Jets of l with F(x0 + x, y0 + l(x, y)) = y, by Newton iteration on truncated series."""
    Fp = F.F if hasattr(F, "F") else F
    prec = resolve_precision(precision_bits)
    with working_precision(prec):
        x0, y0 = P
        fx, fy = Fp.dX(x0, y0), Fp.dY(x0, y0)
        grad = cabs(fx) + cabs(fy)
        if grad == 0:
            raise ChartUnavailable("both partial derivatives vanish at the base point", point=[str(x0), str(y0)])
        swapped = tiny(fy, grad, prec)
        G = Fp.swap() if swapped else Fp
        gx0, gy0 = (y0, x0) if swapped else (x0, y0)
        gy = G.dY
        g_y0 = gy(gx0, gy0)
        if tiny(g_y0, grad, prec):
            raise ChartUnavailable("no chart with nonvanishing transverse derivative", point=[str(x0), str(y0)])
        gx_0 = G.dX(gx0, gy0)
        ylin = Series2.var(1, order)
        l = Series2(order, {(0, 1): 1 / g_y0, (1, 0): -gx_0 / g_y0})
        for _ in range(math.ceil(math.log2(order + 1)) + 1):
            E = compose_poly(G, gx0, gy0, l) - ylin
            D = compose_poly(gy, gx0, gy0, l)
            l = l - E / D
            l.c[0][0] = mpq(0)
        E = compose_poly(G, gx0, gy0, l) - ylin
        resid = max(cabs(v) for _, v in E.items()) / (G.eval_scale(cabs(gx0) + 1, cabs(gy0) + 1) + 1)
    return AdaptedChart((x0, y0), order, l, swapped, resid, G)


def chart_residual_at(chart: AdaptedChart, x, y):
    """|F(x0 + x, y0 + l(x, y)) - y| for a sample point, evaluating the truncated l."""
    gx0, gy0 = (chart.base_point[1], chart.base_point[0]) if chart.swapped else chart.base_point
    lv = sum((v * x**r * y**s for (r, s), v in chart.l.items()), mpc(0))
    return cabs(chart.F(gx0 + x, gy0 + lv) - y)


@dataclass
class LocalForm:
    g: Series2
    alpha: Series2
    beta: Series2
    chart: AdaptedChart


def swap_form(G: BiPoly, A: BiPoly, B: BiPoly) -> tuple[BiPoly, BiPoly, BiPoly]:
    """Data of the same Omega in coordinates with X and Y exchanged."""
    return G.swap(), -B.swap(), -A.swap()


def localize_form(F, G: BiPoly, A: BiPoly, B: BiPoly, chart: AdaptedChart, order: int | None = None) -> LocalForm:
    n = chart.order if order is None else min(order, chart.order)
    l = chart.l.truncate(n)
    if chart.swapped:
        G, A, B = swap_form(G, A, B)
    x0, y0 = (chart.base_point[1], chart.base_point[0]) if chart.swapped else chart.base_point
    g = compose_poly(G, x0, y0, l)
    Ac = compose_poly(A, x0, y0, l)
    Bc = compose_poly(B, x0, y0, l)
    lx, ly = l.diff(0), l.diff(1)
    alpha = ly * Ac
    beta = Bc - lx * Ac
    return LocalForm(g, alpha, beta, chart)


@dataclass
class NormalForm:
    lam: object  # leading coefficient of g(x, 0)
    m: int
    g0: list  # coefficients of g(x, 0)
    g_tilde: Series2
    alpha_tilde: Series2
    beta: Series2
    scale: mpfr
    lam_field: object = None  # coefficient in x' = lam_field x^m + ..., i.e. -lam

    @property
    def partial(self) -> bool:
        return self.m > 2

    @classmethod
    def from_series(cls, g0: list, g_tilde: Series2, alpha_tilde: Series2, beta: Series2) -> "NormalForm":
        """Build a normal form directly from model series (used for synthetic local models)."""
        scale = _scale_of(g0, g_tilde, alpha_tilde, beta)
        prec = current_precision()
        m = next((k for k, v in enumerate(g0) if not tiny(v, scale, prec)), None)
        if m is None:
            raise DegenerateTangency("g(x, 0) vanishes to the truncation order")
        return cls(g0[m], m, list(g0), g_tilde, alpha_tilde, beta, scale, -g0[m])


def _scale_of(g0, *series) -> mpfr:
    s = max((cabs(v) for v in g0), default=mpfr(0))
    for ser in series:
        for _, v in ser.items():
            s = max(s, cabs(v))
    return s if s > 0 else mpfr(1)


def normal_form(local: LocalForm) -> NormalForm:
    g = local.g
    g0 = g.restrict_y0()
    n = g.order - 1
    g_tilde = Series2(n, {(r, s): g[r, s + 1] for r in range(n + 1) for s in range(n + 1 - r)})
    alpha_tilde = local.alpha - g_tilde
    scale = _scale_of(g0, g_tilde, alpha_tilde, local.beta)
    prec = current_precision()
    m = next((k for k, v in enumerate(g0) if not tiny(v, scale, prec)), None)
    if m is None:
        raise DegenerateTangency("g(x, 0) vanishes identically to the truncation order")
    if m == 0:
        raise ValueError("g does not vanish at the base point: not a singularity on Q")
    lam = g0[m]
    nf = NormalForm(lam, m, g0, g_tilde, alpha_tilde, local.beta, scale, -lam)
    if m == 2:
        # the vector-field coefficient equals -g_xx(0,0)/2 and must be -lam
        assert nf.lam_field == -(g[2, 0] * 2) / 2
    return nf


def jet_conditions(nf: NormalForm) -> dict[str, object]:
    """Conditions for the blown-up field to be divisible by x^m (hence regular at the corner).

    For m = 2 these are alpha~ = beta = 0, beta_y - alpha~_x = 0, alpha~_y = 0 at the origin
    plus beta_x = -lam.  General m: alpha~ and beta vanish to order m - 2 / m - 2,
    and in degree m - 1: beta_{m-1,0} = -lam, beta_{m-1-s,s} = alpha~_{m-s,s-1}, alpha~_{0,m-1} = 0.
    """
    m = nf.m
    at, be = nf.alpha_tilde, nf.beta
    if m == 2:
        return {
            "alpha_tilde": at[0, 0],
            "beta": be[0, 0],
            "beta_y-alpha_tilde_x": be[0, 1] - at[1, 0],
            "alpha_tilde_y": at[0, 1],
            "beta_x+lambda": be[1, 0] + nf.lam,
        }
    need = m - 1
    if at.order < need or be.order < need:
        raise ResidueUndefined("jets too short for the requested multiplicity", m=m)
    out: dict[str, object] = {}
    for k in range(m - 1):
        for r in range(k + 1):
            out[f"alpha_tilde[{r},{k - r}]"] = at[r, k - r]
            out[f"beta[{r},{k - r}]"] = be[r, k - r]
    out[f"beta[{m - 1},0]+lambda"] = be[m - 1, 0] + nf.lam
    for s in range(1, m):
        out[f"beta[{m - 1 - s},{s}]-alpha_tilde[{m - s},{s - 1}]"] = be[m - 1 - s, s] - at[m - s, s - 1]
    out[f"alpha_tilde[0,{m - 1}]"] = at[0, m - 1]
    return out


def jet_verdict(nf: NormalForm, bits: int | None = None) -> tuple[bool, dict]:
    conds = jet_conditions(nf)
    prec = bits or current_precision()
    ok = all(tiny(v, nf.scale, prec) for v in conds.values())
    return ok, conds


@dataclass
class BlowUpResult:
    e_singularities: list
    q_corner_regular: bool
    cs_index: object
    x_power: int  # power of x divided out of the transformed field
    corner_value: tuple
    e_invariant: bool
    determined: bool = True


def _blown_up_field(nf: NormalForm) -> tuple[list[list], list[list], int]:
    """x-graded coefficients (polynomials in t) of x' and t' after y = t x."""
    g0, at, be = nf.g0, nf.alpha_tilde, nf.beta
    kx = min(len(g0) - 1, at.order + 1)
    ky = be.order + 1
    K = min(kx, ky)
    xdot = [[mpq(0)] * (k + 2) for k in range(K + 1)]
    ydot = [[mpq(0)] * (k + 2) for k in range(K + 1)]
    for k in range(K + 1):
        xdot[k][0] -= g0[k]
    for (r, s), v in at.items():
        k = r + s + 1
        if k <= K:
            xdot[k][s + 1] += v
    for (r, s), v in be.items():
        k = r + s + 1
        if k <= K:
            ydot[k][s + 1] += v
    # t' = (y' - t x') / x
    tdot = []
    for k in range(K):
        row = [mpq(0)] * (k + 4)
        for s, v in enumerate(ydot[k + 1]):
            row[s] += v
        for s, v in enumerate(xdot[k + 1]):
            row[s + 1] -= v
        tdot.append(row)
    return xdot[:K], tdot, K


def blow_up_once(nf: NormalForm) -> BlowUpResult:
    """Blow up the origin (y = t x), divide out the common power of x, and inspect the corner t = 0."""
    xdot, tdot, K = _blown_up_field(nf)
    prec = current_precision()
    scale = nf.scale

    def vanishes(poly: list) -> bool:
        return all(tiny(v, scale, prec) for v in poly)

    j = next((k for k in range(K) if not (vanishes(xdot[k]) and vanishes(tdot[k]))), None)
    try:
        cs = camacho_sad(nf)
    except ResidueUndefined:
        cs = None
    if j is None:
        return BlowUpResult([], False, cs, K, (mpc(0), mpc(0)), True, determined=False)
    P, R = xdot[j], tdot[j]
    corner = (P[0], R[0])
    regular = not (tiny(corner[0], scale, prec) and tiny(corner[1], scale, prec))
    e_inv = vanishes(P)
    sings: list = []
    Rp = UniPoly([0 if tiny(v, scale, prec) else v for v in R])
    if e_inv:
        if not Rp.is_zero() and Rp.degree >= 1:
            sings = [t for t, _ in univariate_roots(Rp, prec)]
    else:
        Pp = UniPoly([0 if tiny(v, scale, prec) else v for v in P])
        if not Pp.is_zero() and Pp.degree >= 1:
            for t, _ in univariate_roots(Pp, prec):
                if tiny(Rp(t), scale * (1 + cabs(t)) ** len(R), prec):
                    sings.append(t)
    return BlowUpResult(sings, regular, cs, j, corner, e_inv)


def camacho_sad(nf: NormalForm):
    """Residue at 0 of beta(x, 0) / (-g(x, 0))."""
    m = nf.m
    g0 = nf.g0
    if m + (m - 1) > len(g0) - 1 or nf.beta.order < m - 1:
        raise ResidueUndefined("Laurent expansion not separable at this truncation order", m=m)
    h = Series1(g0[m : 2 * m], m - 1)
    inv = h.inverse()
    b = [nf.beta[k, 0] for k in range(m)]
    return -sum((b[i] * inv.c[m - 1 - i] for i in range(m)), mpq(0))


def analyze_point(F, G: BiPoly, A: BiPoly, B: BiPoly, P: tuple, order: int = DEFAULT_ORDER):
    """Chart, local form and normal form at one point (convenience for callers)."""
    chart = adapted_chart(F, P, order)
    local = localize_form(F, G, A, B, chart)
    return chart, local, normal_form(local)
