"""Pre-regularity of foliations Omega = G dF + F (B dX - A dY) along Q = {F = 0}.

G = l1 l2 C^2 with C = F_X and two bitangents l1, l2 cuts 2D on Q, where
D = Q1 + ... + Q16 - 4 D_inf is 2-torsion.  Each Qj is a singularity with
tangency multiplicity 2; pre-regularity there amounts to five affine
conditions on the 2-jets of (A, B).  This module assembles those conditions
for all 16 points, decides feasibility with a rank certificate, and checks
the argument that is supposed to rule out every degree-7 (A, B).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpc, mpfr, mpq

from .algebra.linalg import DEFAULT_POLICY, SolveOutcome, TolPolicy, normalize_rows, solve_or_refute
from .algebra.numbers import cabs, current_precision, num_to_json, resolve_precision, short_str, tiny, working_precision
from .algebra.poly import BiPoly, monomials
from .divisors import Divisor, is_principal
from .errors import (
    AmbiguousRank,
    FXXVanishes,
    FYVanishes,
    GenericityFails,
    NoDecomposition,
    NonTransverseC,
    NotSameDivisor,
    PointOnC,
    RescaleDegenerate,
    ResidueUndefined,
    VerdictMismatch,
)
from .geometry import Bitangent, Normalization, Quartic, intersect_curves, normalize_pair, refine_point
from .localform import DEFAULT_ORDER, adapted_chart, blow_up_once, jet_verdict, localize_form, normal_form

AB_DEGREE = 7
COND_TAGS = ("cond1", "cond2", "cond3", "cond4", "cond5")

REFUTED = "REFUTED_AS_PAPER_PREDICTS"
FEASIBLE = "FEASIBLE_FOUND"
INCONCLUSIVE = "INCONCLUSIVE"


def _pt_json(p: tuple) -> list:
    return [num_to_json(v) for v in p]


# ---------------------------------------------------------------- scenario

@dataclass
class NeemanScenario:
    quartic: Quartic
    l1: BiPoly
    l2: BiPoly
    a: object
    b: object
    C: BiPoly
    G: BiPoly
    points: list  # Q1..Q16
    normalization: Normalization | None = None
    precision: int = 256

    @property
    def F(self) -> BiPoly:
        return self.quartic.F

    @property
    def labels(self) -> list[str]:
        return [f"Q{j + 1}" for j in range(len(self.points))]

    def divisor(self, k: int = 1) -> Divisor:
        return Divisor.from_points(self.points, k, 4 * k)

    def to_json(self) -> dict:
        return {
            "quartic": self.F.to_text(),
            "a": num_to_json(self.a),
            "b": num_to_json(self.b),
            "l1": self.l1.to_text(),
            "l2": self.l2.to_text(),
            "points": {lab: _pt_json(p) for lab, p in zip(self.labels, self.points)},
            "normalization": None if self.normalization is None else self.normalization.to_json(),
        }


def genericity_value(F: BiPoly, a, b, P: tuple):
    """a F_X + b F_XX / 2 + a b F_XY at P."""
    return a * F.dX(*P) + b * F.dX.dX(*P) / 2 + a * b * F.dX.dY(*P)


def build_neeman(
    F,
    bt1: Bitangent,
    bt2: Bitangent,
    precision_bits: int | None = None,
    infinity_line: tuple | None = None,
    check_genericity: bool = True,
) -> NeemanScenario:
    prec = resolve_precision(precision_bits)
    with working_precision(prec):
        norm = normalize_pair(F, bt1, bt2, infinity_line, prec)
        Fn = norm.quartic.F
        C = Fn.dX
        recs = intersect_curves(Fn, C, prec)
        affine = [r for r in recs if not r.at_infinity]
        if len(affine) != 12 or any(r.multiplicity != 1 for r in affine):
            raise NonTransverseC(
                "C = F_X does not meet Q in 12 simple affine points",
                multiplicities=[r.multiplicity for r in recs],
            )
        pts = [r.point for r in affine]
        # Q13 is the image of the chosen contact point of l1
        t1 = [refine_point(Fn, norm.l1, p, 2) for p in norm.touch1]
        t2 = [refine_point(Fn, norm.l2, p, 2) for p in norm.touch2]
        pts += t1 + t2
        FY, FXX = Fn.dY, Fn.dX.dX
        for j, p in enumerate(pts):
            sc = Fn.eval_scale(cabs(p[0]) + 1, cabs(p[1]) + 1)
            if tiny(FY(*p), sc, prec):
                raise FYVanishes("F_Y vanishes at a scenario point", point=f"Q{j + 1}")
            if j < 12 and tiny(FXX(*p), sc, prec):
                raise FXXVanishes("F_XX vanishes at a point of C ∩ Q", point=f"Q{j + 1}")
            if j >= 12 and tiny(C(*p), sc, prec):
                raise PointOnC("a bitangency point lies on C", point=f"Q{j + 1}")
        if check_genericity:
            gv = genericity_value(Fn, norm.a, norm.b, pts[12])
            sc = Fn.eval_scale(cabs(pts[12][0]) + 1, cabs(pts[12][1]) + 1) * (1 + cabs(norm.a)) * (1 + cabs(norm.b))
            if tiny(gv, sc, prec):
                raise GenericityFails("a F_X + b F_XX/2 + a b F_XY vanishes at Q13", value=short_str(cabs(gv)))
        G = norm.l1 * norm.l2 * C * C
    return NeemanScenario(norm.quartic, norm.l1, norm.l2, norm.a, norm.b, C, G, pts, norm, prec)


# ---------------------------------------------------------------- point conditions

def condition_rhs(scenario_or_F, P: tuple, G: BiPoly | None = None) -> tuple:
    """Right-hand sides of the five point conditions at P.

    A = G_Y;  A F_X + B F_Y = 0;  A_Y = G_YY/2 + F_YY G_Y/(2 F_Y);
    B_Y - A_X = -F_XY G_Y/F_Y - G_XY;  B_X = -G_XX/2 - F_XX G_Y/(2 F_Y).
    """
    if G is None:
        F, G = scenario_or_F.F, scenario_or_F.G
    else:
        F = scenario_or_F.F if hasattr(scenario_or_F, "F") else scenario_or_F
    fy = F.dY(*P)
    gy = G.dY(*P)
    return (
        gy,
        mpq(0),
        G.dY.dY(*P) / 2 + F.dY.dY(*P) * gy / (2 * fy),
        -F.dX.dY(*P) * gy / fy - G.dX.dY(*P),
        -G.dX.dX(*P) / 2 - F.dX.dX(*P) * gy / (2 * fy),
    )


def condition_lhs(F: BiPoly, A: BiPoly, B: BiPoly, P: tuple) -> tuple:
    return (
        A(*P),
        A(*P) * F.dX(*P) + B(*P) * F.dY(*P),
        A.dY(*P),
        B.dY(*P) - A.dX(*P),
        B.dX(*P),
    )


def _functional_rows(F: BiPoly, P: tuple, mons: list) -> list[list]:
    """Each condition as a linear functional on (coefficients of A | coefficients of B)."""
    n = len(mons)
    x, y = P
    px = [mpc(1)]
    py = [mpc(1)]
    d = max(i + j for i, j in mons)
    for _ in range(d):
        px.append(px[-1] * x)
        py.append(py[-1] * y)

    def val(i, j):
        return px[i] * py[j]

    def dx(i, j):
        return i * px[i - 1] * py[j] if i else mpc(0)

    def dy(i, j):
        return j * px[i] * py[j - 1] if j else mpc(0)

    fx, fy = F.dX(*P), F.dY(*P)
    zero = [mpc(0)] * n
    v = [val(i, j) for i, j in mons]
    vx = [dx(i, j) for i, j in mons]
    vy = [dy(i, j) for i, j in mons]
    return [
        v + zero,
        [fx * t for t in v] + [fy * t for t in v],
        vy + zero,
        [-t for t in vx] + vy,
        zero + vx,
    ]


@dataclass
class ConditionSet:
    rows: list
    rhs: list
    tags: list  # (point label, condition tag)
    monomials: list

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def audit(self) -> list[str]:
        return [f"{p}:{c}" for p, c in self.tags]


def assemble_conditions(scenario: NeemanScenario, labels: list[str] | None = None, conds=COND_TAGS) -> ConditionSet:
    mons = monomials(AB_DEGREE)
    rows, rhs, tags = [], [], []
    with working_precision(scenario.precision):
        for lab, P in zip(scenario.labels, scenario.points):
            if labels is not None and lab not in labels:
                continue
            fr = _functional_rows(scenario.F, P, mons)
            rr = condition_rhs(scenario, P)
            for k, tag in enumerate(COND_TAGS):
                if tag not in conds:
                    continue
                rows.append(fr[k])
                rhs.append(mpc(rr[k]))
                tags.append((lab, tag))
    return ConditionSet(rows, rhs, tags, mons)


def split_solution(vec: list, mons: list | None = None) -> tuple[BiPoly, BiPoly]:
    mons = mons or monomials(AB_DEGREE)
    n = len(mons)
    return BiPoly.from_vector(mons, vec[:n]), BiPoly.from_vector(mons, vec[n:])


# ---------------------------------------------------------------- three verdicts

@dataclass
class PointReport:
    label: str
    point: tuple
    m: int
    jet_ok: bool
    jet_residuals: dict
    point_ok: bool | None
    point_residuals: list | None
    blowup_regular: bool
    cs_index: object
    preregular: bool

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "m": self.m,
            "jet_ok": self.jet_ok,
            "jet_residuals": {k: short_str(cabs(v), 6) for k, v in self.jet_residuals.items()},
            "point_ok": self.point_ok,
            "point_residuals": None if self.point_residuals is None else [short_str(v, 6) for v in self.point_residuals],
            "blowup_regular": self.blowup_regular,
            "cs_index": None if self.cs_index is None else num_to_json(self.cs_index, 64),
            "preregular": self.preregular,
        }


def point_condition_verdict(F: BiPoly, G: BiPoly, A: BiPoly, B: BiPoly, P: tuple, prec: int | None = None):
    lhs = condition_lhs(F, A, B, P)
    rhs = condition_rhs(F, P, G)
    scale = max([cabs(v) for v in lhs + rhs] + [cabs(F.dX(*P) * A(*P)), cabs(F.dY(*P) * B(*P))])
    if scale == 0:
        scale = mpfr(1)
    res = [cabs(u - v) / scale for u, v in zip(lhs, rhs)]
    ok = all(tiny(r, 1, prec or current_precision()) for r in res)
    return ok, res


def check_point(F, G: BiPoly, A: BiPoly, B: BiPoly, P: tuple, label: str = "", order: int = DEFAULT_ORDER) -> PointReport:
    Fp = F.F if hasattr(F, "F") else F
    chart = adapted_chart(Fp, P, order)
    nf = normal_form(localize_form(Fp, G, A, B, chart))
    jet_ok, jets = jet_verdict(nf)
    bu = blow_up_once(nf)
    if nf.m == 2:
        pt_ok, pres = point_condition_verdict(Fp, G, A, B, P)
    else:
        pt_ok, pres = None, None
    verdicts = [jet_ok, bu.q_corner_regular] + ([pt_ok] if pt_ok is not None else [])
    if len(set(verdicts)) != 1 or not bu.determined:
        raise VerdictMismatch(
            "jet, point-condition and blow-up verdicts disagree",
            label=label,
            m=nf.m,
            jet=jet_ok,
            point=pt_ok,
            blowup=bu.q_corner_regular,
        )
    if jet_ok and bu.cs_index is not None:
        # a regular corner forces index 1 on the branch y = 0
        if not tiny(bu.cs_index - 1, 1, current_precision()):
            raise VerdictMismatch("pre-regular point with Camacho-Sad index != 1", label=label, index=str(bu.cs_index))
    return PointReport(label, P, nf.m, jet_ok, jets, pt_ok, pres, bu.q_corner_regular, bu.cs_index, jet_ok)


def check_preregular(F, G: BiPoly, A: BiPoly, B: BiPoly, points: list, labels: list[str] | None = None) -> list[PointReport]:
    labels = labels or [f"Q{j + 1}" for j in range(len(points))]
    return [check_point(F, G, A, B, P, lab) for lab, P in zip(labels, points)]


# ---------------------------------------------------------------- decompositions

@dataclass
class Decomposition:
    h: BiPoly
    k: BiPoly
    residual: mpfr
    scale: mpfr
    gauge_dim: int  # dimension of the (mu F, -mu C) family

    def to_json(self) -> dict:
        return {
            "h_degree": int(self.h.degree()) if not self.h.is_zero() else None,
            "k_degree": int(self.k.degree()) if not self.k.is_zero() else None,
            "residual": short_str(self.residual, 6),
            "scale": short_str(self.scale, 6),
            "gauge_dim": self.gauge_dim,
        }


def _combination_system(targets: BiPoly, gens: list[tuple[BiPoly, int]]):
    """Columns g * m for each generator g and monomial m of degree <= d."""
    cols, blocks = [], []
    for g, d in gens:
        ms = monomials(d) if d >= 0 else []
        blocks.append(ms)
        for mon in ms:
            cols.append(g * BiPoly({mon: 1}))
    top = max([int(targets.degree()) if not targets.is_zero() else 0] + [int(c.degree()) for c in cols if not c.is_zero()])
    rows_m = monomials(top)
    rows = [[mpc(c.coeff(*rm)) for c in cols] for rm in rows_m]
    rhs = [mpc(targets.coeff(*rm)) for rm in rows_m]
    return rows, rhs, blocks


def _solve_combination(P: BiPoly, gens, policy: TolPolicy):
    rows, rhs, blocks = _combination_system(P, gens)
    out = solve_or_refute(rows, rhs, policy)
    parts, pos = [], 0
    for ms in blocks:
        parts.append(BiPoly.from_vector(ms, out.solution[pos : pos + len(ms)]))
        pos += len(ms)
    return out, parts


def decompose_prop2(P: BiPoly, F, C: BiPoly, deg_h: int = 4, deg_k: int = 3, policy: TolPolicy = DEFAULT_POLICY) -> Decomposition:
    """P = h C + k F with deg h <= deg_h, deg k <= deg_k (minimum-norm member of the family)."""
    Fp = F.F if hasattr(F, "F") else F
    if P.is_zero():
        return Decomposition(BiPoly(), BiPoly(), mpfr(0), mpfr(0), 0)
    out, (h, k) = _solve_combination(P, [(C, deg_h), (Fp, deg_k)], policy)
    if not out.feasible:
        raise NoDecomposition("P is not in C * P_h + F * P_k", margin=short_str(out.margin))
    gauge = out.cert.n_cols - out.cert.rank
    return Decomposition(h, k, out.residual_norm, out.rhs_norm, gauge)


def decompose_prop1(Ht: BiPoly, H: BiPoly, F, policy: TolPolicy = DEFAULT_POLICY) -> tuple:
    """(c, k) with Ht = c H + k F; raises NotSameDivisor if no such pair exists."""
    Fp = F.F if hasattr(F, "F") else F
    d = max(int(Ht.degree()), int(H.degree())) - int(Fp.degree())
    out, (c, k) = _solve_combination(Ht, [(H, 0), (Fp, d)], policy)
    if not out.feasible:
        raise NotSameDivisor("no constant c and polynomial k with Ht = c H + k F", margin=short_str(out.margin))
    return c.coeff(0, 0), k


# ---------------------------------------------------------------- u-hat along Q

@dataclass
class UhatResult:
    c: object
    uhat: BiPoly  # h' + c W with W = (l1 l2) F_XX + (l1 l2)_X F_X, i.e. F replaced by cF
    u: BiPoly  # h' + W, which should vanish at all 16 points
    u_residuals: dict  # label -> |u(Qj)| / scale
    uhat_residuals: dict  # label -> |uhat(Qj)| / scale
    scale: mpfr
    derivative_jet: object  # (uhat|Q)' at Q13 from u_X - F_X/F_Y u_Y
    closed_form_rescaled: object  # c * K
    derivative_fd: object
    derivative_u_jet: object  # same derivative for the unrescaled u
    closed_form_unrescaled: object  # K - (k' + a h'_Y)
    K: object
    kprime_plus_a_hprime_y: object

    @property
    def rel_diff_rescaled(self) -> mpfr:
        den = max(cabs(self.derivative_jet), cabs(self.closed_form_rescaled))
        return cabs(self.derivative_jet - self.closed_form_rescaled) / den if den > 0 else mpfr(0)

    @property
    def rel_diff_unrescaled(self) -> mpfr:
        den = cabs(self.K) + cabs(self.kprime_plus_a_hprime_y)
        return cabs(self.derivative_u_jet - self.closed_form_unrescaled) / den if den > 0 else mpfr(0)

    @property
    def fd_abs_diff(self) -> mpfr:
        return cabs(self.derivative_fd - self.derivative_jet)

    def to_json(self) -> dict:
        return {
            "c": num_to_json(self.c, 64),
            "u_residuals": {k: short_str(v, 6) for k, v in self.u_residuals.items()},
            "uhat_residuals": {k: short_str(v, 6) for k, v in self.uhat_residuals.items()},
            "derivative_jet": num_to_json(self.derivative_jet, 64),
            "closed_form_rescaled": num_to_json(self.closed_form_rescaled, 64),
            "rel_diff_rescaled": short_str(self.rel_diff_rescaled, 6),
            "derivative_fd": num_to_json(self.derivative_fd, 64),
            "abs_diff_fd": short_str(self.fd_abs_diff, 6),
            "derivative_u_jet": num_to_json(self.derivative_u_jet, 64),
            "closed_form_unrescaled": num_to_json(self.closed_form_unrescaled, 64),
            "rel_diff_unrescaled": short_str(self.rel_diff_unrescaled, 6),
            "K": num_to_json(self.K, 64),
            "kprime_plus_a_hprime_y": num_to_json(self.kprime_plus_a_hprime_y, 64),
        }


def derivative_along_Q(F: BiPoly, u: BiPoly, P: tuple):
    return u.dX(*P) - F.dX(*P) / F.dY(*P) * u.dY(*P)


def _point_on_Q_at_x(F: BiPoly, x, y_guess, iters: int = 60):
    y = y_guess
    fy = F.dY
    for _ in range(iters):
        step = F(x, y) / fy(x, y)
        y -= step
        if cabs(step) <= cabs(y) * mpfr(2) ** (-current_precision() + 4) or step == 0:
            break
    return y


def fd_derivative_along_Q(F: BiPoly, u: BiPoly, P: tuple, h: str = "1e-15"):
    """Central difference of X -> u(X, Y(X)) on Q through P."""
    hx = mpfr(h)
    slope = -F.dX(*P) / F.dY(*P)
    yp = _point_on_Q_at_x(F, P[0] + hx, P[1] + slope * hx)
    ym = _point_on_Q_at_x(F, P[0] - hx, P[1] - slope * hx)
    return (u(P[0] + hx, yp) - u(P[0] - hx, ym)) / (2 * hx)


def uhat_pipeline(scenario: NeemanScenario, hp: BiPoly, kp: BiPoly, fd_step: str = "1e-15") -> UhatResult:
    F, a, b = scenario.F, scenario.a, scenario.b
    L = scenario.l1 * scenario.l2
    W = L * F.dX.dX + L.dX * F.dX
    with working_precision(scenario.precision):
        Q13 = scenario.points[12]
        hy, k0 = hp.dY(*Q13), kp(*Q13)
        if tiny(hy, hp.max_abs() + 1) or tiny(k0, kp.max_abs() + 1):
            raise RescaleDegenerate("k' + c a h'_Y = 0 has no nonzero finite solution c", hprime_y=short_str(cabs(hy)), kprime=short_str(cabs(k0)))
        c = -k0 / (a * hy)
        uhat = hp + W * c
        u = hp + W
        scale = max(
            max(q.eval_scale(cabs(p[0]) + 1, cabs(p[1]) + 1) for q in (hp, W)) for p in scenario.points
        )
        res_u = {lab: cabs(u(*p)) / scale for lab, p in zip(scenario.labels, scenario.points)}
        res_uhat = {lab: cabs(uhat(*p)) / scale for lab, p in zip(scenario.labels, scenario.points)}
        K = -(a**2) * F.dX(*Q13) - a * b * F.dX.dX(*Q13) / 2 - a**2 * b * F.dX.dY(*Q13)
        djet = derivative_along_Q(F, uhat, Q13)
        dfd = fd_derivative_along_Q(F, uhat, Q13, fd_step)
        du = derivative_along_Q(F, u, Q13)
        kah = k0 + a * hy
    return UhatResult(c, uhat, u, res_u, res_uhat, scale, djet, c * K, dfd, du, K - kah, K, kah)


# ---------------------------------------------------------------- divisor side

@dataclass
class DivisorVerdicts:
    D: object
    twoD: object
    witness_matches_G: bool
    witness_c: object

    def to_json(self) -> dict:
        return {
            "D": self.D.to_json(),
            "2D": self.twoD.to_json(),
            "witness_matches_G": self.witness_matches_G,
            "witness_over_G": None if self.witness_c is None else num_to_json(self.witness_c, 64),
        }


def divisor_verdicts(scenario: NeemanScenario, policy: TolPolicy = DEFAULT_POLICY) -> DivisorVerdicts:
    with working_precision(scenario.precision):
        vD = is_principal(scenario.quartic, scenario.divisor(1), policy)
        v2 = is_principal(scenario.quartic, scenario.divisor(2), policy)
        ok, c = False, None
        if v2.principal and v2.witness is not None:
            try:
                c, _ = decompose_prop1(v2.witness, scenario.G, scenario.F, policy)
                ok = not tiny(c, 1)
            except NotSameDivisor:
                ok = False
    return DivisorVerdicts(vD, v2, ok, c)


# ---------------------------------------------------------------- the theorem run

@dataclass
class TheoremReport:
    verdict: str
    system: dict
    divisors: dict | None
    feasible_branch: dict | None = None
    ab_on_C: dict | None = None
    omega_degree: dict | None = None
    notes: list = field(default_factory=list)
    audit: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "system": self.system,
            "divisors": self.divisors,
            "feasible_branch": self.feasible_branch,
            "ab_on_C": self.ab_on_C,
            "omega_degree": self.omega_degree,
            "notes": self.notes,
            "audit": self.audit,
        }


def ab_vanishing_on_C(scenario: NeemanScenario, policy: TolPolicy = DEFAULT_POLICY) -> dict:
    """Solve only the first two conditions and evaluate A, B at Q1..Q12."""
    cs = assemble_conditions(scenario, conds=("cond1", "cond2"))
    rows, rhs = normalize_rows(cs.rows, cs.rhs)
    out = solve_or_refute(rows, rhs, policy)
    A, B = split_solution(out.solution)
    vals = {}
    with working_precision(scenario.precision):
        for lab, p in zip(scenario.labels[:12], scenario.points[:12]):
            sA = A.eval_scale(cabs(p[0]) + 1, cabs(p[1]) + 1) or mpfr(1)
            sB = B.eval_scale(cabs(p[0]) + 1, cabs(p[1]) + 1) or mpfr(1)
            vals[lab] = (cabs(A(*p)) / sA, cabs(B(*p)) / sB)
    worst = max(max(v) for v in vals.values())
    return {"feasible": out.feasible, "max_rel_AB": worst, "values": vals}


def omega_degree(G: BiPoly, F: BiPoly, A: BiPoly, B: BiPoly) -> dict:
    """Coefficient degrees of G dF + F(B dX - A dY); the foliation degree is one less when generic at infinity."""
    PX = G * F.dX + F * B
    PY = G * F.dY - F * A
    d = int(max(PX.degree(), PY.degree()))
    return {"coefficient_degree": d, "foliation_degree": d - 1}


def refute_theorem(scenario: NeemanScenario, policy: TolPolicy = DEFAULT_POLICY) -> TheoremReport:
    with working_precision(scenario.precision):
        cs = assemble_conditions(scenario)
        rows, rhs = normalize_rows(cs.rows, cs.rhs)
        try:
            out: SolveOutcome = solve_or_refute(rows, rhs, policy)
        except AmbiguousRank as exc:
            return TheoremReport(INCONCLUSIVE, {"shape": list(cs.shape), "error": exc.to_json()}, None, audit=cs.audit())
        system = {"shape": list(cs.shape), **out.to_json()}
        try:
            dv = divisor_verdicts(scenario, policy)
        except AmbiguousRank as exc:
            return TheoremReport(INCONCLUSIVE, system, {"error": exc.to_json()}, audit=cs.audit())
        div_ok = (not dv.D.principal) and dv.twoD.principal
        report = TheoremReport(INCONCLUSIVE, system, dv.to_json(), audit=cs.audit())
        if not out.feasible:
            if out.rank_jump == 1 and div_ok:
                report.verdict = REFUTED
                report.notes.append("no degree-7 (A, B) satisfies the necessary point conditions")
            else:
                report.notes.append("infeasible, but the divisor verdicts do not match D != 0, 2D = 0")
            return report
        # a solution of the necessary conditions exists: check it is a genuine pre-regular foliation
        A, B = split_solution(out.solution, cs.monomials)
        A, B = A.chop(scenario.precision // 2), B.chop(scenario.precision // 2)
        branch: dict = {"A": A.to_json(96), "B": B.to_json(96)}
        try:
            reports = check_preregular(scenario.quartic, scenario.G, A, B, scenario.points, scenario.labels)
            branch["points"] = [r.to_json() for r in reports]
            branch["all_preregular"] = all(r.preregular for r in reports)
        except (VerdictMismatch, ResidueUndefined) as exc:
            branch["points_error"] = exc.to_json()
            branch["all_preregular"] = False
        report.omega_degree = omega_degree(scenario.G, scenario.F, A, B)
        try:
            dA = decompose_prop2(A, scenario.F, scenario.C, 4, 3, policy)
            dB = decompose_prop2(B, scenario.F, scenario.C, 4, 3, policy)
            branch["prop2"] = {"A": dA.to_json(), "B": dB.to_json()}
            uh = uhat_pipeline(scenario, dB.h, dB.k)
            branch["uhat"] = uh.to_json()
            # the closing step needs u|Q not identically zero; a degree-4 u vanishing at Q1..Q16
            # lies in the interpolation kernel of D, which is span{F}
            out_u, (mu,) = _solve_combination(uh.u, [(scenario.F, 0)], policy)
            branch["u_multiple_of_F"] = {"feasible": out_u.feasible, "mu": num_to_json(mu.coeff(0, 0), 64), "margin": short_str(out_u.margin, 6)}
            if out_u.feasible:
                report.notes.append("u = mu F vanishes identically on Q, so the contradiction step does not apply")
        except (NoDecomposition, RescaleDegenerate) as exc:
            branch["prop2_error"] = exc.to_json()
        report.feasible_branch = branch
        report.verdict = FEASIBLE if branch.get("all_preregular") else INCONCLUSIVE
        if report.verdict == FEASIBLE:
            report.notes.append("the solution of the necessary conditions is pre-regular at all 16 points")
    return report


# ---------------------------------------------------------------- pencil control and oracles

@dataclass
class PencilReport:
    points: list
    reports: list
    cs_sum: object
    divisor_principal: bool
    kernel_dim: int

    @property
    def all_preregular(self) -> bool:
        return all(r.preregular for r in self.reports)

    def to_json(self) -> dict:
        return {
            "n_points": len(self.points),
            "all_preregular": self.all_preregular,
            "cs_indices": [num_to_json(r.cs_index, 64) for r in self.reports],
            "cs_sum": num_to_json(self.cs_sum, 64),
            "divisor_principal": self.divisor_principal,
            "kernel_dim": self.kernel_dim,
            "points": [r.to_json() for r in self.reports],
        }


def pencil_control(F, F2: BiPoly, precision_bits: int | None = None) -> PencilReport:
    """Omega = F2 dF - F dF2: base points are m = 1 singularities, checked by blow-up."""
    prec = resolve_precision(precision_bits)
    Fp = F.F if hasattr(F, "F") else F
    with working_precision(prec):
        recs = [r for r in intersect_curves(Fp, F2, prec) if not r.at_infinity]
        pts = [r.point for r in recs]
        reports = check_preregular(Fp, F2, F2.dY, -F2.dX, pts)
        cs_sum = sum((r.cs_index for r in reports), mpc(0))
        v = is_principal(Fp, Divisor.from_points(pts, 1, 4))
    return PencilReport(pts, reports, cs_sum, v.principal, v.kernel_dim)


def double_fiber_pencil(scenario: NeemanScenario) -> tuple[BiPoly, BiPoly]:
    """(A, B) of the pencil generated by F^2 and H = C (l1 l2 C - F (l1 l2)_X).

    H restricts to Q like G, and 2 H dF - F dH = 2 (G dF + F (B dX - A dY))."""
    F, C = scenario.F, scenario.C
    L = scenario.l1 * scenario.l2
    P = -C * L.dX  # H = G + F P
    G = scenario.G
    half = mpq(1, 2)
    B = P * F.dX * half - G.dX * half - F * P.dX * half
    A = -(P * F.dY * half - G.dY * half - F * P.dY * half)
    return A, B
