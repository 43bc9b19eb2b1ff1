"""Independent reference values for the test suite, computed with sympy and mpmath.

Nothing here imports quartic_foliation: the quartics are read from the committed
fixture files as text and parsed by sympy.  Output: tests/data/oracles.json.

Run from the repository root: python3 tools/make_oracles.py
"""

import json
import random
from pathlib import Path

import mpmath
import sympy as sp

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "data" / "oracles.json"
DPS = 90
X, Y = sp.symbols("X Y")


def parse(text: str) -> sp.Expr:
    return sp.sympify(text.replace("^", "**"), locals={"X": X, "Y": Y}, rational=True)


def cstr(z) -> list:
    z = mpmath.mpc(z)
    return [mpmath.nstr(z.real, 70), mpmath.nstr(z.imag, 70)]


def common_zeros(P: sp.Expr, Q: sp.Expr) -> tuple[list, list]:
    """Affine common zeros of P and Q: resultant in X, its roots, then 2-D Newton per root."""
    res = sp.Poly(sp.resultant(P, Q, Y), X)
    coeffs = [str(c) for c in res.all_coeffs()]
    fP = sp.lambdify((X, Y), P, "mpmath")
    fQ = sp.lambdify((X, Y), Q, "mpmath")
    roots = mpmath.polyroots([mpmath.mpf(sp.Rational(c).p) / sp.Rational(c).q for c in coeffs], maxsteps=400, extraprec=600)
    pts = []
    ycoef = [sp.lambdify(X, c, "mpmath") for c in sp.Poly(P, Y).all_coeffs()]
    for x in roots:
        ys = mpmath.polyroots([f(x) for f in ycoef], maxsteps=200, extraprec=200)
        y0 = min(ys, key=lambda y: abs(fQ(x, y)))
        sol = mpmath.findroot([lambda a, b: fP(a, b), lambda a, b: fQ(a, b)], (x, y0), tol=mpmath.mpf(10) ** (-80))
        pts.append((sol[0], sol[1]))
    pts.sort(key=lambda p: (float(mpmath.re(p[0])), float(mpmath.im(p[0]))))
    return coeffs, [[cstr(p[0]), cstr(p[1])] for p in pts]


def grid_surrogate() -> dict:
    """Exact kernel dimensions of degree-L interpolation on the 4x4 integer grid."""
    pts = [(i, j) for i in range(1, 5) for j in range(1, 5)]
    out = {}
    for L in (3, 4, 5):
        mons = [(a, t - a) for t in range(L + 1) for a in range(t, -1, -1)]
        for n in (15, 16):
            M = sp.Matrix([[sp.Integer(x) ** a * sp.Integer(y) ** b for a, b in mons] for x, y in pts[:n]])
            out[f"L{L}_n{n}"] = len(mons) - M.rank()
    return out


def chart_jets(F: sp.Expr, order: int) -> dict:
    """Coefficients l_rs of the inverse chart Y = l(x, y) with F(x, l) = y, by undetermined coefficients."""
    x, y = sp.symbols("x y")
    cs = {}
    l = 0
    for t in range(1, order + 1):
        new = {(r, t - r): sp.Symbol(f"c{r}_{t - r}") for r in range(t + 1)}
        trial = l + sum(v * x**r * y**s for (r, s), v in new.items())
        E = sp.expand(F.subs({X: x, Y: trial}) - y)
        eqs = [sp.Poly(E, x, y).coeff_monomial(x**r * y**s) for (r, s) in new]
        sol = sp.solve(eqs, list(new.values()), dict=True)[0]
        for k, v in new.items():
            cs[k] = sol[v]
        l = l + sum(sol[v] * x**r * y**s for (r, s), v in new.items())
    return {f"{r},{s}": str(v) for (r, s), v in cs.items()}


def local_quartic(seed: int) -> sp.Expr:
    rng = random.Random(seed)
    F = Y
    for t in range(1, 5):
        for a in range(t + 1):
            if (a, t - a) == (0, 1):
                continue
            F += sp.Rational(rng.randint(-5, 5), rng.randint(1, 6)) * X**a * Y ** (t - a)
    return sp.expand(F)


def main() -> None:
    mpmath.mp.dps = DPS
    neeman = json.loads((ROOT / "fixtures" / "neeman.json").read_text())
    pencil = json.loads((ROOT / "fixtures" / "pencil.json").read_text())
    F = parse(neeman["quartic"])
    F2 = parse(pencil["second"])
    out: dict = {"quartic": neeman["quartic"], "second": pencil["second"]}
    out["res_F_FX_Y"], out["C_cap_Q"] = common_zeros(F, sp.diff(F, X))
    _, out["pencil_points"] = common_zeros(F, F2)
    out["grid_kernel_dims"] = grid_surrogate()
    jets = {}
    for seed in (1, 2, 3):
        Fl = local_quartic(seed)
        terms = [[i, j, str(c)] for (i, j), c in sp.Poly(Fl, X, Y).terms()]
        jets[str(seed)] = {"F_terms": terms, "l": chart_jets(Fl, 4)}
    out["chart_jets"] = jets
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
    print("wrote", OUT.relative_to(ROOT))


if __name__ == "__main__":
    main()
