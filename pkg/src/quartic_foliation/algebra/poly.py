"""Bivariate and univariate polynomials over mpq or mpc coefficients.

Coefficients are kept exact (mpq) as long as every input is exact; any
floating coefficient promotes the result to mpc at the current precision.
"""

from __future__ import annotations

import re
from typing import Callable, Iterable, Mapping, Sequence

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from ..errors import ParseError
from .numbers import (
    as_exact,
    cabs,
    current_precision,
    is_exact,
    mpfr_to_str,
    num_from_json,
    num_to_json,
)

NEG_INF = float("-inf")

Monomial = tuple[int, int]


def _norm_coeff(c):
    if isinstance(c, (int, gmpy2.mpz)) or type(c).__name__ == "Fraction":
        return as_exact(c)
    if isinstance(c, complex):
        return mpc(c)
    if isinstance(c, float):
        return mpc(c)
    if isinstance(c, mpfr):
        return mpc(c)
    return c


def monomials(d: int) -> list[Monomial]:
    """Monomials of total degree <= d, by degree, then by descending X power."""
    out = []
    for t in range(d + 1):
        for i in range(t, -1, -1):
            out.append((i, t - i))
    return out


class BiPoly:
    """Immutable polynomial in X, Y stored as a sparse exponent -> coefficient map."""

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping[Monomial, object] | Iterable[tuple[Monomial, object]] | None = None):
        t: dict[Monomial, object] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for (i, j), c in items:
                if i < 0 or j < 0:
                    raise ValueError("negative exponent")
                c = _norm_coeff(c)
                key = (int(i), int(j))
                if key in t:
                    c = t[key] + c
                t[key] = c
        self._t = {k: v for k, v in t.items() if v != 0}

    # construction
    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def from_vector(cls, basis: Sequence[Monomial], vec: Sequence) -> "BiPoly":
        return cls({m: c for m, c in zip(basis, vec)})

    # access
    @property
    def terms(self) -> dict[Monomial, object]:
        return dict(self._t)

    def items(self) -> list[tuple[Monomial, object]]:
        """Terms in canonical order: descending total degree, then descending X power."""
        return sorted(self._t.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0]))

    def coeff(self, i: int, j: int):
        return self._t.get((i, j), mpq(0))

    def vector(self, basis: Sequence[Monomial]) -> list:
        extra = set(self._t) - set(basis)
        if extra:
            raise ValueError(f"monomials {sorted(extra)} outside the basis")
        return [self._t.get(m, mpq(0)) for m in basis]

    def is_zero(self) -> bool:
        return not self._t

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self._t.values())

    def degree(self):
        if not self._t:
            return NEG_INF
        return max(i + j for i, j in self._t)

    def degree_in(self, var: int):
        if not self._t:
            return NEG_INF
        return max(k[var] for k in self._t)

    def homogeneous_part(self, d: int) -> "BiPoly":
        return BiPoly({k: v for k, v in self._t.items() if k[0] + k[1] == d})

    def leading_form(self) -> "BiPoly":
        return self.homogeneous_part(self.degree()) if self._t else BiPoly()

    def max_abs(self) -> mpfr:
        if not self._t:
            return mpfr(0)
        return max(cabs(c) for c in self._t.values())

    # arithmetic
    def __add__(self, other) -> "BiPoly":
        other = _as_poly(other)
        t = dict(self._t)
        for k, v in other._t.items():
            t[k] = t[k] + v if k in t else v
        return BiPoly(t)

    __radd__ = __add__

    def __neg__(self) -> "BiPoly":
        return BiPoly({k: -v for k, v in self._t.items()})

    def __sub__(self, other) -> "BiPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "BiPoly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "BiPoly":
        if not isinstance(other, BiPoly):
            c = _norm_coeff(other)
            return BiPoly({k: v * c for k, v in self._t.items()})
        t: dict[Monomial, object] = {}
        for (i1, j1), c1 in self._t.items():
            for (i2, j2), c2 in other._t.items():
                k = (i1 + i2, j1 + j2)
                p = c1 * c2
                t[k] = t[k] + p if k in t else p
        return BiPoly(t)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "BiPoly":
        c = _norm_coeff(c)
        if is_exact(c):
            c = as_exact(c)
        return BiPoly({k: v / c for k, v in self._t.items()})

    def __pow__(self, n: int) -> "BiPoly":
        if n < 0:
            raise ValueError("negative power")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiPoly):
            try:
                other = _as_poly(other)
            except TypeError:
                return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        return hash(frozenset(self._t.items()))

    def map_coeffs(self, fn: Callable) -> "BiPoly":
        return BiPoly({k: fn(v) for k, v in self._t.items()})

    def to_mpc(self) -> "BiPoly":
        return self.map_coeffs(mpc)

    # calculus and evaluation
    def diff(self, var: int, k: int = 1) -> "BiPoly":
        p = self
        for _ in range(k):
            t = {}
            for (i, j), c in p._t.items():
                e = (i, j)[var]
                if e:
                    t[(i - 1, j) if var == 0 else (i, j - 1)] = c * e
            p = BiPoly(t)
        return p

    @property
    def dX(self) -> "BiPoly":
        return self.diff(0)

    @property
    def dY(self) -> "BiPoly":
        return self.diff(1)

    def __call__(self, x, y):
        if not self._t:
            return mpq(0)
        dx = max(i for i, _ in self._t)
        dy = max(j for _, j in self._t)
        xp = _powers(x, dx)
        yp = _powers(y, dy)
        acc = mpq(0)
        for (i, j), c in self._t.items():
            acc += c * xp[i] * yp[j]
        return acc

    def eval_scale(self, x, y) -> mpfr:
        """Sum of |c| |x|^i |y|^j: the natural magnitude against which a value at (x, y) is small."""
        ax, ay = cabs(x), cabs(y)
        acc = mpfr(0)
        for (i, j), c in self._t.items():
            acc += cabs(c) * ax**i * ay**j
        return acc

    def compose(self, px: "BiPoly", py: "BiPoly") -> "BiPoly":
        """Substitute X -> px, Y -> py."""
        px, py = _as_poly(px), _as_poly(py)
        if not self._t:
            return BiPoly()
        dx = max(i for i, _ in self._t)
        dy = max(j for _, j in self._t)
        xp = [ONE]
        for _ in range(dx):
            xp.append(xp[-1] * px)
        yp = [ONE]
        for _ in range(dy):
            yp.append(yp[-1] * py)
        acc = BiPoly()
        for (i, j), c in self._t.items():
            acc = acc + (xp[i] * yp[j]) * c
        return acc

    def taylor_shift(self, x0, y0) -> "BiPoly":
        """P(x0 + X, y0 + Y)."""
        return self.compose(X + x0, Y + y0)

    def swap(self) -> "BiPoly":
        return BiPoly({(j, i): c for (i, j), c in self._t.items()})

    def coeffs_in(self, var: int) -> list["UniPoly"]:
        """Coefficients as polynomials in the other variable, indexed by power of ``var``."""
        if not self._t:
            return []
        d = self.degree_in(var)
        buckets: list[dict[int, object]] = [dict() for _ in range(d + 1)]
        for (i, j), c in self._t.items():
            e, o = (i, j) if var == 0 else (j, i)
            buckets[e][o] = c
        out = []
        for b in buckets:
            n = max(b) + 1 if b else 0
            out.append(UniPoly([b.get(k, mpq(0)) for k in range(n)]))
        return out

    def restrict_x(self, x0) -> "UniPoly":
        """P(x0, Y) as a polynomial in Y."""
        cs = self.coeffs_in(1)
        return UniPoly([c(x0) for c in cs])

    def restrict_y(self, y0) -> "UniPoly":
        cs = self.coeffs_in(0)
        return UniPoly([c(y0) for c in cs])

    def chop(self, bits: int) -> "BiPoly":
        """Drop coefficients below 2^-bits times the largest one."""
        m = self.max_abs()
        if m == 0:
            return self
        cut = m * mpfr(2) ** (-bits)
        return BiPoly({k: v for k, v in self._t.items() if cabs(v) > cut})

    # text and JSON
    def to_text(self) -> str:
        if not self._t:
            return "0"
        parts: list[str] = []
        for (i, j), c in self.items():
            mono = "*".join(
                s for s in (_var_str("X", i), _var_str("Y", j)) if s
            )
            if is_exact(c):
                q = as_exact(c)
                neg = q < 0
                q = abs(q)
                if mono and q == 1:
                    body = mono
                else:
                    cs = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
                    body = f"{cs}*{mono}" if mono else cs
            else:
                neg = False
                z = mpc(c)
                body = f"({mpfr_to_str(z.real)}{'-' if z.imag < 0 else '+'}{mpfr_to_str(abs(z.imag))}j)"
                body = f"{body}*{mono}" if mono else body
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"BiPoly({self.to_text()!r})"

    @classmethod
    def parse(cls, text: str) -> "BiPoly":
        return _Parser(text).parse()

    def to_json(self, bits: int | None = None) -> dict:
        return {"terms": [{"e": [i, j], "c": num_to_json(c, bits)} for (i, j), c in self.items()]}

    @classmethod
    def from_json(cls, obj: dict) -> "BiPoly":
        if "terms" not in obj:
            raise ValueError("polynomial JSON needs a 'terms' list")
        return cls([((int(t["e"][0]), int(t["e"][1])), num_from_json(t["c"])) for t in obj["terms"]])


def _var_str(v: str, e: int) -> str:
    if e == 0:
        return ""
    return v if e == 1 else f"{v}^{e}"


def _powers(x, n: int) -> list:
    out = [mpq(1)]
    for _ in range(n):
        out.append(out[-1] * x)
    return out


def _as_poly(p) -> BiPoly:
    if isinstance(p, BiPoly):
        return p
    if isinstance(p, (int, gmpy2.mpz, mpq, mpc, mpfr, complex, float)) or type(p).__name__ == "Fraction":
        return BiPoly.const(p)
    raise TypeError(f"cannot treat {type(p).__name__} as a polynomial")


ONE = BiPoly({(0, 0): 1})
X = BiPoly({(1, 0): 1})
Y = BiPoly({(0, 1): 1})


class _Parser:
    _token = re.compile(
        r"\s*(?:(?P<cplx>\(\s*[-+]?[0-9.]+(?:e[-+]?\d+)?\s*[-+]\s*[0-9.]+(?:e[-+]?\d+)?j\s*\))"
        r"|(?P<int>\d+)|(?P<op>[-+*/^])|(?P<var>[A-Za-z_]\w*)|(?P<bad>\S))",
        re.IGNORECASE,
    )

    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = self._token.match(text, pos)
            if m is None or m.end() == pos:
                break
            kind = m.lastgroup
            start = m.start(kind)
            if kind == "bad":
                self._fail(f"unexpected character {m.group(kind)!r}", start)
            self.toks.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def _fail(self, msg: str, offset: int):
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        raise ParseError(msg, line, col)

    def _peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def _next(self):
        tok = self._peek()
        if tok is None:
            self._fail("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def parse(self) -> BiPoly:
        if not self.toks:
            self._fail("empty polynomial", 0)
        total = BiPoly()
        sign = 1
        tok = self._peek()
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            self.i += 1
        total = total + self._term() * sign
        while self._peek() is not None:
            kind, val, off = self._next()
            if kind != "op" or val not in "+-":
                self._fail(f"expected '+' or '-', found {val!r}", off)
            total = total + self._term() * (-1 if val == "-" else 1)
        return total

    def _term(self) -> BiPoly:
        acc = self._factor()
        while True:
            tok = self._peek()
            if tok is None or not (tok[0] == "op" and tok[1] == "*"):
                if tok is not None and not (tok[0] == "op" and tok[1] in "+-"):
                    self._fail(f"expected operator, found {tok[1]!r}", tok[2])
                return acc
            self.i += 1
            acc = acc * self._factor()

    def _factor(self) -> BiPoly:
        kind, val, off = self._next()
        if kind == "int":
            num = int(val)
            tok = self._peek()
            if tok is not None and tok[0] == "op" and tok[1] == "/":
                self.i += 1
                k2, v2, o2 = self._next()
                if k2 != "int":
                    self._fail("denominator must be an integer literal", o2)
                if int(v2) == 0:
                    self._fail("division by zero", o2)
                return BiPoly.const(mpq(num, int(v2)))
            return BiPoly.const(mpq(num))
        if kind == "cplx":
            return BiPoly.const(mpc(val.replace(" ", "")[1:-1]))
        if kind == "var":
            if val not in ("X", "Y"):
                self._fail(f"unknown variable {val!r}; only X and Y are allowed", off)
            base = X if val == "X" else Y
            tok = self._peek()
            if tok is not None and tok[0] == "op" and tok[1] == "^":
                self.i += 1
                k2, v2, o2 = self._next()
                if k2 != "int":
                    self._fail("exponent must be a non-negative integer literal", o2)
                return base ** int(v2)
            return base
        self._fail(f"expected a number or variable, found {val!r}", off)


class UniPoly:
    """Dense univariate polynomial, coefficients ordered from constant upward."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_norm_coeff(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c: tuple = tuple(c)

    @property
    def degree(self):
        return len(self.c) - 1 if self.c else NEG_INF

    def is_zero(self) -> bool:
        return not self.c

    def is_exact(self) -> bool:
        return all(is_exact(v) for v in self.c)

    def lead(self):
        return self.c[-1]

    def __call__(self, x):
        acc = mpq(0)
        for v in reversed(self.c):
            acc = acc * x + v
        return acc

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.c), len(other.c))
        a = list(self.c) + [mpq(0)] * (n - len(self.c))
        b = list(other.c) + [mpq(0)] * (n - len(other.c))
        return UniPoly(x + y for x, y in zip(a, b))

    def __neg__(self) -> "UniPoly":
        return UniPoly(-v for v in self.c)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            return UniPoly(v * other for v in self.c)
        if not self.c or not other.c:
            return UniPoly()
        out = [mpq(0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            for j, b in enumerate(other.c):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, UniPoly) and self.c == other.c

    def __repr__(self) -> str:
        return f"UniPoly({list(self.c)!r})"

    def diff(self, k: int = 1) -> "UniPoly":
        c = list(self.c)
        for _ in range(k):
            c = [v * i for i, v in enumerate(c)][1:]
        return UniPoly(c)

    def monic(self) -> "UniPoly":
        lc = self.c[-1]
        return UniPoly(v / lc for v in self.c)

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        dq = len(r) - len(other.c)
        if dq < 0:
            return UniPoly(), self
        q = [mpq(0)] * (dq + 1)
        lc = other.c[-1]
        for k in range(dq, -1, -1):
            coef = r[k + len(other.c) - 1] / lc
            q[k] = coef
            for j, b in enumerate(other.c):
                r[k + j] -= coef * b
            r[k + len(other.c) - 1] = mpq(0)
        return UniPoly(q), UniPoly(r[: len(other.c) - 1])

    def gcd(self, other: "UniPoly") -> "UniPoly":
        """Monic gcd; exact inputs only."""
        if not (self.is_exact() and other.is_exact()):
            raise TypeError("exact gcd requires rational coefficients")
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
            if not b.is_zero():
                b = b.monic()
        return a.monic() if not a.is_zero() else a

    def squarefree_decomposition(self) -> list[tuple["UniPoly", int]]:
        """Yun's algorithm: returns [(s_k, k)] with self = lc * prod s_k^k, s_k squarefree, coprime."""
        if self.degree == NEG_INF or self.degree < 1:
            return []
        f = self.monic()
        fp = f.diff()
        a = f.gcd(fp)
        b = f.divmod(a)[0]
        c = fp.divmod(a)[0]
        d = c - b.diff()
        out = []
        k = 1
        while b.degree >= 1:
            a = b.gcd(d)
            if a.degree >= 1:
                out.append((a, k))
            b = b.divmod(a)[0]
            c = d.divmod(a)[0]
            d = c - b.diff()
            k += 1
        return out

    def max_abs(self) -> mpfr:
        return max((cabs(v) for v in self.c), default=mpfr(0))


def poly_from_roots(roots: Sequence) -> UniPoly:
    p = UniPoly([1])
    for r in roots:
        p = p * UniPoly([-r, 1])
    return p


__all__ = ["BiPoly", "UniPoly", "X", "Y", "ONE", "NEG_INF", "monomials", "poly_from_roots", "current_precision"]
