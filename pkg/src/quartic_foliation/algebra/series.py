"""Truncated power series in one or two variables, used for local jets."""

from __future__ import annotations

from typing import Sequence

from gmpy2 import mpq

from .poly import BiPoly


class Series2:
    """Power series in (x, y) known exactly through total degree ``order``.

    ``c[r][s]`` is the coefficient of x^r y^s, for r + s <= order.
    """

    __slots__ = ("order", "c")

    def __init__(self, order: int, coeffs: dict[tuple[int, int], object] | None = None):
        self.order = order
        self.c = [[mpq(0)] * (order - r + 1) for r in range(order + 1)]
        if coeffs:
            for (r, s), v in coeffs.items():
                if r + s <= order:
                    self.c[r][s] = v

    @classmethod
    def from_poly(cls, p: BiPoly, order: int) -> "Series2":
        return cls(order, p.terms)

    @classmethod
    def const(cls, v, order: int) -> "Series2":
        return cls(order, {(0, 0): v})

    @classmethod
    def var(cls, which: int, order: int) -> "Series2":
        return cls(order, {(1, 0) if which == 0 else (0, 1): mpq(1)})

    def __getitem__(self, rs: tuple[int, int]):
        r, s = rs
        if r < 0 or s < 0 or r + s > self.order:
            raise IndexError(f"coefficient ({r},{s}) beyond order {self.order}")
        return self.c[r][s]

    def get(self, r: int, s: int, default=None):
        if r < 0 or s < 0 or r + s > self.order:
            return default
        return self.c[r][s]

    def items(self):
        for r in range(self.order + 1):
            for s in range(self.order - r + 1):
                yield (r, s), self.c[r][s]

    def truncate(self, order: int) -> "Series2":
        order = min(order, self.order)
        return Series2(order, {k: v for k, v in self.items() if k[0] + k[1] <= order})

    def _binary(self, other, fn) -> "Series2":
        if not isinstance(other, Series2):
            other = Series2.const(other, self.order)
        n = min(self.order, other.order)
        out = Series2(n)
        for r in range(n + 1):
            for s in range(n - r + 1):
                out.c[r][s] = fn(self.c[r][s], other.c[r][s])
        return out

    def __add__(self, other) -> "Series2":
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other) -> "Series2":
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other) -> "Series2":
        return (-self) + other

    def __neg__(self) -> "Series2":
        return self.scale(-1)

    def scale(self, k) -> "Series2":
        out = Series2(self.order)
        for r in range(self.order + 1):
            out.c[r] = [v * k for v in self.c[r]]
        return out

    def __mul__(self, other) -> "Series2":
        if not isinstance(other, Series2):
            return self.scale(other)
        n = min(self.order, other.order)
        a = [(r, s, v) for (r, s), v in self.items() if v != 0 and r + s <= n]
        b = [(r, s, v) for (r, s), v in other.items() if v != 0 and r + s <= n]
        out = Series2(n)
        c = out.c
        for r1, s1, v1 in a:
            lim = n - r1 - s1
            for r2, s2, v2 in b:
                if r2 + s2 <= lim:
                    c[r1 + r2][s1 + s2] += v1 * v2
        return out

    __rmul__ = __mul__

    def inverse(self) -> "Series2":
        b0 = self.c[0][0]
        if b0 == 0:
            raise ZeroDivisionError("series with zero constant term has no inverse")
        n = self.order
        inv = Series2(n)
        inv.c[0][0] = 1 / b0
        terms = [(r, s, v) for (r, s), v in self.items() if (r, s) != (0, 0) and v != 0]
        for d in range(1, n + 1):
            for r in range(d + 1):
                s = d - r
                acc = mpq(0)
                for i, j, v in terms:
                    if i <= r and j <= s:
                        acc += v * inv.c[r - i][s - j]
                inv.c[r][s] = -acc / b0
        return inv

    def __truediv__(self, other) -> "Series2":
        if isinstance(other, Series2):
            return self * other.inverse()
        return self.scale(1 / other)

    def diff(self, var: int) -> "Series2":
        """Derivative; the result is known through order - 1."""
        n = self.order - 1
        out = Series2(max(n, 0))
        if n < 0:
            return out
        for r in range(n + 1):
            for s in range(n - r + 1):
                out.c[r][s] = self.c[r + 1][s] * (r + 1) if var == 0 else self.c[r][s + 1] * (s + 1)
        return out

    def restrict_y0(self) -> list:
        """Coefficients of f(x, 0), constant first."""
        return [self.c[r][0] for r in range(self.order + 1)]

    def substitute_y_tx(self) -> list[list]:
        """Rewrite f(x, t x) as sum_k x^k P_k(t); returns [P_0, ..., P_order] as coefficient lists in t."""
        return [[self.c[k - s][s] for s in range(k + 1)] for k in range(self.order + 1)]

    def max_abs(self):
        from .numbers import cabs

        return max(cabs(v) for _, v in self.items())

    def to_json(self) -> list:
        from .numbers import num_to_json

        return [[r, s, num_to_json(v)] for (r, s), v in self.items()]


def compose_poly(p: BiPoly, x0, y0, l: Series2) -> Series2:
    """p(x0 + x, y0 + l(x, y)) where l has zero constant term."""
    if l.c[0][0] != 0:
        raise ValueError("inner series must vanish at the origin")
    n = l.order
    shifted = p.taylor_shift(x0, y0)
    dy = shifted.degree_in(1) if not shifted.is_zero() else 0
    lp = [Series2.const(mpq(1), n)]
    for _ in range(int(dy)):
        lp.append(lp[-1] * l)
    # group by power of l, then multiply by the x-monomials
    out = Series2(n)
    for (i, j), c in shifted.terms.items():
        if i > n:
            continue
        src = lp[j]
        for r in range(n - i + 1):
            row = src.c[r]
            dst = out.c[r + i]
            for s in range(n - i - r + 1):
                v = row[s]
                if v != 0:
                    dst[s] += c * v
    return out


class Series1:
    """Univariate truncated power series: coefficients through ``order``."""

    __slots__ = ("order", "c")

    def __init__(self, coeffs: Sequence, order: int | None = None):
        n = len(coeffs) - 1 if order is None else order
        c = list(coeffs[: n + 1])
        c += [mpq(0)] * (n + 1 - len(c))
        self.order = n
        self.c = c

    def __add__(self, other: "Series1") -> "Series1":
        n = min(self.order, other.order)
        return Series1([a + b for a, b in zip(self.c[: n + 1], other.c[: n + 1])], n)

    def __sub__(self, other: "Series1") -> "Series1":
        n = min(self.order, other.order)
        return Series1([a - b for a, b in zip(self.c[: n + 1], other.c[: n + 1])], n)

    def __mul__(self, other) -> "Series1":
        if not isinstance(other, Series1):
            return Series1([v * other for v in self.c], self.order)
        n = min(self.order, other.order)
        out = [mpq(0)] * (n + 1)
        for i, a in enumerate(self.c[: n + 1]):
            if a == 0:
                continue
            for j in range(n + 1 - i):
                out[i + j] += a * other.c[j]
        return Series1(out, n)

    def inverse(self) -> "Series1":
        b0 = self.c[0]
        if b0 == 0:
            raise ZeroDivisionError("series with zero constant term has no inverse")
        inv = [1 / b0]
        for d in range(1, self.order + 1):
            acc = mpq(0)
            for i in range(1, d + 1):
                acc += self.c[i] * inv[d - i]
            inv.append(-acc / b0)
        return Series1(inv, self.order)

    def valuation(self, zero) -> int | None:
        """Index of the first coefficient for which ``zero(c)`` is false, or None."""
        for k, v in enumerate(self.c):
            if not zero(v):
                return k
        return None


def compose_poly_curve(p: BiPoly, x0, y0, dx: Series1, dy: Series1) -> Series1:
    """p(x0 + dx(t), y0 + dy(t)) for series dx, dy vanishing at t = 0."""
    n = min(dx.order, dy.order)
    shifted = p.taylor_shift(x0, y0)
    if shifted.is_zero():
        return Series1([mpq(0)], n)
    one = Series1([mpq(1)], n)
    xp = [one]
    for _ in range(int(shifted.degree_in(0))):
        xp.append(xp[-1] * dx)
    yp = [one]
    for _ in range(int(shifted.degree_in(1))):
        yp.append(yp[-1] * dy)
    acc = [mpq(0)] * (n + 1)
    for (i, j), c in shifted.terms.items():
        if i + j > n:
            continue
        prod = xp[i] * yp[j]
        for k in range(i + j, n + 1):
            v = prod.c[k]
            if v != 0:
                acc[k] += c * v
    return Series1(acc, n)
