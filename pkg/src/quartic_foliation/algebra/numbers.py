"""Scalar conventions: exact rationals are gmpy2.mpq, floating complex values
are gmpy2.mpc at the working precision of the current gmpy2 context."""

from __future__ import annotations

import contextlib
import math
from fractions import Fraction
from typing import Iterator

import gmpy2
from gmpy2 import mpc, mpfr, mpq, mpz

DEFAULT_PRECISION = 256
RANK_TOL_BITS = 128
CLUSTER_TOL_BITS = 64

EXACT_TYPES = (int, mpz, mpq, Fraction)


@contextlib.contextmanager
def working_precision(bits: int) -> Iterator[None]:
    """Run a block with gmpy2 real and complex precision set to ``bits``."""
    if bits < 53:
        raise ValueError("precision below 53 bits is not supported")
    with gmpy2.context(gmpy2.get_context(), precision=bits, real_prec=bits, imag_prec=bits):
        yield


def current_precision() -> int:
    return gmpy2.get_context().precision


def is_exact(c) -> bool:
    return isinstance(c, EXACT_TYPES)


def as_exact(c) -> mpq:
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    return mpq(c)


def to_mpc(c) -> mpc:
    if isinstance(c, Fraction):
        c = mpq(c.numerator, c.denominator)
    if isinstance(c, complex):
        return mpc(c)
    return mpc(c)


def cabs(c) -> mpfr:
    """Absolute value as an mpfr at the current precision."""
    if isinstance(c, mpc):
        return abs(c)
    if isinstance(c, Fraction):
        c = mpq(c.numerator, c.denominator)
    return abs(mpfr(c))


def is_zero(c) -> bool:
    if is_exact(c):
        return c == 0
    return c == 0


def negligible(value, scale, bits: int) -> bool:
    """|value| <= 2^-bits * scale, with scale == 0 meaning only exact zero passes."""
    v = cabs(value)
    if v == 0:
        return True
    return v <= mpfr(scale) * mpfr(2) ** (-bits)


def two_pow(k: int) -> mpfr:
    return mpfr(2) ** k


def digits_for(bits: int) -> int:
    return int(math.ceil(bits * math.log10(2))) + 2


def mpfr_to_str(x: mpfr, bits: int | None = None) -> str:
    """Round-trippable decimal form ``d.ddde±k`` with enough digits for ``bits``."""
    if bits is None:
        bits = x.precision
    if gmpy2.is_zero(x):
        return "0"
    if not gmpy2.is_finite(x):
        return str(x)
    mant, exp, _ = x.digits(10, digits_for(bits))
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    mant = mant.rstrip("0") or "0"
    head, tail = mant[0], mant[1:]
    return f"{sign}{head}.{tail or '0'}e{exp - 1}"


def short_str(x, digits: int = 6) -> str:
    """Human-scale rendering for logs and report summaries."""
    if is_exact(x):
        return str(x)
    if isinstance(x, mpc):
        return f"({short_str(x.real, digits)}{'+' if x.imag >= 0 else '-'}{short_str(abs(x.imag), digits)}j)"
    return f"{float(x):.{digits}g}"


def num_to_json(c, bits: int | None = None):
    """Exact values become ``["num", "den"]``; floats ``{"re","im","bits"}``."""
    if is_exact(c):
        q = as_exact(c)
        return [str(q.numerator), str(q.denominator)]
    z = to_mpc(c)
    b = bits if bits is not None else z.precision[0]
    return {"re": mpfr_to_str(z.real, b), "im": mpfr_to_str(z.imag, b), "bits": b}


def num_from_json(obj):
    if isinstance(obj, list):
        if len(obj) != 2:
            raise ValueError("rational coefficient must be [num, den]")
        return mpq(int(obj[0]), int(obj[1]))
    if isinstance(obj, int):
        return mpq(obj)
    if isinstance(obj, str):
        if "/" in obj:
            n, d = obj.split("/")
            return mpq(int(n), int(d))
        return mpc(obj) if "j" in obj else mpc(mpfr(obj))
    if isinstance(obj, dict):
        bits = int(obj.get("bits", current_precision()))
        with working_precision(max(bits, current_precision())):
            return mpc(mpfr(obj.get("re", "0")), mpfr(obj.get("im", "0")))
    if isinstance(obj, float):
        return mpc(obj)
    raise ValueError(f"cannot decode number {obj!r}")


def to_complex(c) -> complex:
    if isinstance(c, mpc):
        return complex(float(c.real), float(c.imag))
    return complex(float(c))


def tiny(value, scale, prec: int | None = None) -> bool:
    """Zero test at half the working precision, relative to ``scale``."""
    p = prec or current_precision()
    return cabs(value) <= mpfr(scale) * mpfr(2) ** (-(p // 2))


def resolve_precision(bits: int | None) -> int:
    """Explicit bits win; otherwise an enclosing working_precision block; otherwise the default."""
    if bits:
        return bits
    cur = current_precision()
    return cur if cur > 53 else DEFAULT_PRECISION
