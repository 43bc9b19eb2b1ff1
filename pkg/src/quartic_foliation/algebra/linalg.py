"""Rank-certified kernels and least-squares solves on top of the Jacobi SVD."""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpc, mpfr

from ..errors import AmbiguousRank
from .numbers import RANK_TOL_BITS, cabs, short_str
from .svd import jacobi_svd

INF = mpfr("inf")


@dataclass(frozen=True)
class TolPolicy:
    rank_bits: int = RANK_TOL_BITS  # sigma < sigma_max * 2^-rank_bits counts as zero
    min_gap: float = 2.0**32  # required ratio between the kept and dropped singular values
    feas_bits: int = 100  # feasible iff |M x - r| <= 2^-feas_bits |r|


DEFAULT_POLICY = TolPolicy()


@dataclass
class RankCertificate:
    rank: int
    n_cols: int
    sigma_max: mpfr
    smallest_kept: mpfr | None
    largest_dropped: mpfr | None
    gap_ratio: mpfr
    threshold: mpfr
    backend: str
    sigma: list = field(repr=False, default_factory=list)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "n_cols": self.n_cols,
            "sigma_max": short_str(self.sigma_max, 12),
            "smallest_kept": None if self.smallest_kept is None else short_str(self.smallest_kept, 6),
            "largest_dropped": None if self.largest_dropped is None else short_str(self.largest_dropped, 6),
            "gap_ratio": "inf" if gmpy2.is_infinite(self.gap_ratio) else short_str(self.gap_ratio, 6),
            "log10_gap_ratio": "inf" if gmpy2.is_infinite(self.gap_ratio) else round(float(gmpy2.log10(self.gap_ratio)), 3),
        }


def certify_rank(sigma: list, policy: TolPolicy = DEFAULT_POLICY, backend: str = "") -> RankCertificate:
    n = len(sigma)
    smax = sigma[0] if sigma else mpfr(0)
    thr = smax * mpfr(2) ** (-policy.rank_bits)
    if smax == 0:
        return RankCertificate(0, n, smax, None, None, INF, thr, backend, list(sigma))
    rank = sum(1 for s in sigma if s > thr)
    kept = sigma[rank - 1] if rank else None
    dropped = sigma[rank] if rank < n else None
    if dropped is None or dropped == 0:
        gap = INF
    else:
        gap = kept / dropped
    cert = RankCertificate(rank, n, smax, kept, dropped, gap, thr, backend, list(sigma))
    if gap < policy.min_gap or (kept is not None and kept < thr * mpfr(policy.min_gap)):
        raise AmbiguousRank(
            "no singular-value gap clears the policy threshold",
            rank=rank,
            gap_ratio=short_str(gap),
            smallest_kept=short_str(kept) if kept is not None else None,
        )
    return cert


def normalize_rows(rows: list[list], rhs: list | None = None):
    """Scale each row (and its right-hand side) to unit Euclidean norm; zero rows are kept."""
    out_rows, out_rhs = [], []
    for i, row in enumerate(rows):
        nrm = gmpy2.sqrt(sum((cabs(v) ** 2 for v in row), mpfr(0)))
        if nrm == 0:
            out_rows.append([mpc(v) for v in row])
            if rhs is not None:
                out_rhs.append(mpc(rhs[i]))
            continue
        out_rows.append([mpc(v) / nrm for v in row])
        if rhs is not None:
            out_rhs.append(mpc(rhs[i]) / nrm)
    return (out_rows, out_rhs) if rhs is not None else out_rows


def matvec(rows: list[list], x: list) -> list:
    return [sum((mpc(a) * b for a, b in zip(row, x)), mpc(0)) for row in rows]


def vnorm(v: list) -> mpfr:
    return gmpy2.sqrt(sum((cabs(a) ** 2 for a in v), mpfr(0)))


def rank(rows: list[list], policy: TolPolicy = DEFAULT_POLICY) -> RankCertificate:
    s = jacobi_svd(rows, want_v=False)
    return certify_rank(s.sigma, policy, s.backend)


def nullspace(rows: list[list], policy: TolPolicy = DEFAULT_POLICY) -> tuple[list[list], RankCertificate]:
    """Orthonormal kernel basis (as coefficient vectors) with its rank certificate."""
    s = jacobi_svd(rows, want_v=True)
    cert = certify_rank(s.sigma, policy, s.backend)
    return [list(v) for v in s.V[cert.rank :]], cert


@dataclass
class SolveOutcome:
    feasible: bool
    solution: list | None
    residual_norm: mpfr
    rhs_norm: mpfr
    margin: mpfr  # residual relative to |rhs|
    cert: RankCertificate
    cert_aug: RankCertificate
    rank_jump: int

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "residual_norm": short_str(self.residual_norm, 6),
            "rhs_norm": short_str(self.rhs_norm, 12),
            "margin": short_str(self.margin, 6),
            "rank": self.cert.rank,
            "rank_augmented": self.cert_aug.rank,
            "rank_jump": self.rank_jump,
            "matrix": self.cert.to_json(),
            "augmented": self.cert_aug.to_json(),
        }


def solve_or_refute(rows: list[list], rhs: list, policy: TolPolicy = DEFAULT_POLICY) -> SolveOutcome:
    """Minimum-norm least-squares solve of M x = r, certified by rank(M) versus rank([M | r])."""
    s = jacobi_svd(rows, want_v=True)
    cert = certify_rank(s.sigma, policy, s.backend)
    n = len(rows[0])
    x = [mpc(0)] * n
    for k in range(cert.rank):
        u, v, sig = s.U[k], s.V[k], s.sigma[k]
        coef = sum((a.conjugate() * b for a, b in zip(u, rhs)), mpc(0)) / sig
        x = [xi + coef * vi for xi, vi in zip(x, v)]
    res = [a - b for a, b in zip(matvec(rows, x), rhs)]
    rn = vnorm(res)
    bn = vnorm(rhs)
    margin = rn / bn if bn > 0 else mpfr(0)
    aug = [list(row) + [rhs[i]] for i, row in enumerate(rows)]
    sa = jacobi_svd(aug, want_v=False)
    cert_aug = certify_rank(sa.sigma, policy, sa.backend)
    jump = cert_aug.rank - cert.rank
    feasible = margin <= mpfr(2) ** (-policy.feas_bits)
    if feasible != (jump == 0):
        raise AmbiguousRank(
            "residual test and rank jump disagree",
            margin=short_str(margin),
            rank=cert.rank,
            rank_augmented=cert_aug.rank,
        )
    return SolveOutcome(feasible, x, rn, bn, margin, cert, cert_aug, jump)


def solve_square(rows: list[list], rhs: list) -> list | None:
    """Gaussian elimination with partial pivoting; None when a pivot vanishes."""
    n = len(rows)
    a = [[mpc(v) for v in row] + [mpc(rhs[i])] for i, row in enumerate(rows)]
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[p][k] == 0:
            return None
        a[k], a[p] = a[p], a[k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] * inv
            if f != 0:
                for j in range(k, n + 1):
                    a[i][j] -= f * a[k][j]
    x = [mpc(0)] * n
    for i in range(n - 1, -1, -1):
        acc = a[i][n]
        for j in range(i + 1, n):
            acc -= a[i][j] * x[j]
        x[i] = acc / a[i][i]
    return x
