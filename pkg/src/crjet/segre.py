"""Segre set mappings, certified generic ranks and the finite type test."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import linalg
from .linalg import series_det
from .manifold import NormalFormManifold, swap_conjugate
from .series import GaussianRational, Monomial, TruncatedSeries

MAX_REDRAWS = 5


class RankVerdict(str, Enum):
    CERTIFIED_GEQ = "CERTIFIED_GEQ"
    EXACT = "EXACT"
    UP_TO_TRUNCATION = "UP_TO_TRUNCATION"


@dataclass(frozen=True)
class RankCertificate:
    """``rank`` is certified by a nonzero coefficient of the witness minor.

    ``verdict`` is EXACT when every larger minor was shown identically zero,
    UP_TO_TRUNCATION when that could only be checked on known coefficients.
    """

    rank: int
    rows: tuple[int, ...] = ()
    cols: tuple[int, ...] = ()
    monomial: Monomial | None = None
    coefficient: GaussianRational | None = None
    verdict: RankVerdict = RankVerdict.EXACT

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "verdict": self.verdict.value,
            "witness_rows": list(self.rows),
            "witness_cols": list(self.cols),
            "witness_monomial": None if self.monomial is None else list(self.monomial),
        }


def jacobian(F: Sequence[TruncatedSeries], variables: Sequence[str]) -> list[list[TruncatedSeries]]:
    return [[f.differentiate(v) for v in variables] for f in F]


def _random_point(rng: random.Random, variables: Sequence[str]) -> dict[str, GaussianRational]:
    def part():
        return Fraction(rng.randint(-17, 17), rng.randint(1, 7))

    return {v: GaussianRational(part(), part()) for v in variables}


def _minor(J, rows, cols) -> TruncatedSeries:
    return series_det([[J[i][j] for j in cols] for i in rows])


def _nonzero_minor(J, size, row_pool, col_pool):
    """First minor of the given size with a known nonzero coefficient, plus an 'all exact' flag."""
    all_exact = True
    for rows in combinations(row_pool, size):
        for cols in combinations(col_pool, size):
            m = _minor(J, rows, cols)
            if not m.is_zero():
                return (rows, cols, m), all_exact
            if not m.exact:
                all_exact = False
    return None, all_exact


def _certificate(rows, cols, m: TruncatedSeries, verdict) -> RankCertificate:
    mono = m.first_nonzero_monomial()
    return RankCertificate(len(rows), tuple(rows), tuple(cols), mono, m.coefficient(mono), verdict)


def _pools(J):
    nz = lambda e: not (e.is_zero() and e.exact)  # noqa: E731
    rows = [i for i, r in enumerate(J) if any(nz(e) for e in r)]
    cols = [j for j in range(len(J[0]) if J else 0) if any(nz(J[i][j]) for i in rows)]
    return rows, cols


def generic_rank(
    F: Sequence[TruncatedSeries], variables: Sequence[str], seed: int = 0
) -> RankCertificate:
    """Certified generic rank of the Jacobian of ``F`` with respect to ``variables``.

    Seeded random evaluation proposes a rank and a nonsingular minor; the minor
    is then checked symbolically, and larger minors are searched to prove (or
    bound up to truncation) that the rank cannot grow.
    """
    J = jacobian(F, variables)
    row_pool, col_pool = _pools(J)
    if not row_pool or not col_pool:
        truncated = any(not e.exact for r in J for e in r)
        return RankCertificate(0, verdict=RankVerdict.UP_TO_TRUNCATION if truncated else RankVerdict.EXACT)

    rng = random.Random(seed)
    found = None
    for _ in range(MAX_REDRAWS + 1):
        point = _random_point(rng, variables)
        values = [[J[i][j].evaluate(point) for j in col_pool] for i in row_pool]
        r, rr, cc = linalg.nonsingular_minor(values)
        if r == 0:
            continue
        rows = [row_pool[i] for i in rr]
        cols = [col_pool[j] for j in cc]
        m = _minor(J, rows, cols)
        if not m.is_zero():
            found = (rows, cols, m)
            break
    if found is None:
        return symbolic_rank(F, variables)

    # promote while a larger nonzero minor exists
    while True:
        size = len(found[0]) + 1
        if size > min(len(row_pool), len(col_pool)):
            return _certificate(*found, RankVerdict.EXACT)
        bigger, all_exact = _nonzero_minor(J, size, row_pool, col_pool)
        if bigger is None:
            verdict = RankVerdict.EXACT if all_exact else RankVerdict.UP_TO_TRUNCATION
            return _certificate(*found, verdict)
        found = bigger


def symbolic_rank(F: Sequence[TruncatedSeries], variables: Sequence[str]) -> RankCertificate:
    """Rank by exhaustive symbolic minor search, largest size first (no randomness)."""
    J = jacobian(F, variables)
    row_pool, col_pool = _pools(J)
    larger_exact = True
    for size in range(min(len(row_pool), len(col_pool)), 0, -1):
        hit, exact_here = _nonzero_minor(J, size, row_pool, col_pool)
        if hit is not None:
            verdict = RankVerdict.EXACT if larger_exact else RankVerdict.UP_TO_TRUNCATION
            return _certificate(*hit, verdict)
        larger_exact = larger_exact and exact_here
    truncated = not larger_exact or any(not e.exact for r in J for e in r)
    return RankCertificate(0, verdict=RankVerdict.UP_TO_TRUNCATION if truncated else RankVerdict.EXACT)


def t_vars(n: int, j: int) -> tuple[str, ...]:
    """Parameters ``t^1, ..., t^j`` of the order-j Segre map, each in C^n."""
    return tuple(f"t{k}_{i}" for k in range(1, j + 1) for i in range(1, n + 1))


@dataclass(frozen=True)
class SegreMap:
    j: int
    n: int
    d: int
    components: tuple[TruncatedSeries, ...]

    @property
    def variables(self) -> tuple[str, ...]:
        return t_vars(self.n, self.j)

    @property
    def z_part(self) -> tuple[TruncatedSeries, ...]:
        return self.components[: self.n]

    @property
    def w_part(self) -> tuple[TruncatedSeries, ...]:
        return self.components[self.n :]

    def embed(self, variables: Sequence[str]) -> tuple[TruncatedSeries, ...]:
        return tuple(c.embed(variables) for c in self.components)


def _first(M: NormalFormManifold) -> SegreMap:
    variables = t_vars(M.n, 1)
    comps = [TruncatedSeries.var(v, variables) for v in variables]
    comps += [TruncatedSeries.zero(variables) for _ in range(M.d)]
    return SegreMap(1, M.n, M.d, tuple(comps))


def _next(M: NormalFormManifold, v: SegreMap) -> SegreMap:
    j = v.j + 1
    variables = t_vars(M.n, j)
    new_t = variables[-M.n :]
    vbar = [c.conjugate() for c in v.embed(variables)]
    assignment = {}
    for i in range(M.n):
        assignment[M.z[i]] = TruncatedSeries.var(new_t[i], variables)
        assignment[M.chi[i]] = vbar[i]
    for k in range(M.d):
        assignment[M.tau[k]] = vbar[M.n + k]
    comps = [TruncatedSeries.var(t, variables) for t in new_t]
    comps += [q.substitute(assignment) for q in M.Q]
    return SegreMap(j, M.n, M.d, tuple(comps))


def segre_maps(M: NormalFormManifold, jmax: int) -> list[SegreMap]:
    """``[v^1, ..., v^jmax]`` built by the recursion ``v^{j+1} = (t^{j+1}, Q(t^{j+1}, conj v^j))``."""
    if jmax < 1:
        raise ValueError("j must be >= 1")
    out = [_first(M)]
    while len(out) < jmax:
        out.append(_next(M, out[-1]))
    return out


def segre_map(M: NormalFormManifold, j: int) -> SegreMap:
    return segre_maps(M, j)[-1]


def pullback_residuals(M: NormalFormManifold, j: int) -> list[TruncatedSeries]:
    """Defining equations pulled back to ``(v^{j+1}, conj v^j)``; all must vanish.

    ``j = 0`` checks ``r(v^1(t^1), 0)``.  For ``j >= 1`` both ``w - Q(z, zeta)``
    and its conjugate ``tau - Qbar(chi, Z)`` are returned; the second one uses
    reality of Q.
    """
    if j == 0:
        v1 = _first(M)
        variables = v1.variables
        zero = TruncatedSeries.zero(variables)
        assignment = {M.z[i]: v1.components[i] for i in range(M.n)}
        assignment.update({c: zero for c in M.chi + M.tau})
        return [v1.w_part[k] - M.Q[k].substitute(assignment) for k in range(M.d)]
    maps = segre_maps(M, j + 1)
    upper, lower = maps[-1], maps[-2]
    variables = upper.variables
    Z = upper.components
    zeta = [c.conjugate() for c in lower.embed(variables)]
    out = []
    direct = {}
    for i in range(M.n):
        direct[M.z[i]] = Z[i]
        direct[M.chi[i]] = zeta[i]
    for k in range(M.d):
        direct[M.tau[k]] = zeta[M.n + k]
    for k in range(M.d):
        out.append(Z[M.n + k] - M.Q[k].substitute(direct))
    # Qbar(chi, z, w) evaluated at chi = zeta_z, z = Z_z, w = Z_w
    swapped = {}
    for i in range(M.n):
        swapped[M.z[i]] = Z[i]
        swapped[M.chi[i]] = zeta[i]
    for k in range(M.d):
        swapped[M.tau[k]] = Z[M.n + k]
    for k in range(M.d):
        qbar = swap_conjugate(M.Q[k], M.n, M.d)
        out.append(zeta[M.n + k] - qbar.substitute(swapped))
    return out


@dataclass(frozen=True)
class FiniteTypeResult:
    """``order`` is the smallest m with Rk v^m = N, or None if not reached by ``jmax``."""

    order: int | None
    jmax: int
    ranks: tuple[RankCertificate, ...] = field(default_factory=tuple)
    refuted: bool = False

    @property
    def is_finite_type(self) -> bool:
        return self.order is not None

    def __str__(self):
        if self.order is not None:
            return f"Order({self.order})"
        tag = " (refuted)" if self.refuted else ""
        return f"NotFiniteTypeUpTo({self.jmax}){tag}"


def finite_type_order(
    M: NormalFormManifold, jmax: int | None = None, seed: int = 0
) -> FiniteTypeResult:
    """Smallest m <= jmax with generic rank of ``v^m`` equal to N.

    Finite type forces full rank by ``j = d + 1``, so an exact rank deficit
    there refutes finite type outright.
    """
    if jmax is None:
        jmax = M.d + 1
    if jmax < M.d + 1:
        raise ValueError(f"jmax must be at least d + 1 = {M.d + 1}")
    certs = []
    for v in segre_maps(M, jmax):
        cert = generic_rank(v.components, v.variables, seed=seed)
        certs.append(cert)
        if cert.rank == M.N:
            return FiniteTypeResult(v.j, jmax, tuple(certs))
    refuted = certs[M.d].verdict == RankVerdict.EXACT
    return FiniteTypeResult(None, jmax, tuple(certs), refuted)
