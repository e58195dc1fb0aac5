"""Nondegeneracy invariants: Theta series, kappa, the determinants D and nu(k)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations
from math import factorial

from .linalg import series_det
from .manifold import NormalFormManifold
from .segre import RankVerdict, generic_rank
from .series import OrderValue, TruncatedSeries, TruncationError

Multiindex = tuple[int, ...]

DEFAULT_KMAX = 8


class Certainty(str, Enum):
    EXACT = "EXACT"
    UPPER_BOUND = "UPPER_BOUND"


class Nondegeneracy(str, Enum):
    YES = "yes"
    NO_UP_TO_KMAX = "no-up-to-kmax"
    UNKNOWN = "unknown"


def multiindices(n: int, k: int) -> list[Multiindex]:
    """All alpha in N^n with 1 <= |alpha| <= k, by degree then descending lexicographic."""
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            yield prefix + (left,)
            return
        for a in range(left, -1, -1):
            yield from rec(prefix + (a,), left - a, slots - 1)

    for deg in range(1, k + 1):
        out.extend(rec((), deg, n))
    return out


def _fact(alpha: Multiindex) -> int:
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


@lru_cache(maxsize=4096)
def _theta_component(q: TruncatedSeries, n: int, d: int, alpha: Multiindex) -> TruncatedSeries:
    # read off the z^alpha tau^0 coefficients instead of differentiating the whole series
    k = sum(alpha)
    trunc = None
    if q.trunc is not None:
        trunc = q.trunc - k
        if trunc < 0:
            raise TruncationError(
                f"Theta_{alpha} needs degree {k} but Q is known only to degree {q.trunc}"
            )
    scale = _fact(alpha)
    out = {}
    for e, c in q.terms.items():
        if e[:n] == alpha and not any(e[2 * n :]):
            out[e[n : 2 * n]] = c * scale
    chis = q.variables[n : 2 * n]
    return TruncatedSeries(chis, out, trunc)


def theta(M: NormalFormManifold, alpha: Multiindex) -> tuple[TruncatedSeries, ...]:
    """``Theta_alpha(chi) = Q_{z^alpha}(0, chi, 0)`` (raw derivative), one series per component."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != M.n or any(a < 0 for a in alpha) or sum(alpha) < 1:
        raise ValueError(f"alpha must be a multiindex in N^{M.n} with |alpha| >= 1")
    return tuple(_theta_component(q, M.n, M.d, alpha) for q in M.Q)


@dataclass(frozen=True)
class ThetaTable:
    label: str
    max_degree: int
    entries: dict[Multiindex, tuple[TruncatedSeries, ...]]

    def jacobian_row(self, alpha: Multiindex, s: int) -> tuple[TruncatedSeries, ...]:
        th = self.entries[alpha][s - 1]
        return tuple(th.differentiate(v) for v in th.variables)


def theta_table(M: NormalFormManifold, k: int) -> ThetaTable:
    return ThetaTable(M.label, k, {a: theta(M, a) for a in multiindices(M.n, k)})


@dataclass(frozen=True)
class KappaValue:
    """``value`` is kappa_M; when None, class C is refuted only up to ``kmax``."""

    value: int | None
    kmax: int
    certain: bool = True

    @property
    def in_class_c(self) -> bool:
        return self.value is not None

    def __str__(self):
        if self.value is not None:
            return str(self.value)
        tag = "" if self.certain else " (up to truncation)"
        return f"NotClassCUpTo({self.kmax}){tag}"


def kappa(M: NormalFormManifold, kmax: int = DEFAULT_KMAX, seed: int = 0) -> KappaValue:
    """Smallest k with generic rank of ``chi -> (Theta_alpha)_{|alpha|<=k}`` equal to n."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    comps: list[TruncatedSeries] = []
    certain = True
    for k in range(1, kmax + 1):
        try:
            for alpha in multiindices(M.n, k):
                if sum(alpha) == k:
                    comps.extend(theta(M, alpha))
            cert = generic_rank(comps, M.chi, seed=seed)
        except TruncationError:
            return KappaValue(None, k - 1, certain=False)
        if cert.rank == M.n:
            return KappaValue(k, kmax)
        certain = cert.verdict == RankVerdict.EXACT
    return KappaValue(None, kmax, certain)


def _row(M: NormalFormManifold, alpha: Multiindex, s: int) -> tuple[TruncatedSeries, ...]:
    th = theta(M, alpha)[s - 1]
    return tuple(th.differentiate(v) for v in M.chi)


def det_D(
    M: NormalFormManifold, alphas: tuple[Multiindex, ...], ss: tuple[int, ...]
) -> tuple[TruncatedSeries, OrderValue]:
    """Determinant of the rows ``d Theta^{s_j}_{alpha_j} / d chi`` and its order."""
    if len(alphas) != M.n or len(ss) != M.n:
        raise ValueError("need n multiindices and n component indices")
    if any(not 1 <= s <= M.d for s in ss):
        raise ValueError(f"component indices must lie in 1..{M.d}")
    rows = [_row(M, tuple(a), s) for a, s in zip(alphas, ss)]
    D = series_det(rows)
    return D, D.order()


@dataclass(frozen=True)
class NuValue:
    value: OrderValue
    witness: tuple[tuple[Multiindex, ...], tuple[int, ...]] | None = None

    def __str__(self):
        return str(self.value)


class _NuEngine:
    """Shared determinant cache for the nu table of one manifold."""

    def __init__(self, M: NormalFormManifold):
        self.M = M
        self.rows: dict[tuple[Multiindex, int], tuple[TruncatedSeries, ...]] = {}
        self.orders: dict[tuple, OrderValue] = {}

    def candidate_rows(self, k: int) -> list[tuple[Multiindex, int]]:
        out = []
        for alpha in multiindices(self.M.n, k):
            for s in range(1, self.M.d + 1):
                key = (alpha, s)
                if key not in self.rows:
                    try:
                        self.rows[key] = _row(self.M, alpha, s)
                    except TruncationError:
                        self.rows[key] = None  # beyond the known coefficients
                row = self.rows[key]
                # identically zero rows only ever produce zero determinants
                if row is not None and all(e.is_zero() and e.exact for e in row):
                    continue
                out.append(key)
        return out

    def order(self, combo) -> OrderValue:
        o = self.orders.get(combo)
        if o is None:
            rows = [self.rows[key] for key in combo]
            if any(r is None for r in rows):
                o = OrderValue.at_least(0)
            else:
                o = series_det(rows).order()
            self.orders[combo] = o
        return o

    def nu(self, k: int) -> NuValue:
        best = None
        best_combo = None
        at_least = None
        rows = self.candidate_rows(k)
        for combo in combinations(rows, self.M.n):
            o = self.order(combo)
            if o.is_exact:
                if best is None or o.m < best:
                    best, best_combo = o.m, combo
                    if best == 0:
                        break
            elif o.is_at_least:
                at_least = o.m if at_least is None else min(at_least, o.m)
        if best is not None and (at_least is None or at_least >= best):
            witness = (
                tuple(a for a, _ in best_combo),
                tuple(s for _, s in best_combo),
            )
            return NuValue(OrderValue.exact(best), witness)
        if at_least is not None:
            return NuValue(OrderValue.at_least(at_least))
        return NuValue(OrderValue.infinite())


def nu(M: NormalFormManifold, k: int) -> NuValue:
    """``inf ord D(alpha, s)`` over n-tuples with ``max |alpha^(j)| <= k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return _NuEngine(M).nu(k)


def nu_table(M: NormalFormManifold, kmax: int = DEFAULT_KMAX) -> dict[int, NuValue]:
    engine = _NuEngine(M)
    return {k: engine.nu(k) for k in range(1, kmax + 1)}


def nu_infinity(M: NormalFormManifold, kmax: int = DEFAULT_KMAX) -> tuple[NuValue, Certainty]:
    """``nu(kmax)``; EXACT only when it is 0, otherwise an upper bound for ``nu(inf)``."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    v = nu(M, kmax)
    if v.value.is_exact and v.value.m == 0:
        return v, Certainty.EXACT
    return v, Certainty.UPPER_BOUND


def nu_stabilization_degree(M: NormalFormManifold) -> int | None:
    """For polynomial Q, the z-degree beyond which every Theta vanishes; else None.

    Past that degree no new rows appear, so ``nu(k)`` is constant and equals
    ``nu(inf)``.
    """
    if not M.exact:
        return None
    return max(1, max(q.degree_in(M.z) for q in M.Q))


def is_finitely_nondegenerate(M: NormalFormManifold, kmax: int = DEFAULT_KMAX) -> Nondegeneracy:
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    v = nu(M, kmax).value
    if v.is_exact and v.m == 0:
        return Nondegeneracy.YES
    if v.is_at_least and v.m == 0:
        return Nondegeneracy.UNKNOWN
    return Nondegeneracy.NO_UP_TO_KMAX
