"""Formal holomorphic maps ``H = (F, G)`` between normal-form manifolds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from . import linalg
from .invariants import (
    DEFAULT_KMAX,
    KappaValue,
    NuValue,
    is_finitely_nondegenerate,
    kappa,
    multiindices,
    nu_stabilization_degree,
    nu_table,
    theta,
)
from .invariants import Nondegeneracy
from .linalg import series_det
from .manifold import NormalFormManifold, chi_vars, manifold_variables, tau_vars, z_vars
from .segre import RankCertificate, generic_rank
from .series import (
    GaussianRational,
    OrderValue,
    TruncatedSeries,
    order_of_vector,
    variable_series,
)


class MapError(ValueError):
    """Malformed map or a violated hypothesis."""


def w_vars(d: int) -> tuple[str, ...]:
    return tuple(f"w{j}" for j in range(1, d + 1))


def map_variables(n: int, d: int) -> tuple[str, ...]:
    return z_vars(n) + w_vars(d)


@dataclass(frozen=True)
class FormalMap:
    """``F`` (n series) and ``G`` (d series) in ``(z, w)``; source and target dimensions agree."""

    n: int
    d: int
    F: tuple[TruncatedSeries, ...]
    G: tuple[TruncatedSeries, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "F", tuple(self.F))
        object.__setattr__(self, "G", tuple(self.G))
        if len(self.F) != self.n or len(self.G) != self.d:
            raise MapError(f"expected {self.n} F and {self.d} G components")
        want = map_variables(self.n, self.d)
        for c in self.components:
            if c.variables != want:
                raise MapError(f"map components must be series in {want}")
            if c.constant_term():
                raise MapError("map components must vanish at 0 (H(0) = 0)")

    @property
    def components(self) -> tuple[TruncatedSeries, ...]:
        return self.F + self.G

    @property
    def variables(self) -> tuple[str, ...]:
        return map_variables(self.n, self.d)

    @classmethod
    def identity(cls, n: int, d: int, label: str = "identity") -> FormalMap:
        coords = variable_series(map_variables(n, d))
        return cls(n, d, [coords[v] for v in z_vars(n)], [coords[v] for v in w_vars(d)], label)

    def linear_part(self) -> linalg.Matrix:
        """``dH(0)`` as an N x N matrix."""
        N = self.n + self.d
        return [
            [c.coefficient(tuple(1 if i == j else 0 for i in range(N))) for j in range(N)]
            for c in self.components
        ]

    def G_w0(self) -> linalg.Matrix:
        lin = self.linear_part()
        return [row[self.n :] for row in lin[self.n :]]


def compose(outer: FormalMap, inner: FormalMap) -> FormalMap:
    """``outer o inner``."""
    if (outer.n, outer.d) != (inner.n, inner.d):
        raise MapError("dimension mismatch in composition")
    assignment = dict(zip(outer.variables, inner.components))
    comps = [c.substitute(assignment) for c in outer.components]
    return FormalMap(outer.n, outer.d, comps[: outer.n], comps[outer.n :], f"{outer.label}o{inner.label}")


def jets_agree(H1: FormalMap, H2: FormalMap, k: int) -> bool:
    """``j_0^k H1 == j_0^k H2``: equal coefficients of every monomial of degree <= k."""
    if (H1.n, H1.d) != (H2.n, H2.d):
        raise MapError("dimension mismatch")
    return all(a.equal_up_to(b, k) for a, b in zip(H1.components, H2.components))


def _check_dims(M: NormalFormManifold, Mp: NormalFormManifold, H: FormalMap):
    if (M.n, M.d) != (Mp.n, Mp.d) or (H.n, H.d) != (M.n, M.d):
        raise MapError(
            f"dimension mismatch: source ({M.n},{M.d}), target ({Mp.n},{Mp.d}), map ({H.n},{H.d})"
        )


def _bar(c: TruncatedSeries, n: int, d: int) -> TruncatedSeries:
    # conj coefficients, evaluate at (chi, tau), viewed in the (z, chi, tau) ring
    mapping = dict(zip(z_vars(n) + w_vars(d), chi_vars(n) + tau_vars(d)))
    return c.conjugate().rename(mapping).embed(manifold_variables(n, d))


def _on_manifold(c: TruncatedSeries, M: NormalFormManifold) -> TruncatedSeries:
    # c(z, Q(z, chi, tau))
    coords = variable_series(M.variables)
    assignment = {zv: coords[zv] for zv in M.z}
    assignment.update({f"w{j + 1}": M.Q[j] for j in range(M.d)})
    return c.substitute(assignment)


def fundamental_sides(
    M: NormalFormManifold, Mp: NormalFormManifold, H: FormalMap
) -> tuple[list[TruncatedSeries], list[TruncatedSeries]]:
    """Both sides of ``G(z,Q) = Q'(F(z,Q), Fbar(chi,tau), Gbar(chi,tau))`` in ``(z, chi, tau)``."""
    _check_dims(M, Mp, H)
    n, d = M.n, M.d
    F_on = [_on_manifold(f, M) for f in H.F]
    lhs = [_on_manifold(g, M) for g in H.G]
    Fbar = [_bar(f, n, d) for f in H.F]
    Gbar = [_bar(g, n, d) for g in H.G]
    assignment = {}
    for i in range(n):
        assignment[Mp.z[i]] = F_on[i]
        assignment[Mp.chi[i]] = Fbar[i]
    for j in range(d):
        assignment[Mp.tau[j]] = Gbar[j]
    rhs = [q.substitute(assignment) for q in Mp.Q]
    return lhs, rhs


def check_sends_into(
    M: NormalFormManifold, Mp: NormalFormManifold, H: FormalMap
) -> list[TruncatedSeries]:
    """Residual ``LHS - RHS`` of the fundamental identity; zero certifies ``H(M) in M'``."""
    lhs, rhs = fundamental_sides(M, Mp, H)
    return [a - b for a, b in zip(lhs, rhs)]


def sends_into(M: NormalFormManifold, Mp: NormalFormManifold, H: FormalMap) -> bool:
    return all(r.is_zero() for r in check_sends_into(M, Mp, H))


def is_cr_transversal(H: FormalMap) -> bool:
    return bool(linalg.det(H.G_w0()))


def not_totally_degenerate_certificate(H: FormalMap, seed: int = 0) -> RankCertificate:
    F0 = [f.set_zero(w_vars(H.d)) for f in H.F]
    return generic_rank(F0, z_vars(H.n), seed=seed)


def is_not_totally_degenerate(H: FormalMap, seed: int = 0) -> bool:
    """``Rk F_z(z, 0) = n``, certified by a nonzero minor."""
    return not_totally_degenerate_certificate(H, seed).rank == H.n


def fbar_at_tau0(H: FormalMap) -> list[TruncatedSeries]:
    """``Fbar(chi, 0)`` as series in chi."""
    mapping = dict(zip(z_vars(H.n), chi_vars(H.n)))
    return [f.set_zero(w_vars(H.d)).conjugate().rename(mapping) for f in H.F]


def ord_det_fbar_chi(H: FormalMap) -> OrderValue:
    """``ord det Fbar_chi(chi, 0)``."""
    Fb = fbar_at_tau0(H)
    chis = chi_vars(H.n)
    return series_det([[f.differentiate(c) for c in chis] for f in Fb]).order()


class Verdict(str, Enum):
    HOLDS = "HOLDS"
    VIOLATED = "VIOLATED"
    UNDECIDED = "UNDECIDED"


def _fmt(x: float) -> str | int:
    return "inf" if x == math.inf else int(x)


@dataclass(frozen=True)
class InequalityCheck:
    """``lhs >= rhs`` with both sides known only as intervals ``(lo, hi)``."""

    name: str
    lhs: tuple[float, float]
    rhs: tuple[float, float]
    verdict: Verdict
    relation: str  # "strict", "equality" or "unknown"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lhs": [_fmt(x) for x in self.lhs],
            "rhs": [_fmt(x) for x in self.rhs],
            "verdict": self.verdict.value,
            "relation": self.relation,
        }


def _geq(name, lhs, rhs) -> InequalityCheck:
    if lhs[0] >= rhs[1]:
        verdict = Verdict.HOLDS
    elif lhs[1] < rhs[0]:
        verdict = Verdict.VIOLATED
    else:
        verdict = Verdict.UNDECIDED
    relation = "unknown"
    if lhs[0] == lhs[1] and rhs[0] == rhs[1]:
        if lhs[0] == rhs[0]:
            relation = "equality"
        elif lhs[0] > rhs[0]:
            relation = "strict"
        else:
            relation = "violated"
    elif verdict == Verdict.HOLDS and lhs[0] > rhs[1]:
        relation = "strict"
    return InequalityCheck(name, lhs, rhs, verdict, relation)


def _mul_bounds(a, b):
    def m(x, y):
        if x == 0 or y == 0:
            return 0
        return x * y

    return (m(a[0], b[0]), m(a[1], b[1]))


def _add_bounds(a, b):
    return (a[0] + b[0], a[1] + b[1])


@dataclass(frozen=True)
class RigidityReport:
    k: int
    nu_source: OrderValue
    nu_target: OrderValue
    ord_det: OrderValue
    ord_fbar: OrderValue
    nu_inf_source: tuple[float, float]
    rigid: InequalityCheck
    refined: InequalityCheck
    unifbd: InequalityCheck

    @property
    def checks(self) -> tuple[InequalityCheck, ...]:
        return (self.rigid, self.refined, self.unifbd)

    @property
    def inconsistent(self) -> bool:
        return any(c.verdict == Verdict.VIOLATED for c in self.checks)


class HypothesisError(MapError):
    """A hypothesis of the invoked statement does not hold for the input."""


def _require_hypotheses(M, Mp, H, kmax, seed) -> KappaValue:
    if not sends_into(M, Mp, H):
        raise HypothesisError("H does not send M into M' (nonzero residual)")
    if not is_cr_transversal(H):
        raise HypothesisError("H is not CR-transversal (G_w(0) singular)")
    kap = kappa(M, kmax, seed=seed)
    if not kap.in_class_c:
        raise HypothesisError(f"source manifold not in class C up to k = {kmax}")
    return kap


def nu_infinity_bounds(M: NormalFormManifold, kmax: int = DEFAULT_KMAX) -> tuple[float, float]:
    """Interval for ``nu_M(inf)``.

    Polynomial Q has only finitely many nonzero Theta, so the nu table is
    constant past the z-degree and the interval collapses to a point.
    """
    stable = nu_stabilization_degree(M)
    k = max(kmax, stable) if stable is not None else kmax
    v = nu_table(M, k)[k].value
    hi = v.bounds()[1]
    if v.is_exact and (v.m == 0 or stable is not None):
        return (v.m, v.m)
    if v.is_infinite and stable is not None:
        return (math.inf, math.inf)
    return (0, hi)


def check_rigidity(
    M: NormalFormManifold,
    Mp: NormalFormManifold,
    H: FormalMap,
    k: int,
    kmax: int = DEFAULT_KMAX,
    seed: int = 0,
) -> RigidityReport:
    """Evaluate the rigidity inequalities for a CR-transversal ``H: M -> M'``.

    * ``nu_M(k) >= nu_M'(k) + ord det Fbar_chi(chi, 0)``
    * ``nu_M(k) >= nu_M'(k) * ord Fbar(chi, 0) + ord det Fbar_chi(chi, 0)``
    * ``ord det Fbar_chi(chi, 0) <= nu_M(inf)``
    """
    _require_hypotheses(M, Mp, H, kmax, seed)
    nu_s = nu_table(M, k)[k].value
    nu_t = nu_table(Mp, k)[k].value
    a = ord_det_fbar_chi(H)
    b = order_of_vector(fbar_at_tau0(H))
    nu_inf = nu_infinity_bounds(M, max(k, kmax))
    rigid = _geq("nu_M(k) >= nu_M'(k) + ord det Fbar_chi", nu_s.bounds(), _add_bounds(nu_t.bounds(), a.bounds()))
    refined = _geq(
        "nu_M(k) >= nu_M'(k) * ord Fbar + ord det Fbar_chi",
        nu_s.bounds(),
        _add_bounds(_mul_bounds(nu_t.bounds(), b.bounds()), a.bounds()),
    )
    unif = _geq("nu_M(inf) >= ord det Fbar_chi", nu_inf, a.bounds())
    return RigidityReport(k, nu_s, nu_t, a, b, nu_inf, rigid, refined, unif)


@dataclass(frozen=True)
class ThetaPullbackRow:
    alpha: tuple[int, ...]
    residual: tuple[TruncatedSeries, ...]
    dday_residual: tuple[TruncatedSeries, ...] | None = None

    @property
    def vanishes(self) -> bool:
        parts = list(self.residual) + list(self.dday_residual or ())
        return all(r.is_zero() for r in parts)


def _z_derivative_at_origin(s: TruncatedSeries, alpha, M: NormalFormManifold) -> TruncatedSeries:
    for zv, a in zip(M.z, alpha):
        if a:
            s = s.differentiate(zv, a)
    return s.set_zero(M.z + M.tau)


def _dday_residual(M, Mp, H, j: int) -> tuple[TruncatedSeries, ...]:
    """``G_w(0) Theta_{e_j} - sum_k Theta'_{e_k}(Fbar(chi,0)) (F^k_{z_j}(0) + F^k_w(0) Theta_{e_j})``."""
    n, d = M.n, M.d
    e = lambda i: tuple(1 if t == i else 0 for t in range(n))  # noqa: E731
    lin = H.linear_part()
    Gw = H.G_w0()
    th = theta(M, e(j))
    Fb = fbar_at_tau0(H)
    lhs = []
    for r in range(d):
        acc = TruncatedSeries.zero(M.chi)
        for c in range(d):
            if Gw[r][c]:
                acc = acc + th[c] * Gw[r][c]
        lhs.append(acc)
    rhs = [TruncatedSeries.zero(M.chi) for _ in range(d)]
    for k in range(n):
        # Theta'_{e_k} composed with Fbar(chi, 0)
        thp = theta(Mp, e(k))
        comp = [t.substitute(dict(zip(Mp.chi, Fb))) for t in thp]
        scalar = TruncatedSeries.constant(lin[k][j], M.chi)
        for c in range(d):
            if lin[k][n + c]:
                scalar = scalar + th[c] * lin[k][n + c]
        for r in range(d):
            rhs[r] = rhs[r] + comp[r] * scalar
    return tuple(a - b for a, b in zip(lhs, rhs))


def verify_theta_pullback(
    M: NormalFormManifold, Mp: NormalFormManifold, H: FormalMap, kmax: int
) -> list[ThetaPullbackRow]:
    """``d^alpha/dz^alpha`` of both sides of the fundamental identity at ``z = tau = 0``.

    For ``|alpha| = 1`` the first-order identity relating ``Theta_{e_j}`` and
    ``Theta'_{e_k}(Fbar(chi, 0))`` is also evaluated directly.
    """
    if not sends_into(M, Mp, H):
        raise HypothesisError("H does not send M into M' (nonzero residual)")
    lhs, rhs = fundamental_sides(M, Mp, H)
    rows = []
    for alpha in multiindices(M.n, kmax):
        res = tuple(
            _z_derivative_at_origin(a, alpha, M) - _z_derivative_at_origin(b, alpha, M)
            for a, b in zip(lhs, rhs)
        )
        dday = None
        if sum(alpha) == 1:
            dday = _dday_residual(M, Mp, H, alpha.index(1))
        rows.append(ThetaPullbackRow(alpha, res, dday))
    return rows


class Criterion(str, Enum):
    SATISFIED = "SATISFIED"
    REFUTED_UP_TO_KMAX = "REFUTED_UP_TO_KMAX"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class AutomorphismVerdict:
    criterion: Criterion
    k: int | None
    nu_source: dict[int, NuValue]
    nu_target: dict[int, NuValue]
    kappa: KappaValue
    det_dH0: GaussianRational
    finitely_nondegenerate: Nondegeneracy
    consistent: bool | None

    @property
    def is_biholomorphism(self) -> bool:
        return bool(self.det_dH0)


def _compare_nu(a: OrderValue, b: OrderValue) -> bool | None:
    if not (a.decided and b.decided):
        return None
    return a == b


def automorphism_criterion(
    M: NormalFormManifold,
    Mp: NormalFormManifold,
    H: FormalMap,
    kmax: int = DEFAULT_KMAX,
    seed: int = 0,
) -> AutomorphismVerdict:
    """A CR-transversal ``H: M -> M'`` is invertible iff ``nu_M(k) = nu_M'(k)`` for some ``k >= kappa_M``."""
    kap = _require_hypotheses(M, Mp, H, kmax, seed)
    ns = nu_table(M, kmax)
    nt = nu_table(Mp, kmax)
    criterion = Criterion.REFUTED_UP_TO_KMAX
    hit = None
    differ = False
    for k in range(kap.value, kmax + 1):
        eq = _compare_nu(ns[k].value, nt[k].value)
        if eq and hit is None:
            criterion, hit = Criterion.SATISFIED, k
        elif eq is None and hit is None:
            criterion = Criterion.UNDECIDED
        elif eq is False:
            differ = True
    det0 = linalg.det(H.linear_part())
    # a biholomorphism preserves every nu(k), so one certified difference rules it out
    consistent = None
    if criterion == Criterion.SATISFIED:
        consistent = bool(det0) and not differ
    elif differ:
        consistent = not det0
    fnd = is_finitely_nondegenerate(M, kmax)
    if fnd == Nondegeneracy.YES and not det0:
        consistent = False
    return AutomorphismVerdict(criterion, hit, ns, nt, kap, det0, fnd, consistent)


@dataclass(frozen=True)
class EquivalenceObstruction:
    """Differences of biholomorphic invariants; any entry rules out equivalence."""

    kappa_source: KappaValue
    kappa_target: KappaValue
    differing_k: tuple[int, ...]
    nu_source: dict[int, NuValue] = field(default_factory=dict)
    nu_target: dict[int, NuValue] = field(default_factory=dict)

    @property
    def obstructed(self) -> bool:
        kappas_differ = (
            self.kappa_source.in_class_c
            and self.kappa_target.in_class_c
            and self.kappa_source.value != self.kappa_target.value
        )
        return kappas_differ or bool(self.differing_k)


def equivalence_obstruction(
    M: NormalFormManifold, Mp: NormalFormManifold, kmax: int = DEFAULT_KMAX, seed: int = 0
) -> EquivalenceObstruction:
    """Compare kappa and the nu table: a biholomorphism ``M -> M'`` would preserve both.

    A CR-transversal automorphism onto M' would satisfy ``nu_M(k) = nu_M'(k)``
    for every k, so one differing certified value excludes it.
    """
    if (M.n, M.d) != (Mp.n, Mp.d):
        raise MapError("manifolds of different dimensions")
    ns = nu_table(M, kmax)
    nt = nu_table(Mp, kmax)
    diff = tuple(k for k in range(1, kmax + 1) if _compare_nu(ns[k].value, nt[k].value) is False)
    return EquivalenceObstruction(kappa(M, kmax, seed), kappa(Mp, kmax, seed), diff, ns, nt)


__all__ = [
    "AutomorphismVerdict",
    "Criterion",
    "EquivalenceObstruction",
    "FormalMap",
    "HypothesisError",
    "InequalityCheck",
    "MapError",
    "RigidityReport",
    "ThetaPullbackRow",
    "Verdict",
    "automorphism_criterion",
    "check_rigidity",
    "check_sends_into",
    "compose",
    "equivalence_obstruction",
    "fbar_at_tau0",
    "fundamental_sides",
    "is_cr_transversal",
    "is_not_totally_degenerate",
    "jets_agree",
    "map_variables",
    "ord_det_fbar_chi",
    "sends_into",
    "verify_theta_pullback",
    "w_vars",
]
