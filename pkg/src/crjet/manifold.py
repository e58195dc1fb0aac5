"""Formal generic submanifolds in normal coordinates ``w = Q(z, chi, tau)``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import linalg
from .series import I, GaussianRational, SeriesError, TruncatedSeries, variable_series


class ManifoldError(ValueError):
    """Defining data violate normality, reality or a construction precondition."""


def z_vars(n: int) -> tuple[str, ...]:
    return tuple(f"z{i}" for i in range(1, n + 1))


def chi_vars(n: int) -> tuple[str, ...]:
    return tuple(f"chi{i}" for i in range(1, n + 1))


def tau_vars(d: int) -> tuple[str, ...]:
    return tuple(f"tau{j}" for j in range(1, d + 1))


def s_vars(d: int) -> tuple[str, ...]:
    return tuple(f"s{j}" for j in range(1, d + 1))


def manifold_variables(n: int, d: int) -> tuple[str, ...]:
    return z_vars(n) + chi_vars(n) + tau_vars(d)


def graph_variables(n: int, d: int) -> tuple[str, ...]:
    return z_vars(n) + chi_vars(n) + s_vars(d)


@dataclass(frozen=True)
class NormalFormManifold:
    """``(n, d, Q)`` with ``Q`` a d-vector of series in ``(z, chi, tau)``.

    Construction only checks shapes; use :func:`validate` for normality and
    reality.
    """

    n: int
    d: int
    Q: tuple[TruncatedSeries, ...]
    label: str = ""

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ManifoldError("CR dimension n and codimension d must be positive")
        object.__setattr__(self, "Q", tuple(self.Q))
        if len(self.Q) != self.d:
            raise ManifoldError(f"expected {self.d} components of Q, got {len(self.Q)}")
        want = manifold_variables(self.n, self.d)
        for q in self.Q:
            if q.variables != want:
                raise ManifoldError(f"Q must be a series in {want}, got {q.variables}")

    @property
    def N(self) -> int:
        return self.n + self.d

    @property
    def variables(self) -> tuple[str, ...]:
        return manifold_variables(self.n, self.d)

    @property
    def z(self) -> tuple[str, ...]:
        return z_vars(self.n)

    @property
    def chi(self) -> tuple[str, ...]:
        return chi_vars(self.n)

    @property
    def tau(self) -> tuple[str, ...]:
        return tau_vars(self.d)

    @property
    def exact(self) -> bool:
        return all(q.exact for q in self.Q)

    @property
    def trunc(self) -> int | None:
        truncs = [q.trunc for q in self.Q if q.trunc is not None]
        return min(truncs) if truncs else None

    def __str__(self):
        body = "; ".join(f"Q{j + 1} = {q}" for j, q in enumerate(self.Q))
        return f"{self.label or 'M'} (n={self.n}, d={self.d}): {body}"


@dataclass(frozen=True)
class ValidationReport:
    normality: bool
    reality: bool
    residuals: dict[str, TruncatedSeries] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.normality and self.reality

    def failures(self) -> list[str]:
        return [f"{k}: {v}" for k, v in self.residuals.items()]


def swap_conjugate(q: TruncatedSeries, n: int, d: int, third: Sequence[str] | None = None) -> TruncatedSeries:
    """``Q-bar(chi, z, w)``: conjugate coefficients and swap the roles of z and chi.

    The transversal variables keep their names unless ``third`` renames them.
    """
    mapping = {}
    for a, b in zip(z_vars(n), chi_vars(n)):
        mapping[a] = b
        mapping[b] = a
    if third is not None:
        mapping.update(dict(zip(tau_vars(d), third)))
    return q.conjugate().rename(mapping, variables=q.variables)


def validate(M: NormalFormManifold) -> ValidationReport:
    """Check ``Q(0,chi,tau) = Q(z,0,tau) = tau`` and ``Q(z, chi, Qbar(chi, z, w)) = w``."""
    residuals = {}
    normal = True
    variables = M.variables
    coords = variable_series(variables)
    for j, q in enumerate(M.Q):
        tau_j = TruncatedSeries.var(M.tau[j], variables)
        for zero, tag in ((M.z, "Q(0,chi,tau)"), (M.chi, "Q(z,0,tau)")):
            res = q.set_zero(zero).embed(variables) - tau_j
            if not res.is_zero():
                normal = False
                residuals[f"normality {tag} - tau{j + 1}"] = res

    # tau plays the role of w in the reality identity
    qbar = [swap_conjugate(q, M.n, M.d) for q in M.Q]
    assignment = dict(coords)
    for j, t in enumerate(M.tau):
        assignment[t] = qbar[j]
    real = True
    for j, q in enumerate(M.Q):
        res = q.substitute(assignment) - coords[M.tau[j]]
        if not res.is_zero():
            real = False
            residuals[f"reality component {j + 1}"] = res
    return ValidationReport(normal, real, residuals)


def _require_valid(M: NormalFormManifold) -> NormalFormManifold:
    report = validate(M)
    if not report.ok:
        raise ManifoldError(
            f"manifold {M.label!r} fails validation: " + "; ".join(report.failures())
        )
    return M


@dataclass(frozen=True)
class GraphDatum:
    """Complexified right side ``phi(z, chi, s)`` of ``Im w = phi``, ``s = Re w``."""

    n: int
    d: int
    phi: tuple[TruncatedSeries, ...]

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ManifoldError("CR dimension n and codimension d must be positive")
        object.__setattr__(self, "phi", tuple(self.phi))
        if len(self.phi) != self.d:
            raise ManifoldError(f"expected {self.d} graph components, got {len(self.phi)}")
        want = graph_variables(self.n, self.d)
        for p in self.phi:
            if p.variables != want:
                raise ManifoldError(f"graph data must be series in {want}")

    @property
    def rigid(self) -> bool:
        s = s_vars(self.d)
        return all(p.degree_in(s) == 0 for p in self.phi)

    def check(self) -> None:
        n, d = self.n, self.d
        for j, p in enumerate(self.phi):
            for zero, tag in ((z_vars(n), "phi(0,chi,s)"), (chi_vars(n), "phi(z,0,s)")):
                if not p.set_zero(zero).is_zero():
                    raise ManifoldError(f"graph component {j + 1}: {tag} must vanish")
            if p != swap_conjugate(p, n, d):
                raise ManifoldError(f"graph component {j + 1} is not real")


def from_rigid_graph(g: GraphDatum, label: str = "") -> NormalFormManifold:
    """``Im w = phi(z, zbar)`` with no ``Re w`` dependence: ``Q = tau + 2i*phi``."""
    g.check()
    if not g.rigid:
        raise ManifoldError("from_rigid_graph needs graph data independent of s")
    variables = manifold_variables(g.n, g.d)
    Q = []
    for j, p in enumerate(g.phi):
        p0 = p.set_zero(s_vars(g.d)).embed(variables)
        Q.append(TruncatedSeries.var(f"tau{j + 1}", variables) + p0 * (2 * I))
    return _require_valid(NormalFormManifold(g.n, g.d, tuple(Q), label))


def from_graph(g: GraphDatum, trunc: int, label: str = "") -> NormalFormManifold:
    """Solve ``w = tau + 2i*phi(z, chi, (w + tau)/2)`` for ``w`` up to degree ``trunc``.

    Every monomial of phi carries both a z and a chi factor, so each pass of the
    fixed-point iteration settles at least two more total degrees.
    """
    g.check()
    if trunc < 1:
        raise ManifoldError("truncation degree must be at least 1")
    n, d = g.n, g.d
    variables = manifold_variables(n, d)
    coords = variable_series(variables)
    taus = [coords[t] for t in tau_vars(d)]
    W = [t.truncate(trunc) for t in taus]
    half = GaussianRational(1, 0) / 2
    for _ in range(trunc + 2):
        assignment = {v: coords[v].truncate(trunc) for v in z_vars(n) + chi_vars(n)}
        for k, s in enumerate(s_vars(d)):
            assignment[s] = ((W[k] + taus[k]) * half).truncate(trunc)
        new = [
            (taus[j] + p.substitute(assignment) * (2 * I)).truncate(trunc)
            for j, p in enumerate(g.phi)
        ]
        if new == W:
            break
        W = new
    else:  # pragma: no cover - the graded argument bounds the number of passes
        raise ManifoldError("fixed-point iteration failed to converge")
    return _require_valid(NormalFormManifold(n, d, tuple(W), label))


def linear_change(
    M: NormalFormManifold,
    A: Sequence[Sequence],
    B: Sequence[Sequence],
    label: str | None = None,
) -> NormalFormManifold:
    """Pull ``M`` through ``(z, w) -> (A z, B w)``.

    ``Q~(z, chi, tau) = B Q(A^-1 z, conj(A)^-1 chi, B^-1 tau)``; a non-real ``B``
    breaks reality and is rejected.
    """
    A = linalg.as_matrix(A)
    B = linalg.as_matrix(B)
    if len(A) != M.n or len(B) != M.d:
        raise ManifoldError("A must be n x n and B must be d x d")
    try:
        Ainv = linalg.inverse(A)
        Binv = linalg.inverse(B)
    except ZeroDivisionError:
        raise ManifoldError("linear change matrices must be invertible") from None
    Abar_inv = linalg.conjugate(Ainv)
    variables = M.variables
    coords = variable_series(variables)

    def combo(row, names):
        out = TruncatedSeries.zero(variables)
        for c, v in zip(row, names):
            if c:
                out = out + coords[v] * c
        return out

    assignment = {}
    for i, v in enumerate(M.z):
        assignment[v] = combo(Ainv[i], M.z)
    for i, v in enumerate(M.chi):
        assignment[v] = combo(Abar_inv[i], M.chi)
    for j, v in enumerate(M.tau):
        assignment[v] = combo(Binv[j], M.tau)
    pulled = [q.substitute(assignment) for q in M.Q]
    Q = []
    for j in range(M.d):
        out = TruncatedSeries.zero(variables)
        for k in range(M.d):
            if B[j][k]:
                out = out + pulled[k] * B[j][k]
        if M.trunc is not None:
            out = out.truncate(M.trunc)
        Q.append(out)
    new = NormalFormManifold(M.n, M.d, tuple(Q), M.label if label is None else label)
    report = validate(new)
    if not report.ok:
        raise ManifoldError(
            "linear change does not preserve normal coordinates: "
            + "; ".join(report.failures())
        )
    return new


__all__ = [
    "GraphDatum",
    "ManifoldError",
    "NormalFormManifold",
    "SeriesError",
    "ValidationReport",
    "chi_vars",
    "from_graph",
    "from_rigid_graph",
    "graph_variables",
    "linear_change",
    "manifold_variables",
    "s_vars",
    "swap_conjugate",
    "tau_vars",
    "validate",
    "z_vars",
]
