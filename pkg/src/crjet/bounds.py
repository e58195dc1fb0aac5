"""Jet determination orders k0, k1, k_j and K = k_{d+1}."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .invariants import (
    DEFAULT_KMAX,
    Certainty,
    KappaValue,
    NuValue,
    kappa,
    nu_infinity,
    nu_table,
)
from .manifold import NormalFormManifold
from .segre import FiniteTypeResult, finite_type_order


class BoundError(ValueError):
    """The bound is undefined or undecidable at the given budget."""

    def __init__(self, message: str, undecided: bool = False):
        super().__init__(message)
        self.undecided = undecided


class BoundCertainty(str, Enum):
    EXACT = "EXACT"
    VALID_UPPER_BOUND = "VALID_UPPER_BOUND"


def _kappa_value(M: NormalFormManifold, kmax: int, seed: int) -> int:
    kap = kappa(M, kmax, seed=seed)
    if not kap.in_class_c:
        raise BoundError(
            f"class C not established up to k = {kap.kmax}; increase --kmax", undecided=True
        )
    return kap.value


def _nu_exact(table: dict[int, NuValue], k: int) -> int:
    v = table[k].value
    if v.is_at_least:
        raise BoundError(f"nu({k}) undecided at this truncation; increase trunc/kmax", undecided=True)
    if v.is_infinite:
        raise BoundError(f"nu({k}) is infinite although k >= kappa")
    return v.m


def k0(M: NormalFormManifold, kmax: int = DEFAULT_KMAX, seed: int = 0) -> int:
    """``min_{k >= kappa} max(k, nu(k))``.

    nu is nonincreasing, so past ``k = nu(kappa)`` the objective is just k and the
    search can stop there.
    """
    kap = _kappa_value(M, kmax, seed)
    table = nu_table(M, kap)
    top = max(kap, _nu_exact(table, kap))
    table = nu_table(M, top)
    return min(max(k, _nu_exact(table, k)) for k in range(kap, top + 1))


def k1(M: NormalFormManifold, kmax: int = DEFAULT_KMAX, seed: int = 0) -> tuple[int, BoundCertainty]:
    """``max(k0, kappa * (nu(inf) + 1))`` using the reported value of ``nu(inf)``."""
    kap = _kappa_value(M, kmax, seed)
    base = k0(M, kmax, seed)
    v, cert = nu_infinity(M, kmax)
    if v.value.is_infinite:
        raise BoundError("nu(inf) is infinite: manifold not in class C")
    if v.value.is_at_least:
        raise BoundError("nu(inf) undecided at this truncation", undecided=True)
    certainty = BoundCertainty.EXACT if cert == Certainty.EXACT else BoundCertainty.VALID_UPPER_BOUND
    return max(base, kap * (v.value.m + 1)), certainty


@dataclass(frozen=True)
class JetBoundReport:
    label: str
    kappa: KappaValue
    nu: dict[int, NuValue]
    nu_inf: tuple[NuValue, Certainty]
    k0: int
    k1: int
    kj: dict[int, int]
    K: int
    certainty: BoundCertainty
    finite_type: FiniteTypeResult
    j_used: int
    notes: tuple[str, ...] = field(default_factory=tuple)


def jet_bound_K(
    M: NormalFormManifold,
    kmax: int = DEFAULT_KMAX,
    seed: int = 0,
    use_type_order: bool = False,
    jmax: int | None = None,
) -> JetBoundReport:
    """Full bound report with ``K = k1 + kappa * d``.

    With ``use_type_order`` the finite-type order m replaces ``d + 1`` and
    ``K = k_m``.
    """
    ft = finite_type_order(M, jmax, seed=seed)
    if not ft.is_finite_type:
        if ft.refuted:
            raise BoundError("manifold is not of finite type")
        raise BoundError("finite type undecided at this truncation", undecided=True)
    kap = kappa(M, kmax, seed=seed)
    if not kap.in_class_c:
        raise BoundError(
            f"class C not established up to k = {kap.kmax}; increase --kmax", undecided=True
        )
    value0 = k0(M, kmax, seed)
    value1, certainty = k1(M, kmax, seed)
    j_used = ft.order if use_type_order else M.d + 1
    kj = {j: value1 + kap.value * (j - 1) for j in range(1, max(j_used, M.d + 1) + 1)}
    nu_inf = nu_infinity(M, kmax)
    notes = [
        f"finite type order m = {ft.order}; rank of v^{M.d + 1} is N = {M.N}",
        f"K = k_{j_used} = k1 + kappa * {j_used - 1}",
    ]
    if certainty == BoundCertainty.VALID_UPPER_BOUND:
        notes.append(
            f"nu(inf) replaced by nu({kmax}) = {nu_inf[0].value}; any larger jet order also determines maps"
        )
    return JetBoundReport(
        label=M.label,
        kappa=kap,
        nu=nu_table(M, kmax),
        nu_inf=nu_inf,
        k0=value0,
        k1=value1,
        kj=kj,
        K=kj[j_used],
        certainty=certainty,
        finite_type=ft,
        j_used=j_used,
        notes=tuple(notes),
    )
