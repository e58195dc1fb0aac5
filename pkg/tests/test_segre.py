import pytest
from hypothesis import given
from hypothesis import strategies as st

from crjet import catalog
from crjet.files import parse_manifold
from crjet.invariants import multiindices, theta
from crjet.parser import parse_expression
from crjet.segre import (
    RankVerdict,
    finite_type_order,
    generic_rank,
    jacobian,
    pullback_residuals,
    segre_map,
    segre_maps,
    symbolic_rank,
    t_vars,
)
from crjet.series import TruncatedSeries

from . import oracles

TYPE_ORDER = {
    "SPHERE": 2,
    "PLANE": None,
    "P4": 2,
    "P8": 2,
    "P16": 2,
    "M1": 2,
    "M2": 2,
    "CODIM2": 3,
    "SPHERE_S": 2,
}


def test_sphere_segre_maps():
    v = segre_maps(catalog.manifold("SPHERE"), 3)
    names = t_vars(1, 3)
    assert v[1].components[1] == parse_expression("2*i*t1_1*t2_1", t_vars(1, 2))
    assert v[2].components[1] == parse_expression("2*i*t2_1*t3_1 - 2*i*t1_1*t2_1", names)
    assert v[2].z_part[0] == TruncatedSeries.var("t3_1", names)


def test_first_segre_map_is_the_z_plane():
    v = segre_map(catalog.manifold("M1"), 1)
    assert [c.to_expr() for c in v.components] == ["t1_1", "t1_2", "0"]


def test_segre_j_must_be_positive():
    with pytest.raises(ValueError):
        segre_maps(catalog.manifold("SPHERE"), 0)


@pytest.mark.parametrize("name", catalog.MANIFOLDS)
def test_finite_type_order(fixtures, name):
    ft = finite_type_order(fixtures[name])
    assert ft.order == TYPE_ORDER[name]
    if ft.order is None:
        assert ft.refuted
        assert str(ft) == f"NotFiniteTypeUpTo({fixtures[name].d + 1}) (refuted)"


def test_jmax_below_d_plus_one_is_rejected():
    with pytest.raises(ValueError):
        finite_type_order(catalog.manifold("CODIM2"), jmax=2)


@pytest.mark.parametrize("name", catalog.MANIFOLDS)
def test_pullback_residuals_vanish(fixtures, name):
    M = fixtures[name]
    for j in range(M.d + 3):
        assert all(r.is_zero() for r in pullback_residuals(M, j)), j


def test_pullback_residual_detects_wrong_q():
    # the defining equation must fail for data that are not the Segre maps of Q
    M = catalog.manifold("SPHERE")
    other = catalog.manifold("P4")
    v = segre_maps(other, 2)
    zeta = [c.conjugate() for c in v[0].embed(v[1].variables)]
    assign = {"z1": v[1].components[0], "chi1": zeta[0], "tau1": zeta[1]}
    assert not (v[1].components[1] - M.Q[0].substitute(assign)).is_zero()


@given(st.sampled_from(catalog.MANIFOLDS))
def test_rank_is_nondecreasing_in_j(name):
    M = catalog.manifold(name)
    ranks = [c.rank for c in finite_type_order(M, M.d + 2).ranks]
    assert ranks == sorted(ranks)


def _catalog_jacobians():
    out = []
    for name in catalog.MANIFOLDS:
        M = catalog.manifold(name)
        for v in segre_maps(M, M.d + 1):
            out.append((f"{name}-v{v.j}", v.components, v.variables))
        comps = []
        for alpha in multiindices(M.n, 3):
            comps.extend(theta(M, alpha))
        out.append((f"{name}-theta", tuple(comps), M.chi))
    return out


JACOBIANS = _catalog_jacobians()


@pytest.mark.parametrize("label, F, variables", JACOBIANS, ids=[j[0] for j in JACOBIANS])
def test_generic_rank_agrees_with_symbolic_search_and_sympy(label, F, variables):
    fast = generic_rank(F, variables)
    full = symbolic_rank(F, variables)
    assert fast.rank == full.rank
    assert fast.rank == oracles.generic_rank(F, variables)


@pytest.mark.parametrize("seed", [0, 1, 7, 12345])
def test_rank_does_not_depend_on_seed(seed):
    v = segre_map(catalog.manifold("M1"), 2)
    assert generic_rank(v.components, v.variables, seed=seed).rank == 3


def test_certificate_names_a_nonzero_minor_coefficient():
    v = segre_map(catalog.manifold("CODIM2"), 3)
    cert = generic_rank(v.components, v.variables)
    assert cert.rank == 3 and cert.verdict == RankVerdict.EXACT
    J = jacobian(v.components, v.variables)
    from crjet.linalg import series_det

    minor = series_det([[J[i][j] for j in cert.cols] for i in cert.rows])
    assert minor.coefficient(cert.monomial) == cert.coefficient != 0
    assert cert.to_json()["witness_monomial"] == list(cert.monomial)


def test_rank_deficit_under_truncation_is_flagged():
    # x^5 is invisible at degree 4, so the deficit is only known up to truncation
    F = [TruncatedSeries(("x",), {(5,): 1}, 4)]
    cert = generic_rank(F, ("x",))
    assert cert.rank == 0 and cert.verdict == RankVerdict.UP_TO_TRUNCATION


def test_zero_map_has_exact_rank_zero():
    F = [TruncatedSeries.zero(("x", "y"))]
    assert generic_rank(F, ("x", "y")).verdict == RankVerdict.EXACT


def test_truncated_plane_is_not_refuted():
    M = parse_manifold("n = 1\nd = 1\ntrunc = 6\nimw1 = z1^4*chi1^4*s1\n")
    ft = finite_type_order(M)
    assert ft.order is None and not ft.refuted
