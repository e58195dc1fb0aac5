from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from crjet import catalog, linalg
from crjet.files import InputError, parse_manifold
from crjet.manifold import (
    GraphDatum,
    ManifoldError,
    NormalFormManifold,
    from_graph,
    from_rigid_graph,
    graph_variables,
    linear_change,
    manifold_variables,
    swap_conjugate,
    validate,
)
from crjet.parser import parse_expression
from crjet.series import GaussianRational, TruncatedSeries

from . import oracles

V11 = manifold_variables(1, 1)


def q(text, n=1, d=1):
    return parse_expression(text, manifold_variables(n, d))


@pytest.mark.parametrize("name", catalog.MANIFOLDS)
def test_catalog_manifolds_validate(fixtures, name):
    assert validate(fixtures[name]).ok


def test_sphere_normal_form():
    assert catalog.manifold("SPHERE").Q[0] == q("tau1 + 2*i*z1*chi1")


def test_half_levi_form_is_real():
    # Im w = |z|^2 / 2
    assert validate(NormalFormManifold(1, 1, (q("tau1 + i*z1*chi1"),))).ok


def test_missing_i_breaks_reality():
    report = validate(NormalFormManifold(1, 1, (q("tau1 + z1*chi1"),)))
    assert report.normality and not report.reality
    assert report.residuals["reality component 1"] == q("2*z1*chi1")


def test_normality_failure():
    report = validate(NormalFormManifold(1, 1, (q("tau1 + z1"),)))
    assert not report.normality
    assert report.failures()


def test_shape_checks():
    with pytest.raises(ManifoldError):
        NormalFormManifold(1, 2, (q("tau1"),))
    with pytest.raises(ManifoldError):
        NormalFormManifold(0, 1, ())


@given(st.sampled_from(catalog.MANIFOLDS))
def test_swap_conjugate_is_an_involution(name):
    M = catalog.manifold(name)
    for c in M.Q:
        assert swap_conjugate(swap_conjugate(c, M.n, M.d), M.n, M.d) == c


def test_rigid_graph_gives_tau_plus_2i_phi():
    g = GraphDatum(1, 1, (parse_expression("z1^2*chi1^2", graph_variables(1, 1)),))
    assert from_rigid_graph(g).Q[0] == q("tau1 + 2*i*z1^2*chi1^2")


def test_graph_must_vanish_on_axes():
    g = GraphDatum(1, 1, (parse_expression("z1", graph_variables(1, 1)),))
    with pytest.raises(ManifoldError):
        from_rigid_graph(g)


def test_graph_must_be_real():
    g = GraphDatum(1, 1, (parse_expression("i*z1*chi1", graph_variables(1, 1)),))
    with pytest.raises(ManifoldError):
        g.check()


@pytest.mark.parametrize("trunc", [4, 7, 12])
def test_graph_ingestion_against_closed_form(trunc):
    # Im w = |z|^2 Re w  solves to  w = tau (1 + i z chi) / (1 - i z chi)
    g = GraphDatum(1, 1, (parse_expression("z1*chi1*s1", graph_variables(1, 1)),))
    M = from_graph(g, trunc)
    z, c, t = sp.symbols("z1 chi1 tau1")
    want = oracles.series_in_t(t * (1 + sp.I * z * c) / (1 - sp.I * z * c), V11, trunc)
    assert M.trunc == trunc
    assert sp.expand(oracles.to_sympy(M.Q[0]) - want) == 0


def test_sphere_s_against_closed_form():
    M = catalog.manifold("SPHERE_S")
    z, c, t = sp.symbols("z1 chi1 tau1")
    exact = (t * (1 + sp.I * z * c) + 2 * sp.I * z * c) / (1 - sp.I * z * c)
    want = oracles.series_in_t(exact, V11, M.trunc)
    assert sp.expand(oracles.to_sympy(M.Q[0]) - want) == 0


def test_graph_ingestion_codimension_two():
    names = graph_variables(1, 2)
    g = GraphDatum(
        1,
        2,
        (parse_expression("z1*chi1 + z1*chi1*s2", names), parse_expression("z1*chi1*s1", names)),
    )
    M = from_graph(g, 8)
    assert validate(M).ok


# --- linear changes ---------------------------------------------------------


def test_dilation_fixes_sphere():
    M = catalog.manifold("SPHERE")
    assert linear_change(M, [[2]], [[4]]).Q == M.Q


def test_rotation_fixes_sphere():
    M = catalog.manifold("SPHERE")
    assert linear_change(M, [[GaussianRational(0, 1)]], [[1]]).Q == M.Q


def test_linear_change_scales_levi_form():
    M = catalog.manifold("SPHERE")
    assert linear_change(M, [[1]], [[3]]).Q[0] == q("tau1 + 6*i*z1*chi1")


def test_non_real_b_is_rejected():
    with pytest.raises(ManifoldError):
        linear_change(catalog.manifold("SPHERE"), [[1]], [[GaussianRational(0, 1)]])


def test_singular_change_is_rejected():
    with pytest.raises(ManifoldError):
        linear_change(catalog.manifold("M1"), [[1, 1], [1, 1]], [[1]])


def test_linear_change_round_trip():
    M = catalog.manifold("M1")
    A = linalg.as_matrix([[1, GaussianRational(0, 2)], [3, 1]])
    there = linear_change(M, A, [[5]])
    back = linear_change(there, linalg.inverse(A), [[Fraction(1, 5)]])
    assert back.Q == M.Q


def test_truncated_linear_change_keeps_truncation():
    M = catalog.manifold("SPHERE_S")
    out = linear_change(M, [[2]], [[3]])
    assert out.trunc == M.trunc


# --- manifold files -------------------------------------------------------------


def test_manifold_file_parse():
    M = parse_manifold("label = X\nn = 1\nd = 1\nimw1 = z1*chi1\n")
    assert M.label == "X"
    assert M.Q[0] == q("tau1 + 2*i*z1*chi1")


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("n = 1\nd = 1\nQ1 = tau1 + q1\n", 3, 13),
        ("n = 1\nd = 1\nQ1 = tau1 +\n", 3, 12),
        ("n = 1\nd = 1\n  nonsense\n", 3, 3),
        ("n = one\nd = 1\nQ1 = tau1\n", 1, 5),
        ("n = 1\nd = 1\nQ2 = tau1\n", 3, 1),
    ],
)
def test_manifold_file_errors_have_locations(text, line, column):
    with pytest.raises(InputError) as info:
        parse_manifold(text, "m.crm")
    assert (info.value.line, info.value.column) == (line, column)
    assert str(info.value).startswith(f"m.crm:{line}:{column}:")


def test_invalid_normal_form_file():
    with pytest.raises(InputError, match="reality"):
        parse_manifold("n = 1\nd = 1\nQ1 = tau1 + z1*chi1\n")


def test_graph_variables_rejected_in_q_form():
    with pytest.raises(InputError):
        parse_manifold("n = 1\nd = 1\nQ1 = tau1 + s1\n")


def test_trunc_override_applies_to_graph_form():
    text = "n = 1\nd = 1\ntrunc = 12\nimw1 = z1*chi1*s1\n"
    assert parse_manifold(text).trunc == 12
    assert parse_manifold(text, trunc=5).trunc == 5


def test_q_form_is_exact_despite_header_trunc():
    M = parse_manifold("n = 1\nd = 1\ntrunc = 4\nQ1 = tau1 + 2*i*z1*chi1\n")
    assert M.exact


def test_series_type_in_manifold():
    M = catalog.manifold("P4")
    assert all(isinstance(c, TruncatedSeries) for c in M.Q)
    assert M.N == 2


@pytest.mark.parametrize("low, high", [(4, 9), (6, 12)])
def test_refining_truncation_reproduces_known_coefficients(low, high):
    text = "n = 1\nd = 1\nimw1 = z1*chi1 + z1*chi1*s1 + z1^2*chi1^2*s1^2\n"
    a = parse_manifold(text, trunc=low)
    b = parse_manifold(text, trunc=high)
    assert b.Q[0].truncate(low) == a.Q[0]
