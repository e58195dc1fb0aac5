import pytest
from hypothesis import given
from hypothesis import strategies as st

from crjet import catalog
from crjet.bounds import BoundCertainty, BoundError, jet_bound_K, k0, k1
from crjet.files import parse_manifold

EXPECTED = {
    # name: (kappa, k0, k1, K)
    "SPHERE": (1, 1, 1, 2),
    "P4": (2, 2, 4, 6),
    "P8": (4, 4, 16, 20),
    "P16": (8, 8, 64, 72),
    "M1": (2, 2, 2, 4),
    "M2": (2, 2, 2, 4),
    "CODIM2": (1, 1, 1, 3),
    "SPHERE_S": (1, 1, 1, 2),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_bound_values(fixtures, name):
    kap, a, b, K = EXPECTED[name]
    r = jet_bound_K(fixtures[name])
    assert (r.kappa.value, r.k0, r.k1, r.K) == (kap, a, b, K)
    assert r.kj[1] == r.k1
    assert r.K == r.k1 + kap * fixtures[name].d


def test_k0_k1_helpers(fixtures):
    assert k0(fixtures["P4"]) == 2
    assert k1(fixtures["P4"]) == (4, BoundCertainty.VALID_UPPER_BOUND)
    assert k1(fixtures["SPHERE"]) == (1, BoundCertainty.EXACT)


def test_certainty_follows_nu_infinity(fixtures):
    assert jet_bound_K(fixtures["SPHERE"]).certainty == BoundCertainty.EXACT
    r = jet_bound_K(fixtures["P8"])
    assert r.certainty == BoundCertainty.VALID_UPPER_BOUND
    assert any("nu(inf)" in n for n in r.notes)


def test_type_order_flag(fixtures):
    lit = jet_bound_K(fixtures["CODIM2"])
    assert lit.j_used == 3 and lit.K == 3
    # the type order of CODIM2 is already d + 1, so the flag changes nothing
    assert jet_bound_K(fixtures["CODIM2"], use_type_order=True).K == 3
    M = fixtures["M1"]
    assert jet_bound_K(M, use_type_order=True).j_used == 2


def test_type_order_flag_can_lower_k():
    # codimension 2, but v^2 already has full rank 4
    M = parse_manifold("n = 2\nd = 2\nimw1 = z1*chi1 + z2*chi2\nimw2 = z1*chi2 + z2*chi1\n")
    literal = jet_bound_K(M)
    short = jet_bound_K(M, use_type_order=True)
    assert literal.finite_type.order == 2
    assert (literal.j_used, literal.K) == (3, 3)
    assert (short.j_used, short.K) == (2, 2)


def test_plane_has_no_bound(fixtures):
    with pytest.raises(BoundError) as info:
        jet_bound_K(fixtures["PLANE"])
    assert not info.value.undecided


def test_small_kmax_is_undecided(fixtures):
    with pytest.raises(BoundError) as info:
        jet_bound_K(fixtures["P8"], kmax=3)
    assert info.value.undecided


def test_truncation_budget_exhaustion_is_undecided():
    M = parse_manifold("n = 1\nd = 1\ntrunc = 3\nimw1 = z1^2*chi1^2 + z1^2*chi1^2*s1\n")
    with pytest.raises(BoundError) as info:
        jet_bound_K(M)
    assert info.value.undecided


@given(st.sampled_from(sorted(EXPECTED)))
def test_bound_chain(name):
    r = jet_bound_K(catalog.manifold(name))
    assert r.K >= r.k1 >= r.k0 >= r.kappa.value
    assert r.nu[r.kappa.value].value.decided
    assert not r.nu[r.kappa.value].value.is_infinite


@given(st.sampled_from(["P4", "M1", "SPHERE"]), st.integers(0, 50))
def test_bound_is_seed_independent(name, seed):
    assert jet_bound_K(catalog.manifold(name), seed=seed).K == EXPECTED[name][3]


def test_refining_truncation_keeps_the_bound():
    text = "n = 1\nd = 1\nimw1 = z1*chi1 + z1*chi1*s1\n"
    Ks = {jet_bound_K(parse_manifold(text, trunc=t)).K for t in (6, 10, 14)}
    assert Ks == {2}
