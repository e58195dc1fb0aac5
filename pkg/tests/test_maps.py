import math

import pytest
import sympy as sp

from crjet import catalog
from crjet.files import InputError, parse_map
from crjet.maps import (
    Criterion,
    FormalMap,
    HypothesisError,
    MapError,
    Verdict,
    _geq,
    automorphism_criterion,
    check_rigidity,
    check_sends_into,
    compose,
    equivalence_obstruction,
    fbar_at_tau0,
    is_cr_transversal,
    is_not_totally_degenerate,
    jets_agree,
    map_variables,
    nu_infinity_bounds,
    ord_det_fbar_chi,
    sends_into,
    verify_theta_pullback,
)
from crjet.parser import parse_expression
from crjet.series import GaussianRational, OrderValue

from . import oracles


def fmap(F, G, n=1, d=1):
    names = map_variables(n, d)
    return FormalMap(n, d, [parse_expression(f, names) for f in F], [parse_expression(g, names) for g in G])


@pytest.mark.parametrize("src, tgt, h", catalog.SENDING_TRIPLES)
def test_catalog_triples_send_into(fixtures, maps, src, tgt, h):
    assert sends_into(fixtures[src], fixtures[tgt], maps[h])


def test_scale_w_residual_on_sphere(fixtures, maps):
    res = check_sends_into(fixtures["SPHERE"], fixtures["SPHERE"], maps["SCALE_W"])
    assert res[0] == parse_expression("2*i*z1*chi1", fixtures["SPHERE"].variables)


def _sympy_residual(M, Mp, H):
    z, c, t = (sp.Symbol(v) for v in M.variables)
    Q = oracles.to_sympy(M.Q[0])
    Qp = oracles.to_sympy(Mp.Q[0])
    zs, ws = sp.Symbol("z1"), sp.Symbol("w1")
    F = oracles.to_sympy(H.F[0])
    G = oracles.to_sympy(H.G[0])
    on = {zs: z, ws: Q}
    bar = lambda e: sp.conjugate(e).subs({sp.conjugate(zs): c, sp.conjugate(ws): t})  # noqa: E731
    rhs = Qp.subs({z: F.subs(on, simultaneous=True), c: bar(F), t: bar(G)}, simultaneous=True)
    return sp.expand(G.subs(on, simultaneous=True) - rhs)


@pytest.mark.parametrize(
    "src, tgt, h",
    [("P8", "P4", "MAP24"), ("SPHERE", "SPHERE", "SCALE_W"), ("SPHERE", "SPHERE", "ROTATION"), ("P4", "SPHERE", "MAP24")],
)
def test_residual_matches_sympy(fixtures, maps, src, tgt, h):
    M, Mp, H = fixtures[src], fixtures[tgt], maps[h]
    got = oracles.to_sympy(check_sends_into(M, Mp, H)[0])
    assert sp.expand(got - _sympy_residual(M, Mp, H)) == 0


def test_dimension_mismatch(fixtures, maps):
    with pytest.raises(MapError):
        check_sends_into(fixtures["M1"], fixtures["M1"], maps["ID"])


def test_map_must_fix_origin():
    with pytest.raises(MapError):
        fmap(["z1 + 1"], ["w1"])


def test_transversality_and_degeneracy(maps):
    assert is_cr_transversal(maps["MAP24"])
    assert not is_cr_transversal(fmap(["z1"], ["w1^2"]))
    assert is_not_totally_degenerate(maps["MAP24"])
    assert not is_not_totally_degenerate(fmap(["z1*w1"], ["w1"]))


@pytest.mark.parametrize(
    "h, order", [("MAP24", 1), ("MAP16_8", 1), ("MAP16_4", 3), ("ID", 0), ("DILATION", 0), ("ROTATION", 0)]
)
def test_ord_det_fbar_chi(maps, h, order):
    assert ord_det_fbar_chi(maps[h]) == OrderValue.exact(order)


def test_ord_det_follows_the_chain_rule(maps):
    outer, inner = maps["MAP24"], maps["MAP16_8"]
    both = compose(outer, inner)
    # det of the composite is det(outer)(Fbar_inner) * det(inner)
    inner_fbar = fbar_at_tau0(inner)[0]
    outer_at = fbar_at_tau0(outer)[0].differentiate("chi1").substitute({"chi1": inner_fbar})
    assert ord_det_fbar_chi(both).m == outer_at.order().m + ord_det_fbar_chi(inner).m
    assert ord_det_fbar_chi(both).m != ord_det_fbar_chi(outer).m + ord_det_fbar_chi(inner).m


def test_ord_det_is_additive_after_a_linear_map(maps):
    both = compose(maps["MAP24"], maps["DILATION"])
    assert ord_det_fbar_chi(both).m == ord_det_fbar_chi(maps["MAP24"]).m + ord_det_fbar_chi(maps["DILATION"]).m


def test_composition_and_jets(maps):
    H = compose(maps["DILATION"], maps["ROTATION"])
    assert H.F[0] == parse_expression("2*i*z1", map_variables(1, 1))
    assert jets_agree(maps["MAP24"], fmap(["z1^2 + z1^5"], ["w1"]), 4)
    assert not jets_agree(maps["MAP24"], fmap(["z1^2 + z1^5"], ["w1"]), 5)


def test_identity_and_linear_part():
    H = FormalMap.identity(2, 1)
    assert H.linear_part() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert H.G_w0() == [[1]]


def test_rigidity_on_p8_p4(fixtures, maps):
    r = check_rigidity(fixtures["P8"], fixtures["P4"], maps["MAP24"], 4)
    assert r.nu_source == OrderValue.exact(3) and r.nu_target == OrderValue.exact(1)
    assert r.ord_det == OrderValue.exact(1) and r.ord_fbar == OrderValue.exact(2)
    assert (r.rigid.verdict, r.rigid.relation) == (Verdict.HOLDS, "strict")
    assert (r.refined.verdict, r.refined.relation) == (Verdict.HOLDS, "equality")
    assert r.unifbd.verdict == Verdict.HOLDS and r.unifbd.lhs == (3, 3) and r.unifbd.rhs == (1, 1)
    assert not r.inconsistent


def test_rigidity_on_composite(fixtures, maps):
    r = check_rigidity(fixtures["P16"], fixtures["P4"], maps["MAP16_4"], 8)
    assert r.rigid.lhs == (7, 7) and r.rigid.rhs == (4, 4)
    assert r.refined.relation == "equality"  # 1 * 4 + 3 = 7


def test_rigidity_requires_hypotheses(fixtures, maps):
    with pytest.raises(HypothesisError):
        check_rigidity(fixtures["SPHERE"], fixtures["SPHERE"], maps["SCALE_W"], 1)
    with pytest.raises(HypothesisError):
        check_rigidity(fixtures["PLANE"], fixtures["PLANE"], maps["ID"], 1)


def test_inequality_interval_logic():
    assert _geq("x", (3, 3), (1, 2)).verdict == Verdict.HOLDS
    assert _geq("x", (1, 1), (2, 2)).verdict == Verdict.VIOLATED
    assert _geq("x", (0, 3), (2, 2)).verdict == Verdict.UNDECIDED
    unknown = _geq("x", (0, math.inf), (0, 0))
    assert unknown.verdict == Verdict.HOLDS and unknown.to_json()["lhs"] == [0, "inf"]


def test_nu_infinity_bounds(fixtures):
    assert nu_infinity_bounds(fixtures["P8"]) == (3, 3)
    assert nu_infinity_bounds(fixtures["SPHERE_S"]) == (0, 0)
    assert nu_infinity_bounds(fixtures["PLANE"]) == (math.inf, math.inf)


@pytest.mark.parametrize("src, tgt, h", catalog.SENDING_TRIPLES)
def test_theta_pullback_identity(fixtures, maps, src, tgt, h):
    rows = verify_theta_pullback(fixtures[src], fixtures[tgt], maps[h], 4)
    assert all(r.vanishes for r in rows)
    assert any(r.dday_residual is not None for r in rows)


def test_theta_pullback_refuses_maps_that_do_not_send_into(fixtures, maps):
    with pytest.raises(HypothesisError):
        verify_theta_pullback(fixtures["SPHERE"], fixtures["SPHERE"], maps["SCALE_W"], 2)


@pytest.mark.parametrize("h", ["ID", "DILATION", "ROTATION"])
def test_sphere_automorphisms(fixtures, maps, h):
    v = automorphism_criterion(fixtures["SPHERE"], fixtures["SPHERE"], maps[h])
    assert v.criterion == Criterion.SATISFIED and v.k == 1
    assert v.is_biholomorphism and v.consistent


def test_branched_map_fails_criterion(fixtures, maps):
    v = automorphism_criterion(fixtures["P8"], fixtures["P4"], maps["MAP24"])
    assert v.criterion == Criterion.REFUTED_UP_TO_KMAX
    assert v.det_dH0 == GaussianRational(0)
    assert v.consistent


def test_m1_m2_obstruction(fixtures):
    ob = equivalence_obstruction(fixtures["M1"], fixtures["M2"])
    assert ob.obstructed
    assert ob.differing_k == (2, 3)
    assert ob.kappa_source.value == ob.kappa_target.value == 2


def test_map_file_errors():
    with pytest.raises(InputError) as info:
        parse_map("n = 1\nd = 1\nF1 = z1^2\nG1 = w1 + chi1\n", "h.crmap")
    assert (info.value.line, info.value.column) == (4, 11)
    with pytest.raises(InputError, match="missing G1"):
        parse_map("n = 1\nd = 1\nF1 = z1\n")
    with pytest.raises(InputError, match="vanish"):
        parse_map("n = 1\nd = 1\nF1 = z1\nG1 = 1 + w1\n")


def test_transversality_of_compositions(maps):
    flat = fmap(["z1"], ["w1^2 + z1^2"])
    pool = {name: maps[name] for name in ("MAP24", "MAP16_8", "ID", "SCALE_W", "DILATION", "ROTATION")}
    pool["FLAT"] = flat
    for a in pool.values():
        for b in pool.values():
            both = compose(a, b)
            assert is_cr_transversal(both) == (is_cr_transversal(a) and is_cr_transversal(b))


def test_composite_sends_into(fixtures, maps):
    H = compose(maps["MAP24"], maps["MAP16_8"])
    assert sends_into(fixtures["P16"], fixtures["P4"], H)
