"""Command line interface: ``crjet {invariants,segre,bounds,check-map}``.

Exit codes: 0 success, 2 invalid input, 3 undecided at the given budget,
4 internal inconsistency (a verdict contradicting a proven statement).
"""

from __future__ import annotations

import argparse
import json
import sys

from .bounds import BoundError, jet_bound_K
from .files import InputError, load_manifold, load_map
from .invariants import (
    DEFAULT_KMAX,
    Certainty,
    NuValue,
    is_finitely_nondegenerate,
    kappa,
    nu_infinity,
    nu_table,
)
from .manifold import NormalFormManifold
from .maps import (
    Criterion,
    HypothesisError,
    Verdict,
    automorphism_criterion,
    check_rigidity,
    check_sends_into,
    is_cr_transversal,
    not_totally_degenerate_certificate,
    ord_det_fbar_chi,
    verify_theta_pullback,
)
from .segre import finite_type_order, segre_maps
from .series import OrderValue

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNDECIDED = 3
EXIT_INCONSISTENT = 4

THETA_PULLBACK_MAX = 6


def order_json(v: OrderValue) -> dict:
    if v.is_exact:
        return {"value": v.m, "certainty": "EXACT"}
    if v.is_infinite:
        return {"value": "inf", "certainty": "EXACT"}
    return {"value": v.m, "certainty": "AT_LEAST"}


def _witness_json(w):
    if w is None:
        return None
    alphas, ss = w
    return {"alphas": [list(a) for a in alphas], "s": list(ss)}


def nu_row_json(k: int, v: NuValue) -> dict:
    return {"k": k, **order_json(v.value), "witness": _witness_json(v.witness)}


def _kappa_json(kap) -> dict:
    if kap.in_class_c:
        return {"value": kap.value, "certainty": "EXACT", "verdict": "CLASS_C"}
    return {
        "value": None,
        "certainty": "EXACT" if kap.certain else "UP_TO_TRUNCATION",
        "verdict": f"NotClassCUpTo({kap.kmax})",
    }


def _nu_inf_json(pair) -> dict:
    v, cert = pair
    out = order_json(v.value)
    if out["certainty"] == "EXACT" and cert == Certainty.UPPER_BOUND:
        out["certainty"] = "UPPER_BOUND"
    return out


def _manifold_json(M: NormalFormManifold) -> dict:
    return {"label": M.label, "n": M.n, "d": M.d, "trunc": M.trunc}


def dumps(report: dict) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# --- reports -----------------------------------------------------------------


def invariants_report(M: NormalFormManifold, kmax: int, seed: int) -> tuple[dict, int]:
    kap = kappa(M, kmax, seed=seed)
    table = nu_table(M, kmax)
    nu_inf = nu_infinity(M, kmax)
    report = {
        "command": "invariants",
        "manifold": _manifold_json(M),
        "kmax": kmax,
        "kappa": _kappa_json(kap),
        "nu": [nu_row_json(k, table[k]) for k in sorted(table)],
        "nu_inf": _nu_inf_json(nu_inf),
        "finitely_nondegenerate": is_finitely_nondegenerate(M, kmax).value,
    }
    undecided = not kap.certain or (
        kap.in_class_c and any(table[k].value.is_at_least for k in range(kap.value, kmax + 1))
    )
    return report, EXIT_UNDECIDED if undecided else EXIT_OK


def _finite_type_json(ft) -> dict:
    return {
        "order": ft.order,
        "jmax": ft.jmax,
        "verdict": "FINITE_TYPE" if ft.is_finite_type else f"NotFiniteTypeUpTo({ft.jmax})",
        "certainty": "EXACT" if ft.is_finite_type or ft.refuted else "UP_TO_TRUNCATION",
    }


def segre_report(M: NormalFormManifold, jmax: int | None, seed: int) -> tuple[dict, int]:
    ft = finite_type_order(M, jmax, seed=seed)
    maps = segre_maps(M, len(ft.ranks))
    rows = []
    for v, cert in zip(maps, ft.ranks):
        rows.append(
            {
                "j": v.j,
                "rank": cert.to_json(),
                "components": [
                    {"terms": len(c.terms), "degree": c.degree(), "trunc": c.trunc} for c in v.components
                ],
            }
        )
    report = {
        "command": "segre",
        "manifold": _manifold_json(M),
        "N": M.N,
        "segre_maps": rows,
        "finite_type_order": _finite_type_json(ft),
    }
    code = EXIT_OK if ft.is_finite_type or ft.refuted else EXIT_UNDECIDED
    return report, code


def bounds_report(
    M: NormalFormManifold, kmax: int, seed: int, use_type_order: bool, jmax: int | None
) -> tuple[dict, int]:
    base = {"command": "bounds", "manifold": _manifold_json(M), "kmax": kmax}
    try:
        r = jet_bound_K(M, kmax, seed=seed, use_type_order=use_type_order, jmax=jmax)
    except BoundError as exc:
        base.update({"K": None, "verdict": str(exc), "certainty": "UNDECIDED" if exc.undecided else "EXACT"})
        return base, EXIT_UNDECIDED if exc.undecided else EXIT_OK
    base.update(
        {
            "kappa": _kappa_json(r.kappa),
            "nu": [nu_row_json(k, r.nu[k]) for k in sorted(r.nu)],
            "nu_inf": _nu_inf_json(r.nu_inf),
            "k0": r.k0,
            "k1": r.k1,
            "kj": {str(j): r.kj[j] for j in sorted(r.kj)},
            "K": r.K,
            "j_used": r.j_used,
            "certainty": r.certainty.value,
            "finite_type_order": _finite_type_json(r.finite_type),
            "notes": list(r.notes),
        }
    )
    return base, EXIT_OK


def _residual_json(res) -> list:
    return [{"expr": r.to_expr(), "trunc": r.trunc} for r in res]


def check_map_report(M, Mp, H, kmax: int, seed: int) -> tuple[dict, int]:
    report: dict = {
        "command": "check-map",
        "source": _manifold_json(M),
        "target": _manifold_json(Mp),
        "map": {"label": H.label, "n": H.n, "d": H.d},
        "kmax": kmax,
    }
    checks: dict = {}
    report["checks"] = checks
    residual = check_sends_into(M, Mp, H)
    ok = all(r.is_zero() for r in residual)
    checks["sends_into"] = {"verdict": "PASS" if ok else "FAIL", "residual": _residual_json(residual)}
    checks["cr_transversal"] = {"verdict": "PASS" if is_cr_transversal(H) else "FAIL"}
    ntd = not_totally_degenerate_certificate(H, seed=seed)
    checks["not_totally_degenerate"] = {
        "verdict": "PASS" if ntd.rank == H.n else "FAIL",
        "rank": ntd.to_json(),
    }
    checks["ord_det_fbar_chi"] = order_json(ord_det_fbar_chi(H))
    if not ok:
        checks["skipped"] = "H does not send M into M'; map statements not applicable"
        return report, EXIT_OK

    code = EXIT_OK
    rows = verify_theta_pullback(M, Mp, H, min(kmax, THETA_PULLBACK_MAX))
    bad = [list(r.alpha) for r in rows if not r.vanishes]
    checks["theta_pullback"] = {
        "max_order": min(kmax, THETA_PULLBACK_MAX),
        "verdict": "PASS" if not bad else "FAIL",
        "failing_alphas": bad,
    }
    if bad:
        code = EXIT_INCONSISTENT

    kap = kappa(M, kmax, seed=seed)
    if kap.in_class_c:
        try:
            rig = check_rigidity(M, Mp, H, kap.value, kmax, seed=seed)
            checks["rigidity"] = {
                "k": rig.k,
                "nu_source": order_json(rig.nu_source),
                "nu_target": order_json(rig.nu_target),
                "ord_fbar": order_json(rig.ord_fbar),
                "inequalities": [c.to_json() for c in rig.checks],
            }
            if rig.inconsistent:
                code = EXIT_INCONSISTENT
            elif any(c.verdict == Verdict.UNDECIDED for c in rig.checks) and code == EXIT_OK:
                code = EXIT_UNDECIDED
            aut = automorphism_criterion(M, Mp, H, kmax, seed=seed)
            checks["automorphism"] = {
                "criterion": aut.criterion.value,
                "k": aut.k,
                "det_dH0": str(aut.det_dH0),
                "biholomorphism": aut.is_biholomorphism,
                "finitely_nondegenerate": aut.finitely_nondegenerate.value,
                "consistent": aut.consistent,
            }
            if aut.consistent is False:
                code = EXIT_INCONSISTENT
            elif aut.criterion == Criterion.UNDECIDED and code == EXIT_OK:
                code = EXIT_UNDECIDED
        except HypothesisError as exc:
            checks["rigidity"] = {"skipped": str(exc)}
    else:
        checks["rigidity"] = {"skipped": f"source not in class C: {kap}"}
        if not kap.certain and code == EXIT_OK:
            code = EXIT_UNDECIDED
    return report, code


# --- text rendering ----------------------------------------------------------


def _fmt_order(o: dict) -> str:
    tag = {"EXACT": "", "AT_LEAST": " (at least)", "UPPER_BOUND": " (upper bound)"}[o["certainty"]]
    return f"{o['value']}{tag}"


def render_text(report: dict) -> str:
    lines = []
    cmd = report["command"]
    if cmd == "check-map":
        lines.append(f"map {report['map']['label']}: {report['source']['label']} -> {report['target']['label']}")
    else:
        m = report["manifold"]
        lines.append(f"manifold {m['label']}  n={m['n']} d={m['d']} trunc={m['trunc']}")
    if "kappa" in report:
        k = report["kappa"]
        lines.append(f"kappa: {k['value'] if k['value'] is not None else k['verdict']}")
    if "nu" in report:
        for row in report["nu"]:
            lines.append(f"  nu({row['k']}) = {_fmt_order(row)}")
    if "nu_inf" in report:
        lines.append(f"nu(inf): {_fmt_order(report['nu_inf'])}")
    if "finitely_nondegenerate" in report:
        lines.append(f"finitely nondegenerate: {report['finitely_nondegenerate']}")
    if cmd == "segre":
        for row in report["segre_maps"]:
            r = row["rank"]
            lines.append(f"  v^{row['j']}: rank {r['rank']} ({r['verdict']})")
    if "finite_type_order" in report:
        ft = report["finite_type_order"]
        lines.append(f"finite type order: {ft['order'] if ft['order'] is not None else ft['verdict']}")
    if cmd == "bounds":
        if report["K"] is None:
            lines.append(f"K undefined: {report['verdict']}")
        else:
            lines.append(f"k0 = {report['k0']}, k1 = {report['k1']}")
            lines.append(f"K = {report['K']} ({report['certainty']})")
            lines.extend(f"  note: {n}" for n in report["notes"])
    if cmd == "check-map":
        c = report["checks"]
        lines.append(f"sends into: {c['sends_into']['verdict']}")
        for r in c["sends_into"]["residual"]:
            if r["expr"] != "0":
                lines.append(f"  residual: {r['expr']}")
        lines.append(f"CR-transversal: {c['cr_transversal']['verdict']}")
        lines.append(f"not totally degenerate: {c['not_totally_degenerate']['verdict']}")
        lines.append(f"ord det Fbar_chi(chi,0): {_fmt_order(c['ord_det_fbar_chi'])}")
        if "theta_pullback" in c:
            lines.append(f"theta pullback (|alpha| <= {c['theta_pullback']['max_order']}): {c['theta_pullback']['verdict']}")
        rig = c.get("rigidity")
        if rig and "skipped" in rig:
            lines.append(f"rigidity: skipped ({rig['skipped']})")
        elif rig:
            lines.append(f"rigidity at k = {rig['k']}:")
            for ineq in rig["inequalities"]:
                lhs, rhs = ineq["lhs"], ineq["rhs"]
                lines.append(f"  {ineq['name']}: {lhs} vs {rhs} {ineq['verdict']} ({ineq['relation']})")
        aut = c.get("automorphism")
        if aut:
            lines.append(f"automorphism criterion: {aut['criterion']} (k = {aut['k']}, consistent = {aut['consistent']})")
    return "\n".join(lines) + "\n"


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crjet", description="CR invariants and jet determination bounds")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kmax", type=int, default=DEFAULT_KMAX)
    common.add_argument("--jmax", type=int, default=None)
    common.add_argument("--trunc", type=int, default=None, help="graph ingestion order (default: header or 16)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="canonical JSON output")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("invariants", "segre"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("manifold")
    s = sub.add_parser("bounds", parents=[common])
    s.add_argument("manifold")
    s.add_argument("--use-type-order", action="store_true")
    s = sub.add_parser("check-map", parents=[common])
    s.add_argument("source")
    s.add_argument("target")
    s.add_argument("map")
    return p


def run(argv=None) -> tuple[str, int]:
    """Parse ``argv`` and return (output, exit code); errors go to the output."""
    args = build_parser().parse_args(argv)
    if args.kmax < 1:
        return "error: --kmax must be >= 1\n", EXIT_INVALID
    if args.trunc is not None and args.trunc < 1:
        return "error: --trunc must be >= 1\n", EXIT_INVALID
    try:
        if args.command == "check-map":
            M = load_manifold(args.source, args.trunc)
            Mp = load_manifold(args.target, args.trunc)
            H = load_map(args.map)
            if (M.n, M.d) != (H.n, H.d) or (Mp.n, Mp.d) != (H.n, H.d):
                return "error: dimensions of source, target and map differ\n", EXIT_INVALID
            report, code = check_map_report(M, Mp, H, args.kmax, args.seed)
        else:
            M = load_manifold(args.manifold, args.trunc)
            if args.jmax is not None and args.jmax < M.d + 1:
                return f"error: --jmax must be at least d + 1 = {M.d + 1}\n", EXIT_INVALID
            if args.command == "invariants":
                report, code = invariants_report(M, args.kmax, args.seed)
            elif args.command == "segre":
                report, code = segre_report(M, args.jmax, args.seed)
            else:
                report, code = bounds_report(M, args.kmax, args.seed, args.use_type_order, args.jmax)
    except InputError as exc:
        return f"error: {exc}\n", EXIT_INVALID
    return (dumps(report) if args.json else render_text(report)), code


def main(argv=None) -> int:
    out, code = run(argv)
    stream = sys.stderr if code == EXIT_INVALID else sys.stdout
    stream.write(out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
