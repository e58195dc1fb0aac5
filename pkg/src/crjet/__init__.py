"""Exact CR invariants and finite jet determination bounds for formal generic submanifolds."""

from .bounds import BoundCertainty, BoundError, JetBoundReport, jet_bound_K, k0, k1
from .files import InputError, load_manifold, load_map, parse_manifold, parse_map
from .invariants import (
    Certainty,
    Nondegeneracy,
    det_D,
    is_finitely_nondegenerate,
    kappa,
    nu,
    nu_infinity,
    nu_table,
    theta,
    theta_table,
)
from .manifold import (
    GraphDatum,
    ManifoldError,
    NormalFormManifold,
    from_graph,
    from_rigid_graph,
    linear_change,
    validate,
)
from .maps import (
    FormalMap,
    automorphism_criterion,
    check_rigidity,
    check_sends_into,
    compose,
    equivalence_obstruction,
    ord_det_fbar_chi,
    verify_theta_pullback,
)
from .parser import ParseError, parse_expression
from .segre import finite_type_order, generic_rank, segre_map, segre_maps
from .series import GaussianRational, OrderValue, TruncatedSeries

__version__ = "0.1.0"

__all__ = [
    "BoundCertainty",
    "BoundError",
    "Certainty",
    "FormalMap",
    "GaussianRational",
    "GraphDatum",
    "InputError",
    "JetBoundReport",
    "ManifoldError",
    "Nondegeneracy",
    "NormalFormManifold",
    "OrderValue",
    "ParseError",
    "TruncatedSeries",
    "automorphism_criterion",
    "check_rigidity",
    "check_sends_into",
    "compose",
    "det_D",
    "equivalence_obstruction",
    "finite_type_order",
    "from_graph",
    "from_rigid_graph",
    "generic_rank",
    "is_finitely_nondegenerate",
    "jet_bound_K",
    "k0",
    "k1",
    "kappa",
    "linear_change",
    "load_manifold",
    "load_map",
    "nu",
    "nu_infinity",
    "nu_table",
    "ord_det_fbar_chi",
    "parse_expression",
    "parse_manifold",
    "parse_map",
    "segre_map",
    "segre_maps",
    "theta",
    "theta_table",
    "validate",
    "verify_theta_pullback",
]
