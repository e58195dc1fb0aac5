"""Bundled fixture manifolds and maps."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from .files import load_manifold, load_map, parse_manifold, parse_map
from .manifold import NormalFormManifold
from .maps import FormalMap, compose

MANIFOLDS = ("SPHERE", "PLANE", "P4", "P8", "P16", "M1", "M2", "CODIM2", "SPHERE_S")

MAPS = ("MAP24", "MAP16_8", "MAP16_4", "ID", "SCALE_W", "DILATION", "ROTATION", "ID2", "ID_CODIM2")

_MANIFOLD_FILES = {
    "SPHERE": "sphere.crm",
    "PLANE": "plane.crm",
    "P4": "p4.crm",
    "P8": "p8.crm",
    "P16": "p16.crm",
    "M1": "m1.crm",
    "M2": "m2.crm",
    "CODIM2": "codim2.crm",
    "SPHERE_S": "sphere_s.crm",
}

_MAP_FILES = {
    "MAP24": "map24.crmap",
    "MAP16_8": "map_16_8.crmap",
    "ID": "id1.crmap",
    "SCALE_W": "scale_w.crmap",
    "DILATION": "dilation.crmap",
    "ROTATION": "rotation.crmap",
    "ID2": "id2.crmap",
    "ID_CODIM2": "id_codim2.crmap",
}

# maps built by composition (outer, inner) rather than read from a file
_COMPOSED = {"MAP16_4": ("MAP24", "MAP16_8")}

# (source, target, map) triples for which the map sends source into target
SENDING_TRIPLES = (
    ("P8", "P4", "MAP24"),
    ("P16", "P8", "MAP16_8"),
    ("P16", "P4", "MAP16_4"),
    ("SPHERE", "SPHERE", "ID"),
    ("SPHERE", "SPHERE", "DILATION"),
    ("SPHERE", "SPHERE", "ROTATION"),
    ("M1", "M1", "ID2"),
    ("M2", "M2", "ID2"),
    ("CODIM2", "CODIM2", "ID_CODIM2"),
    ("SPHERE_S", "SPHERE_S", "ID"),
    ("P4", "P4", "ID"),
)


def _data(name: str):
    return resources.files("crjet").joinpath("data", name)


def data_path(name: str) -> Path:
    """Filesystem path of a bundled fixture file (by label or file name)."""
    fname = _MANIFOLD_FILES.get(name) or _MAP_FILES.get(name) or name
    return Path(str(_data(fname)))


@lru_cache(maxsize=None)
def manifold(name: str) -> NormalFormManifold:
    return parse_manifold(_data(_MANIFOLD_FILES[name]).read_text(), _MANIFOLD_FILES[name])


@lru_cache(maxsize=None)
def formal_map(name: str) -> FormalMap:
    if name in _COMPOSED:
        outer, inner = _COMPOSED[name]
        H = compose(formal_map(outer), formal_map(inner))
        return FormalMap(H.n, H.d, H.F, H.G, name)
    return parse_map(_data(_MAP_FILES[name]).read_text(), _MAP_FILES[name])


__all__ = [
    "MANIFOLDS",
    "MAPS",
    "SENDING_TRIPLES",
    "data_path",
    "formal_map",
    "load_manifold",
    "load_map",
    "manifold",
]
