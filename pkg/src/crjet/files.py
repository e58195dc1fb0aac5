"""Readers for manifold (``.crm``) and map (``.crmap``) files.

Both formats are line based.  ``#`` starts a comment; header lines are
``key = value`` for ``n``, ``d``, ``trunc`` and ``label``; body lines assign
expressions::

    label = SPHERE
    n = 1
    d = 1
    Q1 = tau1 + 2*i*z1*chi1

A manifold body uses either ``Q<j>`` (normal form, variables z, chi, tau) or
``imw<j>`` (graph form ``Im w_j = phi_j``, variables z, chi, s).  A map body
assigns ``F<k>`` and ``G<j>`` in the variables z, w.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .manifold import (
    GraphDatum,
    ManifoldError,
    NormalFormManifold,
    from_graph,
    from_rigid_graph,
    graph_variables,
    manifold_variables,
    validate,
)
from .maps import FormalMap, MapError, map_variables
from .parser import ParseError, parse_expression
from .series import SeriesError

DEFAULT_TRUNC = 16

_HEADER_KEYS = ("n", "d", "trunc", "label")
_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


class InputError(ValueError):
    """Unreadable or invalid input file; carries a location when known."""

    def __init__(self, message: str, path: str = "<input>", line: int | None = None, column: int | None = None):
        where = path
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


@dataclass
class _Entry:
    key: str
    value: str
    line: int
    column: int  # 1-based column where the value starts


def _read_entries(text: str, path: str) -> tuple[dict[str, _Entry], list[_Entry]]:
    header: dict[str, _Entry] = {}
    body: list[_Entry] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE.match(line)
        if m is None:
            col = len(line) - len(line.lstrip()) + 1
            raise InputError("expected 'key = value'", path, lineno, col)
        entry = _Entry(m.group(1), m.group(2), lineno, m.start(2) + 1)
        if entry.key in _HEADER_KEYS:
            if entry.key in header:
                raise InputError(f"duplicate header key {entry.key!r}", path, lineno, 1)
            header[entry.key] = entry
        else:
            body.append(entry)
    return header, body


def _int_header(header, key, path, default=None, minimum=1) -> int:
    entry = header.get(key)
    if entry is None:
        if default is None:
            raise InputError(f"missing header '{key} = ...'", path)
        return default
    try:
        value = int(entry.value)
    except ValueError:
        raise InputError(f"{key} must be an integer", path, entry.line, entry.column) from None
    if value < minimum:
        raise InputError(f"{key} must be >= {minimum}", path, entry.line, entry.column)
    return value


def _parse(entry: _Entry, variables, path):
    try:
        return parse_expression(entry.value, variables, line=entry.line, column=entry.column)
    except ParseError as exc:
        raise InputError(exc.message, path, exc.line, exc.column) from None


def _components(body, prefix, count, variables, path):
    found = {}
    for e in body:
        m = re.fullmatch(rf"{prefix}(\d+)", e.key)
        if m is None:
            continue
        j = int(m.group(1))
        if not 1 <= j <= count:
            raise InputError(f"{e.key} out of range 1..{count}", path, e.line, 1)
        if j in found:
            raise InputError(f"duplicate assignment {e.key}", path, e.line, 1)
        found[j] = _parse(e, variables, path)
    return found


def parse_manifold(text: str, path: str = "<input>", trunc: int | None = None) -> NormalFormManifold:
    """Build and validate a manifold; ``trunc`` overrides the header for graph ingestion."""
    header, body = _read_entries(text, path)
    n = _int_header(header, "n", path)
    d = _int_header(header, "d", path)
    if trunc is None:
        trunc = _int_header(header, "trunc", path, default=DEFAULT_TRUNC)
    label = header["label"].value if "label" in header else Path(path).stem
    keys = {re.sub(r"\d+$", "", e.key) for e in body}
    unknown = keys - {"Q", "imw"}
    if unknown:
        bad = next(e for e in body if re.sub(r"\d+$", "", e.key) in unknown)
        raise InputError(f"unknown assignment {bad.key!r} (expected Q<j> or imw<j>)", path, bad.line, 1)
    if keys == {"Q", "imw"}:
        raise InputError("mixing Q<j> and imw<j> assignments", path)
    try:
        if keys == {"Q"}:
            comps = _components(body, "Q", d, manifold_variables(n, d), path)
            missing = [j for j in range(1, d + 1) if j not in comps]
            if missing:
                raise InputError(f"missing Q{missing[0]}", path)
            M = NormalFormManifold(n, d, tuple(comps[j] for j in range(1, d + 1)), label)
            report = validate(M)
            if not report.ok:
                raise InputError("invalid normal form: " + "; ".join(report.failures()), path)
            return M
        comps = _components(body, "imw", d, graph_variables(n, d), path)
        missing = [j for j in range(1, d + 1) if j not in comps]
        if missing:
            raise InputError(f"missing imw{missing[0]}", path)
        g = GraphDatum(n, d, tuple(comps[j] for j in range(1, d + 1)))
        if g.rigid:
            return from_rigid_graph(g, label)
        return from_graph(g, trunc, label)
    except (ManifoldError, SeriesError) as exc:
        raise InputError(str(exc), path) from None


def parse_map(text: str, path: str = "<input>") -> FormalMap:
    header, body = _read_entries(text, path)
    n = _int_header(header, "n", path)
    d = _int_header(header, "d", path)
    label = header["label"].value if "label" in header else Path(path).stem
    for e in body:
        if not re.fullmatch(r"[FG]\d+", e.key):
            raise InputError(f"unknown assignment {e.key!r} (expected F<k> or G<j>)", path, e.line, 1)
    variables = map_variables(n, d)
    F = _components(body, "F", n, variables, path)
    G = _components(body, "G", d, variables, path)
    for name, comps, count in (("F", F, n), ("G", G, d)):
        missing = [j for j in range(1, count + 1) if j not in comps]
        if missing:
            raise InputError(f"missing {name}{missing[0]}", path)
    try:
        return FormalMap(
            n, d, [F[k] for k in range(1, n + 1)], [G[j] for j in range(1, d + 1)], label
        )
    except (MapError, SeriesError) as exc:
        raise InputError(str(exc), path) from None


def load_manifold(path: str | Path, trunc: int | None = None) -> NormalFormManifold:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read file: {exc.strerror}", str(path)) from None
    return parse_manifold(text, str(path), trunc)


def load_map(path: str | Path) -> FormalMap:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read file: {exc.strerror}", str(path)) from None
    return parse_map(text, str(path))
