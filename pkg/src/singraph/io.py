"""JSON and DOT serialization for graphs, cycles and decorated curves.

Graph files::

    {"vertices": [{"id": "v1", "weight": -2}, ...],
     "edges": [["v1", "v2"], ["v2", "v3", 2], ...]}

An edge may also be written ``{"ends": ["v1", "v2"], "mult": 2}``.

Decorated-curve files::

    {"points": [{"id": 1, "parent": null, "proximate_to": []}, ...],
     "branches": [{"attach": 5, "l": 6}, ...]}

``proximate_to`` lists the points besides the parent that a point is
proximate to; listing the parent as well is accepted.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from .graph_core import Cycle, GraphError, WeightedDualGraph
from .sandwich import Branch, ClusterPoint, DecoratedCurve

__all__ = [
    "FormatError",
    "graph_to_json",
    "graph_from_json",
    "cycle_to_json",
    "cycle_from_json",
    "curve_to_json",
    "curve_from_json",
    "load_graph",
    "load_curve",
    "load_json",
    "dumps",
    "to_dot",
]


class FormatError(GraphError):
    """Malformed input file; the message names the offending field or line."""


def load_json(path: Union[str, Path]) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=False)


def _need(obj: Any, key: str, where: str) -> Any:
    if not isinstance(obj, Mapping):
        raise FormatError(f"{where}: expected an object")
    if key not in obj:
        raise FormatError(f"{where}: missing field {key!r}")
    return obj[key]


def _int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError(f"{where}: expected an integer, got {x!r}")
    return x


def _list(x: Any, where: str) -> list:
    if not isinstance(x, list):
        raise FormatError(f"{where}: expected a list")
    return x


# -- graphs ---------------------------------------------------------------------

def graph_to_json(g: WeightedDualGraph) -> Dict[str, Any]:
    edges: List[list] = []
    for a, b, m in g.edges():
        edges.append([a, b] if m == 1 else [a, b, m])
    return {
        "vertices": [{"id": v, "weight": w} for v, w in zip(g.vertices, g.weights)],
        "edges": edges,
    }


def graph_from_json(data: Any, where: str = "graph") -> WeightedDualGraph:
    verts = _list(_need(data, "vertices", where), f"{where}.vertices")
    weights: Dict[str, int] = {}
    for k, item in enumerate(verts):
        loc = f"{where}.vertices[{k}]"
        vid = _need(item, "id", loc)
        if not isinstance(vid, str) or not vid:
            raise FormatError(f"{loc}.id: expected a non-empty string, got {vid!r}")
        if vid in weights:
            raise FormatError(f"{loc}.id: duplicate vertex {vid!r}")
        weights[vid] = _int(_need(item, "weight", loc), f"{loc}.weight")
        if _int(item.get("genus", 0), f"{loc}.genus") != 0:
            raise FormatError(f"{loc}.genus: only rational curves (genus 0) are supported")
    edges = []
    raw = data.get("edges", []) if isinstance(data, Mapping) else []
    for k, e in enumerate(_list(raw, f"{where}.edges")):
        loc = f"{where}.edges[{k}]"
        if isinstance(e, Mapping):
            ends = _list(_need(e, "ends", loc), f"{loc}.ends")
            mult = _int(e.get("mult", 1), f"{loc}.mult")
        elif isinstance(e, list):
            ends, mult = e[:2], (_int(e[2], f"{loc}[2]") if len(e) == 3 else 1)
            if len(e) not in (2, 3):
                raise FormatError(f"{loc}: expected [u, v] or [u, v, mult]")
        else:
            raise FormatError(f"{loc}: expected a list or an object")
        if len(ends) != 2:
            raise FormatError(f"{loc}: an edge has two ends")
        for x in ends:
            if x not in weights:
                raise FormatError(f"{loc}: unknown vertex {x!r}")
        if mult < 1:
            raise FormatError(f"{loc}.mult: multiplicity must be positive")
        edges.append((ends[0], ends[1], mult))
    try:
        return WeightedDualGraph(weights, edges)
    except FormatError:
        raise
    except GraphError as exc:
        raise FormatError(f"{where}: {exc}") from None


def load_graph(path: Union[str, Path]) -> WeightedDualGraph:
    return graph_from_json(load_json(path), str(path))


# -- cycles ---------------------------------------------------------------------

def cycle_to_json(c: Cycle) -> Dict[str, Any]:
    return {"coeffs": c.as_dict()}


def cycle_from_json(g: WeightedDualGraph, data: Any, where: str = "cycle") -> Cycle:
    coeffs = _need(data, "coeffs", where)
    if not isinstance(coeffs, Mapping):
        raise FormatError(f"{where}.coeffs: expected an object")
    out = {}
    for v, x in coeffs.items():
        if v not in g:
            raise FormatError(f"{where}.coeffs: unknown vertex {v!r}")
        out[v] = _int(x, f"{where}.coeffs.{v}")
    return g.cycle(out)


# -- decorated curves -------------------------------------------------------------

def curve_to_json(c: DecoratedCurve) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "points": [
            {"id": p.id, "parent": p.parent, "proximate_to": [q for q in p.proximities() if q != p.parent]}
            for p in c.points
        ],
        "branches": [{"attach": b.attach, "l": b.l} for b in c.branches],
    }
    if c.labels:
        out["labels"] = {str(k): v for k, v in c.labels}
    return out


def curve_from_json(data: Any, where: str = "curve") -> DecoratedCurve:
    pts = []
    for k, item in enumerate(_list(_need(data, "points", where), f"{where}.points")):
        loc = f"{where}.points[{k}]"
        pid = _int(_need(item, "id", loc), f"{loc}.id")
        parent = item.get("parent")
        if parent is not None:
            parent = _int(parent, f"{loc}.parent")
        prox = tuple(_int(q, f"{loc}.proximate_to") for q in _list(item.get("proximate_to", []), f"{loc}.proximate_to"))
        pts.append(ClusterPoint(pid, parent, prox))
    branches = []
    for k, item in enumerate(_list(_need(data, "branches", where), f"{where}.branches")):
        loc = f"{where}.branches[{k}]"
        attach = item.get("attach") if isinstance(item, Mapping) else None
        if attach is not None:
            attach = _int(attach, f"{loc}.attach")
        branches.append(Branch(attach, _int(_need(item, "l", loc), f"{loc}.l")))
    labels = ()
    raw = data.get("labels") if isinstance(data, Mapping) else None
    if isinstance(raw, Mapping):
        labels = tuple(sorted((int(k), str(v)) for k, v in raw.items()))
    try:
        return DecoratedCurve(tuple(pts), tuple(branches), labels)
    except GraphError as exc:
        raise FormatError(f"{where}: {exc}") from None


def load_curve(path: Union[str, Path]) -> DecoratedCurve:
    return curve_from_json(load_json(path), str(path))


# -- DOT --------------------------------------------------------------------------

def to_dot(g: WeightedDualGraph, name: str = "G", highlight: Optional[Sequence[str]] = None) -> str:
    """Undirected DOT text; each vertex is labelled with its weight."""
    marked = set(highlight or ())
    lines = [f"graph {json.dumps(name)} {{", "  node [shape=circle];"]
    for v, w in zip(g.vertices, g.weights):
        extra = ", style=filled" if v in marked else ""
        lines.append(f"  {json.dumps(v)} [label={json.dumps(str(w))}, xlabel={json.dumps(v)}{extra}];")
    for a, b, m in g.edges():
        attr = f" [label={json.dumps(str(m))}]" if m != 1 else ""
        lines.append(f"  {json.dumps(a)} -- {json.dumps(b)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
