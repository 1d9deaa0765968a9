"""Template-based classification of minimal rational graphs.

Templates for the quasi-homogeneous taut graphs (types I/II and III.1-III.9)
and for the three confining graphs of type ~E_k are encoded as arm patterns
around the unique vertex of valency three.  Slot tokens:

``dot``  any weight ``<= -2``
``sq``   any weight ``<= -3``
``m2``   weight exactly ``-2``

An arm pattern is ``(fixed, more)``: the arm starts with the ``fixed`` tokens
and, when ``more`` is set, may continue with any number of ``dot`` vertices.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

from .cycles import contact, fundamental_cycle, is_rational, multiplicity
from .graph_core import GraphError, WeightedDualGraph, is_negative_definite, subgraph, vertex_key

__all__ = [
    "LauferTag",
    "LauferType",
    "Base",
    "Obtainable",
    "HighValencyStar",
    "TwoTripleMerge",
    "ConfiningSubgraph",
    "star_arms",
    "laufer_type",
    "is_rdp",
    "is_rtp",
    "obtainable_from_base",
    "has_rtp_base",
    "is_conjecturally_simple",
    "nonsimple_witness",
    "find_confining_subgraph",
    "sandwich_obstruction",
    "obstructing_subgraph",
    "classify",
    "TAUT_TEMPLATES",
    "CONFINING_TEMPLATES",
]


class LauferTag(enum.Enum):
    I_II = "I/II"
    III_1 = "III.1"
    III_2 = "III.2"
    III_3 = "III.3"
    III_4 = "III.4"
    III_5 = "III.5"
    III_6 = "III.6"
    III_7 = "III.7"
    III_8 = "III.8"
    III_9 = "III.9"


ArmPattern = Tuple[Tuple[str, ...], bool]

# (center token, arm patterns); arm names follow the drawings: the short arm
# hanging down, then the left and right arms
TAUT_TEMPLATES: Dict[LauferTag, Tuple[str, Dict[str, ArmPattern]]] = {
    LauferTag.III_1: ("sq", {"down": (("dot",), True), "left": (("dot",), True), "right": (("dot",), True)}),
    LauferTag.III_2: ("m2", {"down": (("dot",), False), "left": (("dot",), False), "right": (("dot",), True)}),
    LauferTag.III_3: ("m2", {"down": (("dot",), False), "left": (("sq", "dot"), True), "right": (("dot", "dot"), True)}),
    LauferTag.III_4: ("m2", {"down": (("sq",), False), "left": (("m2", "dot"), False), "right": (("m2", "dot"), True)}),
    LauferTag.III_5: ("m2", {"down": (("m2",), False), "left": (("m2", "dot"), False),
                             "right": (("m2", "sq", "dot"), True)}),
    LauferTag.III_6: ("m2", {"down": (("m2",), False), "left": (("m2", "dot"), False),
                             "right": (("m2", "m2", "sq", "dot"), True)}),
    LauferTag.III_7: ("m2", {"down": (("m2",), False), "left": (("m2", "dot"), False), "right": (("m2", "dot"), False)}),
    LauferTag.III_8: ("m2", {"down": (("m2",), False), "left": (("m2", "dot"), False),
                             "right": (("m2", "m2", "dot"), False)}),
    LauferTag.III_9: ("m2", {"down": (("m2",), False), "left": (("m2", "dot"), False),
                             "right": (("m2", "m2", "m2", "dot"), False)}),
}

# confining graphs; arms are listed in the order p, q, r (lengths counted
# with the center) so that arm i carries the vertices E_{i,1}, E_{i,2}, ...
CONFINING_TEMPLATES: Dict[str, Tuple[str, Tuple[Tuple[str, ...], ...]]] = {
    "E6~": ("m2", (("dot", "dot"), ("dot", "dot"), ("dot", "dot"))),
    "E7~": ("m2", (("dot",), ("m2", "dot", "dot"), ("m2", "dot", "dot"))),
    "E8~": ("m2", (("m2",), ("m2", "dot"), ("m2", "m2", "m2", "dot", "dot"))),
}


def _fits(token: str, w: int) -> bool:
    if token == "dot":
        return w <= -2
    if token == "sq":
        return w <= -3
    if token == "m2":
        return w == -2
    raise ValueError(token)


def _arm_matches(weights: Sequence[int], pattern: ArmPattern) -> bool:
    fixed, more = pattern
    if len(weights) < len(fixed) or (not more and len(weights) != len(fixed)):
        return False
    if not all(_fits(t, w) for t, w in zip(fixed, weights)):
        return False
    return all(w <= -2 for w in weights[len(fixed):])


def star_arms(g: WeightedDualGraph) -> Optional[Tuple[str, List[List[str]]]]:
    """``(node, arms)`` for a tree with exactly one vertex of valency three.

    Arms are vertex lists ordered outward from the node.  Returns ``None`` for
    any other shape.
    """
    if not g.is_tree():
        return None
    deg = {v: len(g.neighbors(v)) for v in g.vertices}
    nodes = [v for v, d in deg.items() if d >= 3]
    if len(nodes) != 1 or deg[nodes[0]] != 3:
        return None
    c = nodes[0]
    arms = []
    for first in g.neighbors(c):
        arm, prev, cur = [], c, first
        while True:
            arm.append(cur)
            nxt = [u for u in g.neighbors(cur) if u != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
        arms.append(arm)
    return c, arms


@dataclass(frozen=True)
class LauferType:
    tag: Optional[LauferTag]
    witness: Dict[str, Union[str, List[str]]] = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return self.tag is not None

    @property
    def name(self) -> str:
        return self.tag.value if self.tag else "none"


def _require_minimal_connected(g: WeightedDualGraph) -> None:
    if len(g) == 0 or not g.is_connected():
        raise GraphError("graph must be non-empty and connected")
    if not g.is_minimal():
        raise GraphError("graph is not minimal (some weight > -2)")


def laufer_type(g: WeightedDualGraph) -> LauferType:
    """First taut template matched by ``g`` (in the order I/II, III.1, ...)."""
    _require_minimal_connected(g)
    if g.is_chain():
        order = sorted(g.vertices, key=vertex_key)
        ends_ = [v for v in g.vertices if len(g.neighbors(v)) <= 1]
        path = [min(ends_, key=vertex_key)]
        while len(path) < len(order):
            path.append(next(u for u in g.neighbors(path[-1]) if u not in path))
        return LauferType(LauferTag.I_II, {"chain": path})
    shape = star_arms(g)
    if shape is None:
        return LauferType(None)
    c, arms = shape
    wc = g.weight(c)
    arm_w = [[g.weight(v) for v in arm] for arm in arms]
    for tag, (ctoken, slots) in TAUT_TEMPLATES.items():
        if not _fits(ctoken, wc):
            continue
        names = list(slots)
        for perm in permutations(range(3)):
            if all(_arm_matches(arm_w[perm[k]], slots[names[k]]) for k in range(3)):
                witness: Dict[str, Union[str, List[str]]] = {"center": c}
                for k, nm in enumerate(names):
                    witness[nm] = arms[perm[k]]
                return LauferType(tag, witness)
    return LauferType(None)


def is_rdp(g: WeightedDualGraph) -> bool:
    """Rational double point: connected, all weights -2, negative definite."""
    return len(g) > 0 and g.is_connected() and all(w == -2 for w in g.weights) and is_negative_definite(g)


def is_rtp(g: WeightedDualGraph) -> bool:
    """Rational triple point: minimal, rational, multiplicity three."""
    if len(g) == 0 or not g.is_connected() or not g.is_minimal() or not is_negative_definite(g):
        return False
    return is_rational(g) and multiplicity(g) == 3


class Base(enum.Enum):
    RDP = "RDP"
    RTP = "RTP"


@dataclass(frozen=True)
class Obtainable:
    base: Optional[Base]
    weights: Dict[str, int] = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return self.base is not None


def _shape_key(g: WeightedDualGraph) -> tuple:
    return (g.vertices, tuple((a, b, m) for a, b, m in g.edges()))


@lru_cache(maxsize=1 << 16)
def _base_ok(shape: tuple, deep: Optional[str]) -> bool:
    verts, edges = shape
    w = {v: (-3 if v == deep else -2) for v in verts}
    base = WeightedDualGraph(w, edges)
    return is_rdp(base) if deep is None else is_rtp(base)


def obtainable_from_base(g: WeightedDualGraph) -> Obtainable:
    """Search for an RDP or RTP graph on the same tree with weights ``>= w``.

    RDP is tried first, then an RTP with its ``-3`` at each vertex of weight
    ``<= -3`` in id order.  Returns the first base found with its weights.
    """
    _require_minimal_connected(g)
    if not is_rational(g):
        raise GraphError("graph is not rational")
    shape = _shape_key(g)
    if _base_ok(shape, None):
        return Obtainable(Base.RDP, {v: -2 for v in g.vertices})
    for v, w in zip(g.vertices, g.weights):
        if w <= -3 and _base_ok(shape, v):
            return Obtainable(Base.RTP, {u: (-3 if u == v else -2) for u in g.vertices})
    return Obtainable(None)


def has_rtp_base(g: WeightedDualGraph) -> bool:
    """Whether ``g`` is obtainable from some rational triple point."""
    shape = _shape_key(g)
    return any(w <= -3 and _base_ok(shape, v) for v, w in zip(g.vertices, g.weights))


def is_conjecturally_simple(g: WeightedDualGraph) -> bool:
    """Rational and obtainable from a rational double or triple point."""
    _require_minimal_connected(g)
    if not is_negative_definite(g):
        raise GraphError("intersection form is not negative definite")
    return is_rational(g) and bool(obtainable_from_base(g))


# -- witnesses of non-simpleness ----------------------------------------------

@dataclass(frozen=True)
class HighValencyStar:
    vertex: str
    kind: str = "HighValencyStar"


@dataclass(frozen=True)
class TwoTripleMerge:
    path: Tuple[str, ...]
    kind: str = "TwoTripleMerge"


@dataclass(frozen=True)
class ConfiningSubgraph:
    type: str
    slots: Dict[str, str] = field(compare=False)
    kind: str = "ConfiningSubgraph"


Witness = Union[HighValencyStar, TwoTripleMerge, ConfiningSubgraph]


def find_confining_subgraph(g: WeightedDualGraph) -> Optional[ConfiningSubgraph]:
    """An induced ~E6, ~E7 or ~E8 subgraph respecting the confining weight patterns.

    Slots are named ``E0`` (center) and ``E{i},{j}`` (arm ``i``, ``j``-th
    vertex from the center).
    """
    shape = star_arms(g)
    if shape is None:
        return None
    c, arms = shape
    if g.weight(c) != -2:
        return None
    for kind, (_, pats) in CONFINING_TEMPLATES.items():
        for perm in permutations(range(3)):
            ok = True
            for i, pat in enumerate(pats):
                arm = arms[perm[i]]
                if len(arm) < len(pat) or not all(_fits(t, g.weight(v)) for t, v in zip(pat, arm)):
                    ok = False
                    break
            if ok:
                slots = {"E0": c}
                for i, pat in enumerate(pats):
                    for j in range(len(pat)):
                        slots[f"E{i + 1},{j + 1}"] = arms[perm[i]][j]
                return ConfiningSubgraph(kind, slots)
    return None


def _path(g: WeightedDualGraph, a: str, b: str) -> List[str]:
    prev = {a: None}
    queue = [a]
    for v in queue:
        for u in g.neighbors(v):
            if u not in prev:
                prev[u] = v
                queue.append(u)
    out = [b]
    while out[-1] != a:
        out.append(prev[out[-1]])
    return out[::-1]


def nonsimple_witness(g: WeightedDualGraph) -> Witness:
    """Certificate that a rational, non-obtainable graph is not simple."""
    _require_minimal_connected(g)
    if not is_rational(g):
        raise GraphError("graph is not rational")
    if obtainable_from_base(g):
        raise GraphError("graph is obtainable from a double or triple point")
    for v in g.vertices:
        if len(g.neighbors(v)) >= 4:
            return HighValencyStar(v)
    nodes = [v for v in g.vertices if len(g.neighbors(v)) == 3]
    if len(nodes) >= 2:
        best = None
        for i, a in enumerate(nodes):
            for b in nodes[i + 1:]:
                p = _path(g, a, b)
                if not any(u in nodes for u in p[1:-1]) and (best is None or len(p) < len(best)):
                    best = p
        assert best is not None
        return TwoTripleMerge(tuple(best))
    conf = find_confining_subgraph(g)
    if conf is None:
        raise GraphError("no confining subgraph found")
    return conf


def _z_criterion_fails(g: WeightedDualGraph) -> bool:
    z, _ = fundamental_cycle(g)
    s = contact(g, z.coeffs)
    return not any(c == 1 and x < 0 for c, x in zip(z.coeffs, s))


def _connected_subsets(g: WeightedDualGraph) -> Iterator[FrozenSet[int]]:
    """Every connected vertex subset once, smallest first."""
    n = len(g)
    nbrs = [{j for j, _ in g.adjacency[i]} for i in range(n)]
    layer = {frozenset([i]) for i in range(n)}
    while layer:
        for s in sorted(layer, key=sorted):
            yield s
        nxt = set()
        for s in layer:
            for j in set().union(*(nbrs[i] for i in s)) - s:
                nxt.add(s | {j})
        layer = nxt


def obstructing_subgraph(g: WeightedDualGraph) -> Optional[List[str]]:
    """Smallest connected subgraph on which no curve has ``z = 1`` and ``Z . E < 0``.

    Subgraphs of a sandwiched graph are sandwiched, so any such subgraph
    rules out a sandwich representation.
    """
    if not is_rational(g):
        raise GraphError("graph is not rational")
    for s in _connected_subsets(g):
        sub = subgraph(g, [g.vertices[i] for i in sorted(s)])
        if _z_criterion_fails(sub):
            return list(sub.vertices)
    return None


def sandwich_obstruction(g: WeightedDualGraph) -> bool:
    """True when ``g`` or one of its connected subgraphs has no curve with ``z = 1`` and ``Z . E < 0``."""
    return obstructing_subgraph(g) is not None


def classify(g: WeightedDualGraph) -> dict:
    """Everything the ``classify`` command reports, as a plain dict."""
    out: dict = {"vertices": len(g), "negative_definite": is_negative_definite(g)}
    if not out["negative_definite"]:
        raise GraphError("intersection form is not negative definite")
    rational = is_rational(g)
    out["rational"] = rational
    z, _ = fundamental_cycle(g)
    out["fundamental_cycle"] = z.as_dict()
    if rational:
        out["multiplicity"] = multiplicity(g)
    if not g.is_minimal():
        out["minimal"] = False
        return out
    out["minimal"] = True
    lt = laufer_type(g)
    out["laufer_type"] = lt.name
    out["rdp"] = is_rdp(g)
    out["rtp"] = is_rtp(g)
    if rational:
        ob = obtainable_from_base(g)
        out["obtainable"] = ob.base.value if ob.base else None
        out["base_weights"] = ob.weights or None
        out["simple"] = bool(ob)
        out["sandwich_obstruction"] = sandwich_obstruction(g)
        if not ob:
            w = nonsimple_witness(g)
            out["witness"] = {"kind": w.kind, **_witness_fields(w)}
    else:
        out["simple"] = False
    return out


def _witness_fields(w: Witness) -> dict:
    if isinstance(w, HighValencyStar):
        return {"vertex": w.vertex}
    if isinstance(w, TwoTripleMerge):
        return {"path": list(w.path)}
    return {"type": w.type, "slots": dict(w.slots)}
