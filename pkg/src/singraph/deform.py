"""Positive-root collections and deformations on the Artin component.

A collection ``D_1, ..., D_m`` of positive roots with almost reduced sum
describes a one-parameter deformation of the resolution whose general fibre
has exceptional curves homologous to the ``D_i``.  The graph of the general
fibre has weights ``D_i^2`` and edges ``D_i . D_j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .classify import ConfiningSubgraph, find_confining_subgraph
from .cycles import (
    EnumerationTooLarge,
    fundamental_cycle,
    is_almost_reduced,
    is_rational,
    max_box,
    positive_roots,
)
from .graph_core import (
    Cycle,
    GraphError,
    WeightedDualGraph,
    _dot_vec,
    arithmetic_genus,
    canonical_form,
    connected_components,
    is_negative_definite,
    subgraph,
)

__all__ = [
    "RootCollection",
    "Adjacency",
    "RootLift",
    "roots_below",
    "is_integrally_minimal",
    "collection_graph",
    "star_deformation",
    "star_formulas",
    "adjacencies",
    "enumerate_adjacencies",
    "lift_roots",
]


@dataclass(frozen=True)
class RootCollection:
    """Distinct positive roots on one graph with almost reduced sum.

    ``names`` label the vertices of :func:`collection_graph`; they default to
    ``D1 .. Dm``.
    """

    graph: WeightedDualGraph
    roots: Tuple[Cycle, ...]
    names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        g = self.graph
        roots = tuple(self.roots)
        object.__setattr__(self, "roots", roots)
        if not self.names:
            object.__setattr__(self, "names", tuple(f"D{i + 1}" for i in range(len(roots))))
        if len(self.names) != len(roots) or len(set(self.names)) != len(roots):
            raise GraphError("collection names must be distinct, one per root")
        seen = set()
        for d in roots:
            if d.graph != g:
                raise GraphError("all cycles of a collection must live on the same graph")
            if not d.is_positive() or arithmetic_genus(g, d) != 0:
                raise GraphError(f"{d} is not a positive root")
            if d.coeffs in seen:
                raise GraphError(f"{d} occurs twice in the collection")
            seen.add(d.coeffs)
        if not is_almost_reduced(g, self.total()):
            raise GraphError("the sum of the collection is not almost reduced")
        for i in range(len(roots)):
            for j in range(i + 1, len(roots)):
                if _dot_vec(g, roots[i].coeffs, roots[j].coeffs) < 0:
                    raise GraphError(f"{self.names[i]} . {self.names[j]} is negative")

    def __len__(self) -> int:
        return len(self.roots)

    def total(self) -> Cycle:
        out = self.graph.cycle()
        for d in self.roots:
            out = out + d
        return out

    def named(self) -> Dict[str, Cycle]:
        return dict(zip(self.names, self.roots))


def roots_below(g: WeightedDualGraph, d: Cycle) -> List[Cycle]:
    """Positive roots ``0 < C <= D`` by enumeration of the box ``[0, D]``."""
    box = 1
    for c in d.coeffs:
        box *= c + 1
    if box > max_box():
        raise EnumerationTooLarge(f"root box has {box} candidates")
    kd = [-w - 2 for w in g.weights]
    out = []
    for coeffs in product(*(range(c + 1) for c in d.coeffs)):
        if not any(coeffs):
            continue
        if _dot_vec(g, coeffs, coeffs) + sum(a * b for a, b in zip(coeffs, kd)) == -2:
            out.append(Cycle(g, tuple(coeffs)))
    return out


def _decomposition_sets(target: Tuple[int, ...], pool: Sequence[Tuple[int, ...]], cap: int) -> List[frozenset]:
    """Inclusion-minimal sets of ``pool`` indices whose monoid contains ``target``.

    Sets with more than ``cap`` elements are dropped.
    """
    memo: Dict[Tuple[int, ...], List[frozenset]] = {}

    def rec(rest: Tuple[int, ...]) -> List[frozenset]:
        if not any(rest):
            return [frozenset()]
        hit = memo.get(rest)
        if hit is not None:
            return hit
        cands = set()
        for k, r in enumerate(pool):
            if all(a <= b for a, b in zip(r, rest)):
                smaller = tuple(b - a for a, b in zip(r, rest))
                for tail in rec(smaller):
                    s = tail | {k}
                    if len(s) <= cap:
                        cands.add(s)
        out: List[frozenset] = []
        for c in sorted(cands, key=lambda s: (len(s), sorted(s))):
            if not any(o <= c for o in out):
                out.append(c)
        memo[rest] = out
        return out

    return rec(tuple(target))


def _generated_elsewhere(own: Sequence[int], options: Sequence[Sequence[frozenset]]) -> bool:
    """Whether one decomposition per member uses at most ``m`` roots other than ``own``."""
    m = len(own)
    target = frozenset(own)
    dead = set()

    def search(i: int, used: frozenset) -> bool:
        if len(used) > m:
            return False
        if i == m:
            return used != target
        if (i, used) in dead:
            return False
        for dec in options[i]:
            if search(i + 1, used | dec):
                return True
        dead.add((i, used))
        return False

    return search(0, frozenset())


class _Span:
    """Integer row echelon form used to test membership in a rational span."""

    def __init__(self, rows: Iterable[Sequence[int]]):
        self.rows: List[Tuple[int, List[int]]] = []
        for r in rows:
            self.add(r)

    def reduce(self, vec: Sequence[int]) -> List[int]:
        v = list(vec)
        for piv, row in self.rows:
            x = v[piv]
            if x:
                p = row[piv]
                v = [a * p - x * b for a, b in zip(v, row)]
                g = 0
                for a in v:
                    g = gcd(g, a)
                if g > 1:
                    v = [a // g for a in v]
        return v

    def add(self, vec: Sequence[int]) -> bool:
        v = self.reduce(vec)
        for i, x in enumerate(v):
            if x:
                self.rows.append((i, v))
                return True
        return False

    def contains(self, vec: Sequence[int]) -> bool:
        return not any(self.reduce(vec))


def _minimality_pool(members: Sequence[Tuple[int, ...]], candidates: Iterable[Tuple[int, ...]], below: bool = False) -> List[Tuple[int, ...]]:
    """Roots that could take part in another generating set of the same size.

    Members of a collection are linearly independent (their Gram matrix is
    negative definite), so ``m`` generators must span the same space and each
    lies below some member.
    """
    span = _Span(members)
    out = []
    for c in candidates:
        if (below or any(all(a <= b for a, b in zip(c, d)) for d in members)) and span.contains(c):
            out.append(c)
    return out


def _is_minimal(members: Sequence[Tuple[int, ...]], candidates: Iterable[Tuple[int, ...]], below: bool = False) -> bool:
    pool = _minimality_pool(members, candidates, below)
    if len(pool) == len(members):
        # nothing but the members themselves can take part
        return True
    index = {c: k for k, c in enumerate(pool)}
    own = [index[d] for d in members]
    options = [_decomposition_sets(d, pool, len(members)) for d in members]
    return not _generated_elsewhere(own, options)


def is_integrally_minimal(col: RootCollection) -> bool:
    """No other ``m`` positive roots generate every ``D_i`` over the non-negative integers.

    Each ``D_i`` is written in all possible ways as a sum of roots below it;
    the collection fails exactly when one choice per ``D_i`` uses at most
    ``m`` distinct roots in total and those roots are not the ``D_i``
    themselves.  Fewer than ``m`` generators can always be padded.
    """
    g = col.graph
    if len(col) == 0:
        return True
    members = [d.coeffs for d in col.roots]
    cands = [c.coeffs for c in roots_below(g, col.total())]
    if not is_negative_definite(g) or len(_Span(members).rows) < len(members):
        # no independence shortcut available
        index = {c: k for k, c in enumerate(cands)}
        options = [_decomposition_sets(d, cands, len(members)) for d in members]
        return not _generated_elsewhere([index[d] for d in members], options)
    return _is_minimal(members, cands)


def collection_graph(col: RootCollection) -> WeightedDualGraph:
    """The graph of the general fibre: weights ``D_i^2``, edges ``D_i . D_j``."""
    g = col.graph
    w = {}
    edges = []
    for name, d in zip(col.names, col.roots):
        self_int = _dot_vec(g, d.coeffs, d.coeffs)
        if self_int > -1:
            raise GraphError(f"{name}^2 = {self_int} is not negative")
        w[name] = self_int
    for i in range(len(col)):
        for j in range(i + 1, len(col)):
            k = _dot_vec(g, col.roots[i].coeffs, col.roots[j].coeffs)
            if k:
                edges.append((col.names[i], col.names[j], k))
    out = WeightedDualGraph(w, edges)
    if len(out) and not is_negative_definite(out):
        raise GraphError("collection graph is not negative definite")
    return out


# -- the explicit star deformations -----------------------------------------

_STAR_CYCLES: Dict[str, List[Dict[str, int]]] = {
    "E6~": [
        {"E0": 1, "E1,1": 1, "E2,1": 1, "E3,1": 1},
        {"E1,2": 1},
        {"E2,2": 1},
        {"E3,2": 1},
        {"E0": 1},
    ],
    "E7~": [
        {"E1,1": 1, "E2,2": 1, "E2,1": 1, "E0": 1, "E3,1": 1, "E3,2": 1},
        {"E0": 1, "E2,1": 1},
        {"E0": 1, "E3,1": 1},
        {"E2,3": 1},
        {"E3,3": 1},
    ],
    "E8~": [
        {"E2,2": 1, "E2,1": 1, "E0": 1, "E3,1": 1, "E3,2": 1, "E3,3": 1, "E3,4": 1},
        {"E1,1": 1, "E0": 1, "E2,1": 1},
        {"E1,1": 1, "E0": 1, "E3,1": 1, "E3,2": 1, "E3,3": 1},
        {"E1,1": 1, "E2,1": 1, "E0": 2, "E3,1": 2, "E3,2": 1},
        {"E3,5": 1},
    ],
}


def star_formulas(kind: str, b: Mapping[str, int]) -> List[int]:
    """Self-intersections ``D_0^2 .. D_4^2`` as closed formulas in ``b_{i,j} = -E_{i,j}^2``."""
    if kind == "E6~":
        return [-(b["E1,1"] + b["E2,1"] + b["E3,1"] - 4), -b["E1,2"], -b["E2,2"], -b["E3,2"], -2]
    if kind == "E7~":
        return [-(b["E1,1"] + b["E2,2"] + b["E3,2"] - 4), -2, -2, -b["E2,3"], -b["E3,3"]]
    if kind == "E8~":
        return [-(b["E2,2"] + b["E3,4"] - 2), -2, -2, -2, -b["E3,5"]]
    raise GraphError(f"unknown confining type {kind!r}")


def star_deformation(g: WeightedDualGraph, witness: Optional[ConfiningSubgraph] = None) -> RootCollection:
    """Collection ``D_0 .. D_4`` whose graph is a star centred at ``D_0``.

    The cycles are placed on the slots of the ~E_k subgraph found by the
    classifier.  The star incidences and the closed weight formulas are
    checked before returning.
    """
    if witness is None:
        witness = find_confining_subgraph(g)
    if witness is None:
        raise GraphError("graph has no ~E6/~E7/~E8 subgraph of the confining shape")
    slots = witness.slots
    roots = []
    for spec in _STAR_CYCLES[witness.type]:
        coeffs = {slots[s]: k for s, k in spec.items()}
        roots.append(g.cycle(coeffs))
    col = RootCollection(g, tuple(roots), tuple(f"D{i}" for i in range(5)))
    for i in range(5):
        for j in range(i + 1, 5):
            k = _dot_vec(g, roots[i].coeffs, roots[j].coeffs)
            want = 1 if i == 0 else 0
            if k != want:
                raise AssertionError(f"D{i} . D{j} = {k}, expected {want}")
    b = {s: -g.weight(v) for s, v in slots.items()}
    expected = star_formulas(witness.type, b)
    got = [_dot_vec(g, d.coeffs, d.coeffs) for d in roots]
    if got != expected:
        raise AssertionError(f"self-intersections {got} differ from {expected}")
    return col


# -- adjacencies -------------------------------------------------------------

@dataclass(frozen=True)
class Adjacency:
    """One singularity of a general fibre together with the roots producing it."""

    graph: WeightedDualGraph
    roots: Tuple[Cycle, ...]


def _key(g: WeightedDualGraph) -> tuple:
    return (len(g), repr(canonical_form(g)))


def adjacencies(g: WeightedDualGraph, max_m: Optional[int] = None) -> List[Adjacency]:
    """Adjacencies on the Artin component coming from integrally minimal collections.

    Collections consist of distinct positive roots, pairwise ``D_i . D_j >= 0``,
    with ``sum D_i <= Z`` almost reduced.  Each connected component of the
    collection graph must have a positive root as its sum; components are
    reported separately.  The empty collection gives the smooth fibre.
    """
    if not is_rational(g):
        raise GraphError("graph is not rational")
    if max_m is None:
        max_m = len(g)
    z = fundamental_cycle(g)[0].coeffs
    roots = [r.coeffs for r in positive_roots(g)]
    big = [w < -2 for w in g.weights]
    n = len(roots)
    dots = [[_dot_vec(g, roots[i], roots[j]) for j in range(n)] for i in range(n)]
    under = [{j for j in range(n) if all(a <= b for a, b in zip(roots[j], roots[i]))} for i in range(n)]
    kd = [-w - 2 for w in g.weights]
    budget = max_box()
    found: Dict[tuple, Adjacency] = {}
    visited = [0]


    def genus_zero(vec: Sequence[int]) -> bool:
        return _dot_vec(g, vec, vec) + sum(a * b for a, b in zip(vec, kd)) == -2

    # collection graphs seen so far, keyed by their intersection matrix in
    # collection order; saves rebuilding and canonicalizing repeated shapes
    seen_matrix: Dict[tuple, tuple] = {}

    def components(chosen: List[int]) -> List[List[int]]:
        left = list(chosen)
        comps = []
        while left:
            comp = [left.pop(0)]
            for a in comp:
                for b in [b for b in left if dots[a][b]]:
                    left.remove(b)
                    comp.append(b)
            comps.append(sorted(comp))
        return comps

    def record(chosen: List[int]) -> None:
        if not chosen:
            smooth = WeightedDualGraph({})
            found.setdefault(_key(smooth), Adjacency(smooth, ()))
            return
        comps = components(chosen)
        for comp in comps:
            total = [0] * len(g)
            for k in comp:
                for i, c in enumerate(roots[k]):
                    total[i] += c
            if not genus_zero(total):
                return
        for comp in comps:
            mat = tuple(dots[a][b] for a in comp for b in comp)
            key = seen_matrix.get(mat)
            if key is not None:
                continue
            names = [f"D{i + 1}" for i in range(len(comp))]
            w = {nm: dots[k][k] for nm, k in zip(names, comp)}
            edges = [(names[a], names[b], dots[comp[a]][comp[b]])
                     for a in range(len(comp)) for b in range(a + 1, len(comp)) if dots[comp[a]][comp[b]]]
            sub = WeightedDualGraph(w, edges)
            key = seen_matrix[mat] = _key(sub)
            if key not in found:
                if not is_negative_definite(sub):
                    raise AssertionError("collection graph is not negative definite")
                found[key] = Adjacency(sub, tuple(Cycle(g, roots[k]) for k in comp))

    def extend(chosen: List[int], total: List[int], start: int) -> None:
        visited[0] += 1
        if visited[0] > budget:
            raise EnumerationTooLarge(f"more than {budget} root collections")
        record(chosen)
        if len(chosen) == max_m:
            return
        for k in range(start, n):
            r = roots[k]
            new = [a + b for a, b in zip(total, r)]
            if any(x > y for x, y in zip(new, z)):
                continue
            if any(x > 1 and b for x, b in zip(new, big)):
                continue
            if any(dots[k][j] < 0 for j in chosen):
                continue
            chosen.append(k)
            # a collection that is not integrally minimal has no minimal extension
            cands = sorted(set().union(*(under[i] for i in chosen)))
            if _is_minimal([roots[i] for i in chosen], [roots[i] for i in cands], below=True):
                extend(chosen, new, k + 1)
            chosen.pop()

    extend([], [0] * len(g), 0)
    return [found[k] for k in sorted(found)]


def enumerate_adjacencies(g: WeightedDualGraph, max_m: Optional[int] = None) -> List[WeightedDualGraph]:
    """Distinct graphs (up to isomorphism) reached by :func:`adjacencies`; the empty graph is smooth."""
    return [a.graph for a in adjacencies(g, max_m)]


# -- root lifting --------------------------------------------------------------

@dataclass(frozen=True)
class RootLift:
    """Outcome of comparing roots of a deepened graph with those of its base."""

    pairs: Tuple[Tuple[Cycle, Cycle], ...]
    deep_only: Tuple[Cycle, ...]
    base_only: Tuple[Cycle, ...]
    deepened: Tuple[str, ...]

    @property
    def is_bijection(self) -> bool:
        return not self.deep_only and not self.base_only


def lift_roots(deep: WeightedDualGraph, base: WeightedDualGraph, vertex_map: Optional[Mapping[str, str]] = None) -> RootLift:
    """Match roots of ``deep`` with roots of ``base`` having coefficient ``<= 1`` on deepened curves.

    ``vertex_map`` sends vertices of ``deep`` to vertices of ``base``
    (identity by default).  Both graphs must have the same edges and the
    weights of ``deep`` must be at most those of ``base``.
    """
    if vertex_map is None:
        vertex_map = {v: v for v in deep.vertices}
    if sorted(vertex_map) != sorted(deep.vertices) or sorted(vertex_map.values()) != sorted(base.vertices):
        raise GraphError("vertex map is not a bijection between the two graphs")
    moved = deep.relabel(dict(vertex_map))
    if sorted(moved.edges()) != sorted(base.edges()):
        raise GraphError("graphs do not have the same underlying edges")
    deepened = []
    for v in base.vertices:
        if moved.weight(v) > base.weight(v):
            raise GraphError(f"weight of {v} is larger on the deep graph")
        if moved.weight(v) < base.weight(v):
            deepened.append(v)
    idx = [base.index(v) for v in deepened]
    wanted = {d.coeffs: d for d in positive_roots(base) if all(d.coeffs[i] <= 1 for i in idx)}
    pairs = []
    deep_only = []
    order = [moved.index(v) for v in base.vertices]
    for d in positive_roots(moved):
        key = tuple(d.coeffs[i] for i in order)
        hit = wanted.pop(key, None)
        original = Cycle(deep, tuple(d.coeffs[moved.index(vertex_map[v])] for v in deep.vertices))
        if hit is None:
            deep_only.append(original)
        else:
            pairs.append((original, hit))
    return RootLift(tuple(pairs), tuple(deep_only), tuple(wanted.values()), tuple(deepened))
