"""Weighted dual graphs of exceptional configurations and their cycles.

A :class:`WeightedDualGraph` is a vertex-weighted multigraph: every vertex is a
smooth rational curve ``E_v`` with self-intersection ``w_v`` and edges carry
intersection numbers ``E_u . E_v``.  All arithmetic is over Python integers.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

__all__ = [
    "GraphError",
    "WeightedDualGraph",
    "Cycle",
    "vertex_key",
    "dot",
    "canonical_dot",
    "arithmetic_genus",
    "is_negative_definite",
    "leading_minors",
    "blow_up_smooth_point",
    "contract",
    "merge_chain",
    "subgraph",
    "valency",
    "ends",
    "connected_components",
    "canonical_form",
    "is_isomorphic",
]


class GraphError(ValueError):
    """Raised for malformed graphs or operations whose preconditions fail."""


_CHUNK = re.compile(r"(\d+)")


@lru_cache(maxsize=1 << 16)
def vertex_key(v: str) -> tuple:
    """Sort key for vertex ids: digit runs compare numerically (``v2 < v10``)."""
    parts = _CHUNK.split(v)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p != "")


EdgeSpec = Union[Mapping[Tuple[str, str], int], Iterable[Tuple[str, str]], Iterable[Tuple[str, str, int]]]


class WeightedDualGraph:
    """Immutable weighted multigraph carrying an intersection form.

    Vertices are kept in :func:`vertex_key` order; ``index(v)`` gives the
    position used by cycle coefficient vectors.
    """

    __slots__ = ("vertices", "weights", "_index", "_mult", "adjacency", "_hash", "_cache")

    def __init__(self, weights: Mapping[str, int], edges: EdgeSpec = (), genus: Optional[Mapping[str, int]] = None):
        if genus:
            bad = sorted((v for v, g in genus.items() if g), key=vertex_key)
            if bad:
                raise GraphError(f"positive genus vertices are not supported: {bad}")
        for v, w in weights.items():
            if not isinstance(v, str):
                raise GraphError(f"vertex id must be a string, got {v!r}")
            if isinstance(w, bool) or not isinstance(w, int):
                raise GraphError(f"weight of {v!r} must be an integer, got {w!r}")
        verts = tuple(sorted(weights, key=vertex_key))
        index = {v: i for i, v in enumerate(verts)}
        mult: Dict[Tuple[int, int], int] = {}
        items: Iterable
        if isinstance(edges, Mapping):
            items = ((a, b, m) for (a, b), m in edges.items())
        else:
            items = edges
        for e in items:
            if len(e) == 2:
                a, b, m = e[0], e[1], 1
            else:
                a, b, m = e
            if a not in index or b not in index:
                raise GraphError(f"edge ({a!r}, {b!r}) mentions an unknown vertex")
            if a == b:
                raise GraphError(f"self-loop at {a!r}")
            if isinstance(m, bool) or not isinstance(m, int) or m < 0:
                raise GraphError(f"edge ({a!r}, {b!r}) has invalid multiplicity {m!r}")
            i, j = sorted((index[a], index[b]))
            if m:
                mult[(i, j)] = mult.get((i, j), 0) + m
        adj: List[List[Tuple[int, int]]] = [[] for _ in verts]
        for (i, j), m in sorted(mult.items()):
            adj[i].append((j, m))
            adj[j].append((i, m))
        self.vertices: Tuple[str, ...] = verts
        self.weights: Tuple[int, ...] = tuple(weights[v] for v in verts)
        self._index = index
        self._mult = mult
        self.adjacency: Tuple[Tuple[Tuple[int, int], ...], ...] = tuple(tuple(a) for a in adj)
        self._hash: Optional[int] = None
        self._cache: dict = {}

    # -- construction helpers -------------------------------------------------
    @classmethod
    def chain(cls, weights: Sequence[int], prefix: str = "v") -> "WeightedDualGraph":
        ids = [f"{prefix}{i + 1}" for i in range(len(weights))]
        return cls(dict(zip(ids, weights)), list(zip(ids, ids[1:])))

    @classmethod
    def star(cls, center: int, arms: Sequence[Sequence[int]]) -> "WeightedDualGraph":
        """Star-shaped tree: ``arms[i]`` lists weights outward from the center ``c``."""
        w = {"c": center}
        edges = []
        for a, arm in enumerate(arms, start=1):
            prev = "c"
            for j, x in enumerate(arm, start=1):
                v = f"a{a}_{j}"
                w[v] = x
                edges.append((prev, v))
                prev = v
        return cls(w, edges)

    # -- basic accessors ------------------------------------------------------
    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: object) -> bool:
        return v in self._index

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def weight(self, v: str) -> int:
        return self.weights[self.index(v)]

    def weight_map(self) -> Dict[str, int]:
        return dict(zip(self.vertices, self.weights))

    def mult(self, u: str, v: str) -> int:
        i, j = self.index(u), self.index(v)
        if i == j:
            return self.weights[i]
        return self._mult.get((min(i, j), max(i, j)), 0)

    def edges(self) -> List[Tuple[str, str, int]]:
        vs = self.vertices
        return [(vs[i], vs[j], m) for (i, j), m in sorted(self._mult.items())]

    def neighbors(self, v: str) -> List[str]:
        return [self.vertices[j] for j, _ in self.adjacency[self.index(v)]]

    def intersection_matrix(self) -> List[List[int]]:
        n = len(self.vertices)
        m = [[0] * n for _ in range(n)]
        for i, w in enumerate(self.weights):
            m[i][i] = w
        for (i, j), k in self._mult.items():
            m[i][j] = m[j][i] = k
        return m

    def edge_count(self) -> int:
        return sum(self._mult.values())

    def is_minimal(self) -> bool:
        return all(w <= -2 for w in self.weights)

    def is_connected(self) -> bool:
        hit = self._cache.get("connected")
        if hit is None:
            hit = self._cache["connected"] = len(connected_components(self)) <= 1
        return hit

    def is_tree(self) -> bool:
        n = len(self.vertices)
        return n > 0 and self.edge_count() == n - 1 and self.is_connected()

    def is_chain(self) -> bool:
        return self.is_tree() and all(len(a) <= 2 for a in self.adjacency)

    def with_weights(self, weights: Mapping[str, int]) -> "WeightedDualGraph":
        w = self.weight_map()
        for v, x in weights.items():
            self.index(v)
            w[v] = x
        return WeightedDualGraph(w, self.edges())

    def relabel(self, mapping: Mapping[str, str]) -> "WeightedDualGraph":
        w = {mapping.get(v, v): x for v, x in self.weight_map().items()}
        if len(w) != len(self.vertices):
            raise GraphError("relabeling is not injective")
        return WeightedDualGraph(w, [(mapping.get(a, a), mapping.get(b, b), m) for a, b, m in self.edges()])

    def cycle(self, coeffs: Union[Mapping[str, int], Sequence[int], None] = None) -> "Cycle":
        return Cycle.of(self, coeffs)

    def basis(self, v: str) -> "Cycle":
        c = [0] * len(self.vertices)
        c[self.index(v)] = 1
        return Cycle(self, tuple(c))

    def reduced_cycle(self) -> "Cycle":
        return Cycle(self, (1,) * len(self.vertices))

    def fresh_id(self, stem: str = "x") -> str:
        k = 1
        while f"{stem}{k}" in self._index:
            k += 1
        return f"{stem}{k}"

    # -- equality -------------------------------------------------------------
    def _key(self):
        return (self.vertices, self.weights, tuple(sorted(self._mult.items())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedDualGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{v}:{w}" for v, w in zip(self.vertices, self.weights))
        es = ", ".join(f"{a}-{b}" + (f"x{m}" if m != 1 else "") for a, b, m in self.edges())
        return f"WeightedDualGraph({body}; {es})"


@dataclass(frozen=True)
class Cycle:
    """Non-negative integer combination of the vertices of ``graph``."""

    graph: WeightedDualGraph
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.graph.vertices):
            raise GraphError("coefficient vector does not match the graph")
        if any(c < 0 for c in self.coeffs):
            raise GraphError("cycles have non-negative coefficients")

    @classmethod
    def of(cls, graph: WeightedDualGraph, coeffs=None) -> "Cycle":
        if coeffs is None:
            return cls(graph, (0,) * len(graph.vertices))
        if isinstance(coeffs, Mapping):
            c = [0] * len(graph.vertices)
            for v, x in coeffs.items():
                c[graph.index(v)] = int(x)
            return cls(graph, tuple(c))
        return cls(graph, tuple(int(x) for x in coeffs))

    def __getitem__(self, v: str) -> int:
        return self.coeffs[self.graph.index(v)]

    def as_dict(self, nonzero: bool = False) -> Dict[str, int]:
        return {v: c for v, c in zip(self.graph.vertices, self.coeffs) if c or not nonzero}

    def support(self) -> List[str]:
        return [v for v, c in zip(self.graph.vertices, self.coeffs) if c > 0]

    def is_positive(self) -> bool:
        return any(self.coeffs)

    def reduction(self) -> "Cycle":
        return Cycle(self.graph, tuple(min(c, 1) for c in self.coeffs))

    def is_reduced(self) -> bool:
        return all(c <= 1 for c in self.coeffs)

    def _same(self, other: "Cycle") -> None:
        if other.graph is not self.graph and other.graph != self.graph:
            raise GraphError("cycles live on different graphs")

    def __add__(self, other: "Cycle") -> "Cycle":
        self._same(other)
        return Cycle(self.graph, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Cycle") -> "Cycle":
        self._same(other)
        return Cycle(self.graph, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rmul__(self, k: int) -> "Cycle":
        return Cycle(self.graph, tuple(k * a for a in self.coeffs))

    def __le__(self, other: "Cycle") -> bool:
        self._same(other)
        return all(a <= b for a, b in zip(self.coeffs, other.coeffs))

    def __lt__(self, other: "Cycle") -> bool:
        return self <= other and self.coeffs != other.coeffs

    def __repr__(self) -> str:
        return "Cycle(" + ", ".join(f"{v}:{c}" for v, c in self.as_dict(nonzero=True).items()) + ")"


# -- intersection theory -------------------------------------------------------

def _dot_vec(g: WeightedDualGraph, c: Sequence[int], d: Sequence[int]) -> int:
    total = 0
    for i, ci in enumerate(c):
        if not ci:
            continue
        s = g.weights[i] * d[i]
        for j, m in g.adjacency[i]:
            s += m * d[j]
        total += ci * s
    return total


def dot(g: WeightedDualGraph, c: Cycle, d: Cycle) -> int:
    """Intersection number ``C . D``."""
    if c.graph != g or d.graph != g:
        raise GraphError("cycle does not belong to the graph")
    return _dot_vec(g, c.coeffs, d.coeffs)


def canonical_dot(g: WeightedDualGraph, d: Cycle) -> int:
    """``K . D`` from adjunction on rational curves: ``K . E_v = -w_v - 2``."""
    if d.graph != g:
        raise GraphError("cycle does not belong to the graph")
    return sum(c * (-w - 2) for c, w in zip(d.coeffs, g.weights))


def arithmetic_genus(g: WeightedDualGraph, d: Cycle) -> int:
    """``p_a(D) = 1 + D.(D+K)/2`` for a positive cycle."""
    if not d.is_positive():
        raise GraphError("arithmetic genus needs a positive cycle")
    twice = _dot_vec(g, d.coeffs, d.coeffs) + canonical_dot(g, d)
    assert twice % 2 == 0, "D.(D+K) must be even"
    return 1 + twice // 2


def leading_minors(matrix: Sequence[Sequence[int]]) -> List[int]:
    """Leading principal minors via fraction-free (Bareiss) elimination.

    Elimination stops at the first vanishing pivot; the minors computed so far
    are returned, followed by that zero.
    """
    a = [list(r) for r in matrix]
    n = len(a)
    minors: List[int] = []
    prev = 1
    for k in range(n):
        piv = a[k][k]
        minors.append(piv)
        if piv == 0:
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * piv - a[i][k] * a[k][j]) // prev
        prev = piv
    return minors


def is_negative_definite(g: WeightedDualGraph) -> bool:
    """Sylvester's criterion on ``-I`` in exact integer arithmetic."""
    hit = g._cache.get("negdef")
    if hit is not None:
        return hit
    if any(w >= 0 for w in g.weights):
        result = False
    else:
        neg = [[-x for x in row] for row in g.intersection_matrix()]
        minors = leading_minors(neg)
        result = len(minors) == len(g.vertices) and all(m > 0 for m in minors)
    g._cache["negdef"] = result
    return result


# -- surgery -------------------------------------------------------------------

def blow_up_smooth_point(g: WeightedDualGraph, v: str, new_id: Optional[str] = None) -> WeightedDualGraph:
    """Blow up a point of ``E_v`` lying on no other curve."""
    g.index(v)
    new = new_id or g.fresh_id("b")
    if new in g:
        raise GraphError(f"vertex id {new!r} already in use")
    w = g.weight_map()
    w[v] -= 1
    w[new] = -1
    return WeightedDualGraph(w, g.edges() + [(v, new, 1)])


def contract(g: WeightedDualGraph, v: str) -> WeightedDualGraph:
    """Contract the (-1)-curve ``E_v``."""
    i = g.index(v)
    if g.weights[i] != -1:
        raise GraphError(f"vertex {v!r} has weight {g.weights[i]}, only (-1)-curves contract")
    nb = [(g.vertices[j], m) for j, m in g.adjacency[i]]
    w = g.weight_map()
    del w[v]
    for u, m in nb:
        w[u] += m * m
    mult: Dict[Tuple[str, str], int] = {}
    for a, b, m in g.edges():
        if v not in (a, b):
            mult[(a, b)] = m
    for x in range(len(nb)):
        for y in range(x + 1, len(nb)):
            (u1, m1), (u2, m2) = nb[x], nb[y]
            key = (u1, u2) if vertex_key(u1) <= vertex_key(u2) else (u2, u1)
            mult[key] = mult.get(key, 0) + m1 * m2
    return WeightedDualGraph(w, mult)


def subgraph(g: WeightedDualGraph, vertices: Iterable[str]) -> WeightedDualGraph:
    """Induced subgraph."""
    keep = set(vertices)
    for v in keep:
        g.index(v)
    w = {v: x for v, x in g.weight_map().items() if v in keep}
    return WeightedDualGraph(w, [(a, b, m) for a, b, m in g.edges() if a in keep and b in keep])


def valency(g: WeightedDualGraph, v: str) -> int:
    """Number of intersection points on ``E_v`` (edges counted with multiplicity)."""
    return sum(m for _, m in g.adjacency[g.index(v)])


def ends(g: WeightedDualGraph) -> int:
    """Number of valency-one vertices."""
    return sum(1 for v in g.vertices if valency(g, v) == 1)


def connected_components(g: WeightedDualGraph) -> List[List[str]]:
    seen = [False] * len(g.vertices)
    comps = []
    for s in range(len(g.vertices)):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(g.vertices[i])
            for j, _ in g.adjacency[i]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
        comp.sort(key=vertex_key)
        comps.append(comp)
    return comps


def merge_chain(g: WeightedDualGraph, path: Sequence[str], new_id: Optional[str] = None) -> WeightedDualGraph:
    """Replace the chain ``path`` by one curve with self-intersection ``(sum E)^2``.

    This smooths the double points of the exceptional divisor along the chain.
    """
    if not path:
        raise GraphError("empty path")
    if len(set(path)) != len(path):
        raise GraphError("path repeats a vertex")
    for a, b in zip(path, path[1:]):
        if g.mult(a, b) != 1:
            raise GraphError(f"{a!r} and {b!r} are not joined by a single edge")
    inside = set(path)
    for k, v in enumerate(path):
        within = sum(1 for u in g.neighbors(v) if u in inside)
        expected = (1 if k in (0, len(path) - 1) else 2) if len(path) > 1 else 0
        if within != expected:
            raise GraphError(f"{path!r} is not a chain")
    merged = new_id or path[0]
    if merged in g and merged not in inside:
        raise GraphError(f"vertex id {merged!r} already in use")
    w = {v: x for v, x in g.weight_map().items() if v not in inside}
    w[merged] = sum(g.weight(v) for v in path) + 2 * (len(path) - 1)
    mult: Dict[Tuple[str, str], int] = {}
    for a, b, m in g.edges():
        if a in inside and b in inside:
            continue
        a2 = merged if a in inside else a
        b2 = merged if b in inside else b
        key = (a2, b2) if vertex_key(a2) <= vertex_key(b2) else (b2, a2)
        mult[key] = mult.get(key, 0) + m
    return WeightedDualGraph(w, mult)


# -- isomorphism ---------------------------------------------------------------

def _tree_centers(g: WeightedDualGraph) -> List[int]:
    n = len(g.vertices)
    if n <= 2:
        return list(range(n))
    deg = [len(a) for a in g.adjacency]
    layer = [i for i in range(n) if deg[i] <= 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for i in layer:
            for j, _ in g.adjacency[i]:
                deg[j] -= 1
                if deg[j] == 1:
                    nxt.append(j)
        layer = nxt
    return layer


def _rooted_code(g: WeightedDualGraph, root: int, parent: int) -> tuple:
    kids = sorted(_rooted_code(g, j, root) for j, _ in g.adjacency[root] if j != parent)
    return (g.weights[root], tuple(kids))


MAX_EXHAUSTIVE = 16


def canonical_form(g: WeightedDualGraph) -> tuple:
    """Hashable isomorphism invariant that is complete (a canonical form).

    Trees use the rooted-center encoding; other graphs fall back to an
    exhaustive search over refinement-compatible orderings (at most
    ``MAX_EXHAUSTIVE`` vertices).
    """
    hit = g._cache.get("canon")
    if hit is not None:
        return hit
    n = len(g.vertices)
    if n == 0:
        code: tuple = ("empty",)
    elif g.is_tree():
        codes = [_rooted_code(g, c, -1) for c in _tree_centers(g)]
        if len(codes) == 2:
            # the two centers are adjacent; root at the edge
            a, b = _tree_centers(g)
            ca = _rooted_code(g, a, b)
            cb = _rooted_code(g, b, a)
            code = ("tree2",) + tuple(sorted((ca, cb)))
        else:
            code = ("tree1", codes[0])
    else:
        code = ("graph",) + _exhaustive_code(g)
    g._cache["canon"] = code
    return code


def _exhaustive_code(g: WeightedDualGraph) -> tuple:
    n = len(g.vertices)
    if n > MAX_EXHAUSTIVE:
        raise GraphError(f"exhaustive isomorphism limited to {MAX_EXHAUSTIVE} vertices, got {n}")
    mat = g.intersection_matrix()
    # colour refinement gives an ordered partition; only orderings that respect
    # it are searched
    colour = [(mat[i][i], tuple(sorted(m for _, m in g.adjacency[i]))) for i in range(n)]
    while True:
        sig = [(colour[i], tuple(sorted((colour[j], m) for j, m in g.adjacency[i]))) for i in range(n)]
        ranks = {s: k for k, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        old_classes = len(set(colour))
        colour = new  # type: ignore[assignment]
        if len(set(new)) == old_classes:
            break
    cells: Dict[int, List[int]] = {}
    for i, c in enumerate(colour):
        cells.setdefault(c, []).append(i)
    ordered = [cells[c] for c in sorted(cells)]
    best: Optional[tuple] = None

    def rec(k: int, order: List[int]) -> None:
        nonlocal best
        if k == len(ordered):
            code = tuple(tuple(mat[i][j] for j in order) for i in order)
            if best is None or code < best:
                best = code
            return
        for perm in permutations(ordered[k]):
            rec(k + 1, order + list(perm))

    rec(0, [])
    assert best is not None
    return (tuple(sorted(colour)),) + best


def is_isomorphic(g: WeightedDualGraph, h: WeightedDualGraph) -> bool:
    return len(g) == len(h) and canonical_form(g) == canonical_form(h)


def iter_vertices(g: WeightedDualGraph) -> Iterator[Tuple[str, int]]:
    return iter(zip(g.vertices, g.weights))
