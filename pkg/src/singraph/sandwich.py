"""Sandwiched singularities through decorated plane curves.

A cluster of infinitely near points is stored as an ordered list of points,
each with its parent and the set of earlier points it is proximate to.  With
the proximity matrix ``P`` (``P_pp = 1``, ``P_qp = -1`` when ``q`` is proximate
to ``p``) the strict transforms of the exceptional curves intersect as
``-P^T P``, and a branch given as a curvette of the point ``a`` has
multiplicities ``m`` solving ``P^T m = e_a``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .classify import sandwich_obstruction
from .cycles import fundamental_cycle, contact, is_rational, multiplicity
from .graph_core import (
    GraphError,
    WeightedDualGraph,
    connected_components,
    contract,
    ends,
    subgraph,
    valency,
    vertex_key,
)

__all__ = [
    "NotBlowdownable",
    "UnsupportedCurve",
    "SandwichUnknown",
    "ClusterPoint",
    "Branch",
    "DecoratedCurve",
    "AugmentedGraph",
    "ProximityMatrix",
    "Candidate",
    "attach_arrows",
    "proximity_factorize",
    "decorated_curve_of",
    "graph_of",
    "is_sandwiched",
    "smooth_curve",
    "monomial_curve",
    "recipe_iii3",
    "recipe_iii4",
    "germ_type",
    "delta_const_candidates",
    "candidate_germs",
    "a_series_types",
    "min_property",
    "ends_bound",
    "E8_PROFILES",
    "e8_resolution_profiles",
]


class NotBlowdownable(GraphError):
    """The configuration is not the exceptional divisor of point blow-ups."""


class UnsupportedCurve(GraphError):
    """Branch types outside the implemented deformation rules."""


class SandwichUnknown(GraphError):
    """The bounded search failed but a larger arrow budget might succeed."""


# -- clusters and decorated curves -----------------------------------------------

@dataclass(frozen=True)
class ClusterPoint:
    id: int
    parent: Optional[int]
    proximate_to: Tuple[int, ...] = ()

    def __post_init__(self):
        # stored without the parent, which every point is proximate to anyway
        object.__setattr__(self, "proximate_to", tuple(sorted(set(self.proximate_to) - {self.parent})))

    def proximities(self) -> Tuple[int, ...]:
        """All points this one is proximate to, the parent included."""
        s = set(self.proximate_to)
        if self.parent is not None:
            s.add(self.parent)
        return tuple(sorted(s))


@dataclass(frozen=True)
class Branch:
    """A curvette of the point ``attach`` carrying the decoration ``l``."""

    attach: Optional[int]
    l: int


@dataclass(frozen=True)
class DecoratedCurve:
    """Plane curve germ given by its cluster and curvette branches, with decorations."""

    points: Tuple[ClusterPoint, ...]
    branches: Tuple[Branch, ...]
    labels: Tuple[Tuple[int, str], ...] = field(default=(), compare=False)
    _memo: dict = field(default_factory=dict, init=False, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "branches", tuple(self.branches))
        object.__setattr__(self, "labels", tuple(self.labels))
        _validate(self)

    @property
    def ids(self) -> List[int]:
        return [p.id for p in self.points]

    def position(self) -> Dict[int, int]:
        return {p.id: k for k, p in enumerate(self.points)}

    def proximity_matrix(self) -> List[List[int]]:
        pos = self.position()
        n = len(self.points)
        mat = [[0] * n for _ in range(n)]
        for k, p in enumerate(self.points):
            mat[k][k] = 1
            for q in p.proximities():
                mat[k][pos[q]] = -1
        return mat

    def multiplicities(self, i: int) -> List[int]:
        """Multiplicity vector of branch ``i`` over the points, in order."""
        key = ("mult", i)
        if key not in self._memo:
            self._memo[key] = _curvette(self.points, self.branches[i].attach)
        return list(self._memo[key])

    def intersection(self, i: int, j: int) -> int:
        """``C_i . C_j`` by Noether's formula."""
        a, b = self.multiplicities(i), self.multiplicities(j)
        return sum(x * y for x, y in zip(a, b))

    def point_multiplicities(self) -> List[int]:
        """Multiplicity ``e_p`` of the whole curve at each point."""
        out = [0] * len(self.points)
        for i in range(len(self.branches)):
            for k, x in enumerate(self.multiplicities(i)):
                out[k] += x
        return out

    def minimal_resolution(self) -> List[int]:
        """Ids of the points of the minimal embedded resolution of the curve."""
        if "kmin" not in self._memo:
            self._memo["kmin"] = _kmin(self.points, self.point_multiplicities())
        return list(self._memo["kmin"])

    def m(self, i: int) -> int:
        """Sum of the multiplicities of branch ``i`` in the minimal embedded resolution."""
        keep = set(self.minimal_resolution())
        return sum(x for p, x in zip(self.points, self.multiplicities(i)) if p.id in keep)

    def decorations(self) -> List[int]:
        return [b.l for b in self.branches]

    def delta(self) -> int:
        return sum(e * (e - 1) // 2 for e in self.point_multiplicities())

    def is_nonsingular(self) -> bool:
        return len(self.branches) == 1 and self.branches[0].l == 0

    def intersection_matrix(self) -> List[List[int]]:
        r = len(self.branches)
        return [[self.intersection(i, j) if i != j else 0 for j in range(r)] for i in range(r)]


def _curvette(points: Sequence[ClusterPoint], attach: Optional[int]) -> List[int]:
    n = len(points)
    out = [0] * n
    if attach is None:
        return out
    pos = {p.id: k for k, p in enumerate(points)}
    for k in range(n - 1, -1, -1):
        if points[k].id == attach:
            out[k] += 1
        if out[k]:
            for q in points[k].proximities():
                out[pos[q]] += out[k]
    return out


def _kmin(points: Sequence[ClusterPoint], e: Sequence[int]) -> List[int]:
    """Points with ``e_p >= 2`` or satellites on the curve, closed under ancestors."""
    by_id = {p.id: p for p in points}
    keep: Set[int] = set()
    for p, x in zip(points, e):
        if x >= 2 or (x >= 1 and len(p.proximities()) >= 2):
            q: Optional[int] = p.id
            while q is not None and q not in keep:
                keep.add(q)
                q = by_id[q].parent
    return [p.id for p in points if p.id in keep]


def _validate(c: DecoratedCurve) -> None:
    seen: Dict[int, ClusterPoint] = {}
    roots = 0
    for p in c.points:
        if isinstance(p.id, bool) or not isinstance(p.id, int):
            raise GraphError(f"point id {p.id!r} is not an integer")
        if p.id in seen:
            raise GraphError(f"point {p.id} occurs twice")
        if p.parent is None:
            roots += 1
            if p.proximate_to:
                raise GraphError(f"point {p.id} has no parent but is proximate to {list(p.proximate_to)}")
        elif p.parent not in seen:
            raise GraphError(f"point {p.id}: parent {p.parent} must be listed before it")
        prox = p.proximities()
        for q in prox:
            if q not in seen:
                raise GraphError(f"point {p.id}: proximate point {q} must be listed before it")
        if len(prox) > 2:
            raise GraphError(f"point {p.id} is proximate to more than two points")
        extra = [q for q in prox if q != p.parent]
        if extra:
            q = extra[0]
            if q not in seen[p.parent].proximities():
                raise GraphError(f"point {p.id}: the parent {p.parent} does not lie on the curve of {q}")
            for other in seen.values():
                if other.parent == p.parent and q in other.proximate_to and other.id != p.id:
                    raise GraphError(f"points {other.id} and {p.id} are the same satellite point")
        seen[p.id] = p
    if c.points and roots != 1:
        raise GraphError("a cluster needs exactly one point without parent")
    if not c.branches:
        raise GraphError("a decorated curve needs at least one branch")
    for b in c.branches:
        if isinstance(b.l, bool) or not isinstance(b.l, int) or b.l < 0:
            raise GraphError(f"decoration {b.l!r} is not a non-negative integer")
        if b.attach is None:
            if c.points or len(c.branches) != 1:
                raise GraphError("only a lone smooth branch with empty cluster may omit its point")
        elif b.attach not in seen:
            raise GraphError(f"branch attached to unknown point {b.attach}")
    if c.points:
        e = c.point_multiplicities()
        for p, x in zip(c.points, e):
            if x == 0:
                raise GraphError(f"point {p.id} lies on no branch")
        for i, b in enumerate(c.branches):
            if b.l < c.m(i):
                raise GraphError(f"branch {i + 1}: decoration {b.l} < m = {c.m(i)}")


# -- the space X(C, l) -----------------------------------------------------------

def _resolution_points(c: DecoratedCurve) -> Tuple[List[ClusterPoint], List[int]]:
    """Minimal embedded resolution of ``(C, l)``: points and each branch's last point."""
    if not c.points:
        b = c.branches[0]
        pts = []
        for k in range(b.l):
            pts.append(ClusterPoint(k + 1, k if k else None, ()))
        return pts, [b.l] if b.l else [0]
    keep = set(c.minimal_resolution())
    pts = [p for p in c.points if p.id in keep]
    nxt = max(c.ids) + 1
    last = []
    added: Set[int] = set()
    for i, b in enumerate(c.branches):
        mult = c.multiplicities(i)
        on = [p.id for p, x in zip(c.points, mult) if x and p.id in keep]
        if not on and keep:
            raise GraphError("branch misses the minimal resolution of a singular curve")
        tip: Optional[int] = on[-1] if on else None
        # reuse the free points already listed on the branch, then add fresh ones
        free = [p for p, x in zip(c.points, mult) if x and p.id not in keep]
        for k in range(b.l - c.m(i)):
            if k < len(free) and free[k].parent == tip and free[k].id not in added:
                nid = free[k].id
            else:
                nid = nxt
                nxt += 1
            pts.append(ClusterPoint(nid, tip, ()))
            added.add(nid)
            tip = nid
        last.append(tip)
    return pts, last


def _cluster_graph(points: Sequence[ClusterPoint], prefix: str = "E") -> WeightedDualGraph:
    """Dual graph of all exceptional curves, intersection form ``-P^T P``."""
    pos = {p.id: k for k, p in enumerate(points)}
    n = len(points)
    cols: List[Set[int]] = [set() for _ in range(n)]
    for k, p in enumerate(points):
        for q in p.proximities():
            cols[pos[q]].add(k)
    w = {}
    edges = []
    names = [f"{prefix}{p.id}" for p in points]
    for a in range(n):
        w[names[a]] = -1 - len(cols[a])
        for b in range(a + 1, n):
            x = (1 if b in cols[a] else 0) - len(cols[a] & cols[b])
            if x < 0:
                raise GraphError("cluster gives a negative intersection number")
            if x:
                edges.append((names[a], names[b], x))
    return WeightedDualGraph(w, edges)


def graph_of(c: DecoratedCurve) -> List[WeightedDualGraph]:
    """Graphs of the singularities of ``X(C, l)``.

    The embedded resolution of ``(C, l)`` is the minimal embedded resolution
    of ``C`` followed by ``l(i) - m(i)`` free blow-ups along each branch; the
    curves not meeting the strict transform are blown down.
    """
    return list(_graph_of(c))


@lru_cache(maxsize=1 << 15)
def _graph_of(c: DecoratedCurve) -> Tuple[WeightedDualGraph, ...]:
    if c.is_nonsingular():
        return ()
    pts, last = _resolution_points(c)
    if not pts:
        return ()
    full = _cluster_graph(pts)
    meet = {f"E{t}" for t in last}
    rest = [v for v in full.vertices if v not in meet]
    if not rest:
        return ()
    sub = subgraph(full, rest)
    comps = [subgraph(sub, comp) for comp in connected_components(sub)]
    return tuple(sorted(comps, key=lambda h: vertex_key(h.vertices[0])))


# -- augmented graphs and blow-down certificates ----------------------------------

@dataclass(frozen=True)
class AugmentedGraph:
    """A graph with ``(-1)``-vertices carrying the branches (arrows).

    ``arrows`` lists ``(vertex, base vertex)`` in branch order.
    """

    base: WeightedDualGraph
    graph: WeightedDualGraph
    arrows: Tuple[Tuple[str, str], ...]

    def arrow_counts(self) -> Dict[str, int]:
        out = {v: 0 for v in self.base.vertices}
        for _, v in self.arrows:
            out[v] += 1
        return out


def _end_vertices(g: WeightedDualGraph) -> List[str]:
    return sorted((v for v in g.vertices if len(g.adjacency[g.index(v)]) <= 1), key=vertex_key)


def augment(g: WeightedDualGraph, counts: Mapping[str, int], stem: str = "r") -> AugmentedGraph:
    """Attach ``counts[v]`` new ``(-1)``-vertices to each ``v``."""
    w = g.weight_map()
    edges = g.edges()
    arrows = []
    k = 0
    for v in g.vertices:
        for _ in range(counts.get(v, 0)):
            k += 1
            name = f"{stem}{k}"
            while name in w:
                name = "_" + name
            w[name] = -1
            edges.append((v, name, 1))
            arrows.append((name, v))
    return AugmentedGraph(g, WeightedDualGraph(w, edges), tuple(arrows))


def attach_arrows(g: WeightedDualGraph, e0: Optional[str] = None) -> AugmentedGraph:
    """``-Z . E_v`` arrows at every vertex, one fewer at the chosen end ``E_0``.

    Defaults to the least end vertex.  Needs a rational graph with reduced
    fundamental cycle.
    """
    if not is_rational(g):
        raise GraphError("graph is not rational")
    z = fundamental_cycle(g)[0]
    if not z.is_reduced():
        raise GraphError("fundamental cycle is not reduced")
    if e0 is None:
        ends_ = _end_vertices(g)
        if not ends_:
            raise GraphError("graph has no end vertex")
        e0 = ends_[0]
    g.index(e0)
    s = contact(g, z.coeffs)
    counts = {v: -x for v, x in zip(g.vertices, s)}
    counts[e0] -= 1
    if counts[e0] < 0:
        raise GraphError(f"E_0 = {e0} has Z . E_0 = 0")
    return augment(g, counts)


@dataclass(frozen=True)
class ProximityMatrix:
    """Blow-up order of the vertices with their proximities and the matrix ``P``."""

    order: Tuple[str, ...]
    proximate: Tuple[Tuple[str, ...], ...]
    matrix: Tuple[Tuple[int, ...], ...]

    def inverse(self) -> List[List[int]]:
        return _unit_lower_inverse([list(r) for r in self.matrix])


def _unit_lower_inverse(p: Sequence[Sequence[int]]) -> List[List[int]]:
    n = len(p)
    inv = [[0] * n for _ in range(n)]
    for j in range(n):
        inv[j][j] = 1
        for i in range(j + 1, n):
            inv[i][j] = -sum(p[i][k] * inv[k][j] for k in range(j, i))
    return inv


def proximity_factorize(a: Union[AugmentedGraph, WeightedDualGraph]) -> ProximityMatrix:
    """Blow the configuration down to a smooth point, recording proximities.

    The least-id ``(-1)``-vertex meeting at most two curves, each once, is
    contracted at every step.  Its current neighbours are the points it is
    proximate to.  Raises :class:`NotBlowdownable` when no such vertex exists
    before the graph is empty.
    """
    g = a.graph if isinstance(a, AugmentedGraph) else a
    if len(g) == 0:
        raise NotBlowdownable("empty configuration")
    cur = g
    seq: List[Tuple[str, Tuple[str, ...]]] = []
    while len(cur):
        pick = None
        for v in cur.vertices:
            i = cur.index(v)
            if cur.weights[i] != -1:
                continue
            adj = cur.adjacency[i]
            if len(adj) <= 2 and all(m == 1 for _, m in adj):
                pick = v
                break
        if pick is None:
            raise NotBlowdownable(f"no contractible (-1)-vertex among {list(cur.vertices)}")
        seq.append((pick, tuple(cur.neighbors(pick))))
        cur = contract(cur, pick)
    order = tuple(v for v, _ in reversed(seq))
    prox = {v: nb for v, nb in seq}
    pos = {v: k for k, v in enumerate(order)}
    n = len(order)
    mat = [[0] * n for _ in range(n)]
    for k, v in enumerate(order):
        mat[k][k] = 1
        for u in prox[v]:
            mat[k][pos[u]] = -1
    # certificate: the intersection form is -P^T P and P^{-1} is non-negative
    form = g.intersection_matrix()
    idx = [g.index(v) for v in order]
    for x in range(n):
        for y in range(n):
            val = -sum(mat[r][x] * mat[r][y] for r in range(n))
            if val != form[idx[x]][idx[y]]:
                raise AssertionError("proximity matrix does not reproduce the intersection form")
    if any(e < 0 for row in _unit_lower_inverse(mat) for e in row):
        raise AssertionError("proximity inequality violated")
    return ProximityMatrix(order, tuple(tuple(sorted(prox[v], key=pos.get)) for v in order), tuple(tuple(r) for r in mat))


def decorated_curve_of(a: AugmentedGraph, pm: Optional[ProximityMatrix] = None) -> DecoratedCurve:
    """The decorated curve whose embedded resolution is the augmented graph.

    Points are numbered ``1..N`` in blow-up order; branch ``i`` is a curvette
    of the ``i``-th arrow vertex and ``l(i)`` is the sum of its multiplicities.
    """
    if pm is None:
        pm = proximity_factorize(a)
    num = {v: k + 1 for k, v in enumerate(pm.order)}
    points = []
    for v, prox in zip(pm.order, pm.proximate):
        parent = max((num[u] for u in prox), default=None)
        points.append(ClusterPoint(num[v], parent, tuple(sorted(num[u] for u in prox))))
    branches = []
    for name, _ in a.arrows:
        mult = _curvette(points, num[name])
        branches.append(Branch(num[name], sum(mult)))
    labels = tuple((num[v], v) for v in pm.order)
    return DecoratedCurve(tuple(points), tuple(branches), labels)


# -- sandwiched decision -----------------------------------------------------------

def _blowdown_search(g: WeightedDualGraph, budget: Mapping[str, int]) -> Optional[Dict[str, int]]:
    """Arrow counts ``a_v <= budget[v]`` making ``g`` blow down, or ``None``."""
    dead: Set[tuple] = set()

    def rec(cur: WeightedDualGraph, used: Dict[str, int]) -> Optional[Dict[str, int]]:
        if len(cur) == 0:
            return dict(used)
        key = cur._key()
        if key in dead:
            return None
        for v in cur.vertices:
            i = cur.index(v)
            adj = cur.adjacency[i]
            if len(adj) > 2 or any(m != 1 for _, m in adj):
                continue
            need = -1 - cur.weights[i]
            if need < 0 or need > budget[v]:
                continue
            raised = cur.with_weights({v: -1}) if need else cur
            used[v] = need
            hit = rec(contract(raised, v), used)
            del used[v]
            if hit is not None:
                return hit
        dead.add(key)
        return None

    return rec(g, {})


def is_sandwiched(g: WeightedDualGraph, arrow_budget: Optional[int] = None) -> bool:
    """Whether some attachment of ``(-1)``-vertices makes ``g`` blow down to a smooth point.

    Contraction orders are searched exhaustively; before a base vertex is
    contracted just enough arrows are attached to raise it to ``-1``.  With
    ``arrow_budget`` at least ``-w_v - 1`` everywhere the answer is definite;
    a smaller budget that fails raises :class:`SandwichUnknown`.  The default
    budget is the multiplicity of a rational graph.
    """
    if len(g) == 0 or not g.is_connected():
        raise GraphError("graph must be non-empty and connected")
    if any(w >= 0 for w in g.weights):
        return False
    if arrow_budget is None:
        arrow_budget = multiplicity(g) if is_rational(g) else max(-w - 1 for w in g.weights)
    if is_rational(g) and fundamental_cycle(g)[0].is_reduced():
        try:
            proximity_factorize(attach_arrows(g))
            return True
        except (NotBlowdownable, GraphError):
            pass
    budget = {v: min(arrow_budget, -w - 1) for v, w in zip(g.vertices, g.weights)}
    if _blowdown_search(g, budget) is not None:
        return True
    if any(arrow_budget < -w - 1 for w in g.weights):
        raise SandwichUnknown(f"no augmentation with at most {arrow_budget} arrows per vertex")
    return False


def sandwich_augmentation(g: WeightedDualGraph) -> Optional[AugmentedGraph]:
    """An augmentation that blows down, or ``None`` if ``g`` is not sandwiched."""
    budget = {v: -w - 1 for v, w in zip(g.vertices, g.weights)}
    counts = _blowdown_search(g, budget)
    return None if counts is None else augment(g, counts)


# -- building clusters -----------------------------------------------------------

class _Builder:
    def __init__(self):
        self.points: List[ClusterPoint] = []
        self.branches: List[Branch] = []

    def add(self, parent: Optional[int], extra: Iterable[int] = ()) -> int:
        pid = len(self.points) + 1
        prox = set(extra)
        if parent is not None:
            prox.add(parent)
        self.points.append(ClusterPoint(pid, parent, tuple(sorted(prox))))
        return pid

    def chain(self, start: Optional[int], count: int) -> List[int]:
        out = []
        tip = start
        for _ in range(count):
            tip = self.add(tip)
            out.append(tip)
        return out

    def monomial(self, a: int, b: int) -> List[int]:
        """Points of ``y^a = x^b`` (``gcd(a, b) = 1``) up to the first free point after the resolution."""
        ex: Optional[int] = None
        ey: Optional[int] = None
        out: List[int] = []
        while True:
            p = self.add(out[-1] if out else None, [q for q in (ex, ey) if q is not None])
            out.append(p)
            if a == b:
                return out
            if a < b:
                b -= a
                ex = p
            else:
                a -= b
                ey = p

    def branch(self, attach: Optional[int], l: int) -> None:
        self.branches.append(Branch(attach, l))

    def build(self) -> DecoratedCurve:
        # drop points no branch passes through (e.g. trailing simulation points)
        pts = self.points
        e = [0] * len(pts)
        for b in self.branches:
            for k, x in enumerate(_curvette(pts, b.attach)):
                e[k] += x
        keep = [p for p, x in zip(pts, e) if x]
        return DecoratedCurve(tuple(keep), tuple(self.branches))


def monomial_curve(a: int, b: int, l: Optional[int] = None) -> DecoratedCurve:
    """The branch ``y^a = x^b`` (coprime exponents) decorated with ``l`` (default ``m``)."""
    from math import gcd

    if a < 1 or b < 1 or gcd(a, b) != 1:
        raise GraphError("exponents must be positive and coprime")
    if min(a, b) == 1:
        return smooth_curve([[0]], [0 if l is None else l])
    bld = _Builder()
    pts = bld.monomial(a, b)
    mult = _curvette(bld.points, pts[-1])
    m = sum(mult)
    want = m if l is None else l
    if want < m:
        raise GraphError(f"decoration {want} < m = {m}")
    tip = bld.chain(pts[-1], want - m)[-1:] or pts[-1:]
    bld.branch(tip[0], want)
    return bld.build()


@lru_cache(maxsize=1 << 15)
def _smooth_cached(contacts: Tuple[Tuple[int, ...], ...], ls: Tuple[int, ...]) -> DecoratedCurve:
    return smooth_curve(contacts, ls)


def smooth_curve(contacts: Sequence[Sequence[int]], ls: Sequence[int]) -> DecoratedCurve:
    """Smooth branches with pairwise contact orders ``contacts[i][j]`` (an ultrametric).

    Branch ``i`` passes through the first ``contacts[i][j]`` points shared with
    branch ``j`` and then through free points of its own until the sum of its
    multiplicities equals ``ls[i]``.
    """
    r = len(ls)
    if r == 1:
        if ls[0] == 0:
            return DecoratedCurve((), (Branch(None, 0),))
        bld = _Builder()
        pts = bld.chain(None, ls[0])
        bld.branch(pts[-1], ls[0])
        return bld.build()
    for i in range(r):
        for j in range(r):
            if i != j and contacts[i][j] < 1:
                raise GraphError("branches of a germ must meet")
            for k in range(r):
                if len({i, j, k}) == 3:
                    x = sorted((contacts[i][j], contacts[j][k], contacts[i][k]))
                    if x[0] != x[1]:
                        raise GraphError("contact orders of smooth branches must form an ultrametric")
    depth = [max(contacts[i][j] for j in range(r) if j != i) for i in range(r)]
    for i in range(r):
        if ls[i] < depth[i]:
            raise GraphError(f"decoration {ls[i]} < m = {depth[i]}")
    bld = _Builder()
    # trie of shared prefixes: node (i, t) is the t-th point of branch i
    node: Dict[Tuple[int, int], int] = {}
    for i in range(r):
        tip: Optional[int] = None
        for t in range(1, ls[i] + 1):
            owner = next((j for j in range(i) if contacts[i][j] >= t), None)
            if owner is not None:
                tip = node[(owner, t)]
            else:
                tip = bld.add(tip)
            node[(i, t)] = tip
        bld.branch(tip, ls[i])
    return bld.build()


# -- recipes for the III.3 and III.4 families ----------------------------------------

def recipe_iii3(k: int, s: int, left: Sequence[int] = (), short: int = 0, right: Sequence[int] = ()) -> DecoratedCurve:
    """``(A_{2k}, 2k+4+s)`` with extra branches making arm curves more negative.

    ``left`` lists ``m`` values (smooth branch, ``C_0 . C_i = 2m``,
    ``l = m+1``), ``short`` counts smooth branches with ``C_0 . C_i = 2k+1``
    and ``l = k+2``, ``right`` lists ``n`` values (an ``A_{2k}`` branch with
    ``C_0 . C_i = 4k+2+n`` and ``l = 2k+3+n``).
    """
    if k < 1 or s < 0:
        raise GraphError("need k >= 1 and s >= 0")
    bld = _Builder()
    core = bld.monomial(2, 2 * k + 1)
    trail = bld.chain(core[-1], s + 2)
    bld.branch(trail[-1], 2 * k + 4 + s)
    spec = []
    for m in left:
        if not 1 <= m <= k:
            raise GraphError(f"left arm index {m} outside 1..{k}")
        bld.branch(bld.add(core[m - 1]), m + 1)
        spec.append((2 * m, m + 1))
    for _ in range(short):
        bld.branch(bld.add(core[k]), k + 2)
        spec.append((2 * k + 1, k + 2))
    for n in right:
        if not 1 <= n <= s + 1:
            raise GraphError(f"right arm index {n} outside 1..{s + 1}")
        bld.branch(bld.add(trail[n - 1]), 2 * k + 3 + n)
        spec.append((4 * k + 2 + n, 2 * k + 3 + n))
    curve = bld.build()
    for i, (dot, l) in enumerate(spec, start=1):
        if curve.intersection(0, i) != dot or curve.branches[i].l != l:
            raise AssertionError(f"branch {i} does not have C0.Ci = {dot}, l = {l}")
    return curve


_III4_CORE = {"E6": (3, 4, 7), "E8": (3, 5, 8)}


def recipe_iii4(variant: str, k: int, first: int = 0, second: int = 0, right: Sequence[int] = (), smooth: Sequence[int] = ()) -> DecoratedCurve:
    """Decorated curves for the three sandwiched III.4 families.

    ``E6``: core ``(E_6, k+7)``; ``first`` smooth branches with ``l = 2``,
    ``second`` smooth branches with ``l = 3``, and ``(E_6, t+7)`` branches
    meeting the core with multiplicity ``12+t`` for ``t`` in ``right``
    (``2 <= t <= k``, the right-arm curve made more negative).

    ``E8``: core ``(E_8, k+8)``; ``first`` smooth branches with ``l = 2`` and
    ``(E_8, t+8)`` branches meeting the core with multiplicity ``15+t``.

    ``x3``: core equisingular with ``(x^3 + y^{3k-1}, 4+3k)`` for ``k > 2``;
    ``smooth`` lists how many core points each added smooth branch shares
    (its decoration is one more).
    """
    bld = _Builder()
    spec = []
    if variant in _III4_CORE:
        a, b, shift = _III4_CORE[variant]
        if k < 1:
            raise GraphError("need k >= 1")
        core = bld.monomial(a, b)
        m0 = 6 if variant == "E6" else 7
        trail = bld.chain(core[-1], k + shift - m0)
        bld.branch(trail[-1], k + shift)
        mult0 = 3 * 3 + (3 if variant == "E6" else 6)
        for _ in range(first):
            bld.branch(bld.add(core[0]), 2)
            spec.append((3, 2))
        if variant == "E6":
            for _ in range(second):
                bld.branch(bld.add(core[1]), 3)
                spec.append((4, 3))
        elif second:
            raise GraphError("the E8 family has no second kind of smooth branch")
        for t in right:
            # E_{2,1} next to the center stays a (-2)-curve in type III.4
            if not 2 <= t <= k:
                raise GraphError(f"right arm index {t} outside 2..{k}")
            bld.branch(bld.add(trail[t - 1]), t + shift)
            spec.append((mult0 + t, t + shift))
    elif variant == "x3":
        if k <= 2:
            raise GraphError("the x3 family needs k > 2")
        if first or second or right:
            raise GraphError("the x3 family takes smooth branches only")
        core = bld.monomial(3, 3 * k - 1)
        trail = bld.chain(core[-1], 3)
        bld.branch(trail[-1], 4 + 3 * k)
        path = core + trail
        for d in smooth:
            if not 1 <= d <= len(path):
                raise GraphError(f"smooth branch depth {d} outside 1..{len(path)}")
            bld.branch(bld.add(path[d - 1]), d + 1)
    else:
        raise GraphError(f"unknown III.4 variant {variant!r}")
    curve = bld.build()
    for i, (dot, l) in enumerate(spec, start=1):
        if curve.intersection(0, i) != dot or curve.branches[i].l != l:
            raise AssertionError(f"branch {i} does not have C0.Ci = {dot}, l = {l}")
    return curve


# E8 fibres in a delta-constant deformation: with a triple point, or four double points
E8_PROFILES = ((3, 2), (2, 2, 2, 2))


def e8_resolution_profiles(t: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Multiplicity sequences in the resolution of ``(E_8, t+8)`` after deformation."""
    if t < 0:
        raise GraphError("t must be non-negative")
    return (3, 2) + (1,) * (t + 3), (2, 2, 2, 2) + (1,) * t


# -- delta-constant candidates -------------------------------------------------------

def germ_type(c: DecoratedCurve) -> str:
    """``A_n`` name of a curve germ with one or two branches of A-type, else ``other``."""
    r = len(c.branches)
    if not c.points:
        return "A0"
    keep = set(c.minimal_resolution())
    if r == 1:
        seq = [x for p, x in zip(c.points, c.multiplicities(0)) if p.id in keep]
        if not seq:
            return "A0"
        k = sum(1 for x in seq if x == 2)
        if seq == [2] * k + [1, 1] and k >= 1:
            return f"A{2 * k}"
        return "other"
    if r == 2 and all(c.multiplicities(i)[0] == 1 for i in range(2)):
        return f"A{2 * c.intersection(0, 1) - 1}"
    return "other"


@dataclass(frozen=True)
class Candidate:
    """A combinatorially possible general fibre: one decorated germ per point."""

    germs: Tuple[DecoratedCurve, ...]
    label: str = "combinatorial"

    def curve_types(self) -> Tuple[str, ...]:
        """Types of the singular curve germs (smooth decoration points omitted)."""
        out = []
        for gm in self.germs:
            t = germ_type(gm)
            if t != "A0":
                out.append(t)
        return tuple(sorted(out, key=vertex_key))

    def graphs(self) -> List[WeightedDualGraph]:
        return [h for gm in self.germs for h in graph_of(gm)]


def _partitions(n: int, smallest: int = 1) -> Iterator[List[int]]:
    if n == 0:
        yield []
        return
    for first in range(smallest, n + 1):
        for rest in _partitions(n - first, first):
            yield [first] + rest


def a_series_types(k: int) -> List[Tuple[str, ...]]:
    """Curve types ``A_{2l} + sum A_{2m_i - 1}`` with ``k = l + sum m_i``."""
    out = set()
    for l in range(k + 1):
        for parts in _partitions(k - l):
            types = ([f"A{2 * l}"] if l else []) + [f"A{2 * m - 1}" for m in parts]
            out.add(tuple(sorted(types, key=vertex_key)))
    return sorted(out)


def _ultrametrics(members: Sequence[int], cap: Mapping[Tuple[int, int], int], lo: int = 1) -> Iterator[Dict[Tuple[int, int], int]]:
    """Ultrametric contact orders ``>= lo`` on ``members`` bounded by ``cap``."""
    ms = tuple(sorted(members))
    pairs = list(combinations(ms, 2))
    for vals in _ultra(len(ms), tuple(cap[p] for p in pairs), lo):
        yield dict(zip(pairs, vals))


@lru_cache(maxsize=1 << 16)
def _ultra(n: int, cap: Tuple[int, ...], lo: int) -> Tuple[Tuple[int, ...], ...]:
    """Ultrametrics on ``0..n-1`` as value tuples over the sorted pairs."""
    if n == 1:
        return ((),)
    pairs = list(combinations(range(n), 2))
    where = {p: k for k, p in enumerate(pairs)}
    out = []
    for v in range(lo, min(cap) + 1):
        for blocks in _set_partitions(list(range(n))):
            if len(blocks) < 2:
                continue
            subs = []
            for bl in blocks:
                sub_pairs = list(combinations(bl, 2))
                subs.append((sub_pairs, _ultra(len(bl), tuple(cap[where[p]] for p in sub_pairs), v + 1)))
            for pick in product(*(opts for _, opts in subs)):
                vals = [v] * len(pairs)
                for (sub_pairs, _), got in zip(subs, pick):
                    for p, x in zip(sub_pairs, got):
                        vals[where[p]] = x
                out.append(tuple(vals))
    return tuple(out)


def _set_partitions(items: List[int]) -> Iterator[List[List[int]]]:
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[head]] + part
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]


def _contact_splits(total: Mapping[Tuple[int, int], int], r: int, budget: Optional[Sequence[int]] = None) -> List[tuple]:
    """Multisets of points ``(members, contacts)`` whose contacts add up to ``total``.

    With ``budget`` the sum over points of the local ``m`` of branch ``i``
    (its largest contact there) may not exceed ``budget[i]``.
    """
    out: List[tuple] = []
    cap = list(budget) if budget is not None else None

    def rec(rest: Dict[Tuple[int, int], int], acc: List[tuple], need: List[int], floor: Optional[tuple]) -> None:
        open_ = sorted(p for p, x in rest.items() if x > 0)
        if not open_:
            out.append(tuple(acc))
            return
        i, j = open_[0]
        others = [x for x in range(r) if x not in (i, j)]
        for extra in range(len(others) + 1):
            for more in combinations(others, extra):
                members = tuple(sorted((i, j) + more))
                pairs = list(combinations(members, 2))
                if any(rest[p] < 1 for p in pairs):
                    continue
                for um in _ultrametrics(members, rest):
                    point = (members, tuple(um[p] for p in pairs))
                    # points through the first open pair are chosen in sorted order
                    if floor is not None and point < floor:
                        continue
                    grown = list(need)
                    for a in members:
                        grown[a] += max(um[(min(a, b), max(a, b))] for b in members if b != a)
                    if cap is not None and any(x > y for x, y in zip(grown, cap)):
                        continue
                    new = dict(rest)
                    for p in pairs:
                        new[p] -= um[p]
                    still = new[(i, j)] > 0
                    rec(new, acc + [point], grown, point if still else None)

    rec(dict(total), [], [0] * r, None)
    return sorted(out)


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


Layout = List[Tuple[Tuple[int, ...], Dict[Tuple[int, int], int]]]


def _needs(points: Layout, r: int) -> List[List[Tuple[int, int]]]:
    """Per branch, ``(point index, local m)`` for the singular points it passes."""
    need: List[List[Tuple[int, int]]] = [[] for _ in range(r)]
    for k, (members, um) in enumerate(points):
        for i in members:
            local = max(um[(min(i, j), max(i, j))] for j in members if j != i)
            need[i].append((k, local))
    return need


def _branch_options(slots: int, spare: int) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Extra decoration per singular point and the parts ``>= 2`` left at smooth points."""
    opts = []
    for extra in range(spare + 1):
        for comp in _compositions(extra, slots):
            for t in range(spare - extra + 1):
                for parts in _partitions(t, 2):
                    opts.append((comp, tuple(parts)))
    return opts


def _local_germ(members: Sequence[int], um: Mapping[Tuple[int, int], int], local_l: Sequence[int]) -> DecoratedCurve:
    contacts = tuple(tuple(um[(min(a, b), max(a, b))] if a != b else 0 for b in members) for a in members)
    return _smooth_cached(contacts, tuple(local_l))


def _spread(points: Layout, ls: Sequence[int], max_points: Optional[int]) -> Iterator[Tuple[DecoratedCurve, ...]]:
    """Decoration splits for fixed singular points of smooth branches."""
    r = len(ls)
    need = _needs(points, r)
    per_branch = []
    for i in range(r):
        spare = ls[i] - sum(m for _, m in need[i])
        if spare < 0:
            return
        per_branch.append(_branch_options(len(need[i]), spare))
    slot = {(k, i): t for i in range(r) for t, (k, _) in enumerate(need[i])}
    for choice in product(*per_branch):
        germs = []
        for k, (members, um) in enumerate(points):
            local_l = [need[i][slot[(k, i)]][1] + choice[i][0][slot[(k, i)]] for i in members]
            germs.append(_local_germ(members, um, local_l))
        for i in range(r):
            germs.extend(_smooth_cached(((0,),), (part,)) for part in choice[i][1])
        if max_points is not None and len(germs) > max_points:
            continue
        yield tuple(germs)


def _layouts(c: DecoratedCurve) -> Iterator[Layout]:
    r = len(c.branches)
    total = {(i, j): c.intersection(i, j) for i, j in combinations(range(r), 2)}
    for split in _contact_splits(total, r, c.decorations()):
        yield [(members, dict(zip(combinations(members, 2), vals))) for members, vals in split]


def _point_options(rest: Mapping[Tuple[int, int], int], r: int, first: Tuple[int, int], cap: Optional[Sequence[int]] = None) -> Iterator[Tuple[Tuple[int, ...], Dict[Tuple[int, int], int]]]:
    """Points ``(members, contacts)`` through the pair ``first`` that fit into ``rest``.

    With ``cap`` a contact ``u(a, b)`` is at most ``cap[a] - rest(a, j)`` for
    every branch ``j`` outside the point, since ``a`` still has to meet ``j``.
    """
    i, j = first
    others = [x for x in range(r) if x not in (i, j)]
    for extra in range(len(others) + 1):
        for more in combinations(others, extra):
            members = tuple(sorted((i, j) + more))
            bound = dict(rest)
            if cap is not None:
                room = {}
                for a in members:
                    outside = [rest[(min(a, x), max(a, x))] for x in range(r) if x not in members]
                    room[a] = cap[a] - max(outside, default=0)
                for a, b in combinations(members, 2):
                    bound[(a, b)] = min(rest[(a, b)], room[a], room[b])
            if any(bound[p] < 1 for p in combinations(members, 2)):
                continue
            for um in _ultrametrics(members, bound):
                yield members, um


def _local_m(members: Sequence[int], um: Mapping[Tuple[int, int], int], a: int) -> int:
    return max(um[(min(a, b), max(a, b))] for b in members if b != a)


def _largest(rest: Tuple[int, ...], r: int) -> List[int]:
    out = [0] * r
    for (a, b), x in zip(combinations(range(r), 2), rest):
        out[a] = max(out[a], x)
        out[b] = max(out[b], x)
    return out


def _one_point_each(rest: Tuple[int, ...], r: int) -> bool:
    """Whether the open contacts form disjoint cliques, each an ultrametric."""
    left = dict(zip(combinations(range(r), 2), rest))
    near = [frozenset([a] + [b for b in range(r) if b != a and left[(min(a, b), max(a, b))] > 0]) for a in range(r)]
    for a in range(r):
        if any(near[b] != near[a] for b in near[a]):
            return False
        for x, y, z in combinations(sorted(near[a]), 3):
            vals = sorted((left[(x, y)], left[(x, z)], left[(y, z)]))
            if vals[0] != vals[1]:
                return False
    return True


@lru_cache(maxsize=1 << 18)
def _completable(rest: Tuple[int, ...], budget: Tuple[int, ...]) -> bool:
    """Whether the contacts ``rest`` split over points with summed local ``m`` within ``budget``."""
    r = len(budget)
    low = _largest(rest, r)
    if any(x < y for x, y in zip(budget, low)):
        return False
    if _one_point_each(rest, r):
        # one point per group of branches meets the lower bound exactly
        return True
    pairs = list(combinations(range(r), 2))
    left = dict(zip(pairs, rest))
    first = next(p for p in pairs if left[p] > 0)
    for members, um in reversed(list(_point_options(left, r, first, budget))):
        spent = list(budget)
        for a in members:
            spent[a] -= _local_m(members, um, a)
        if min(spent) < 0:
            continue
        if _completable(tuple(left[p] - um.get(p, 0) for p in pairs), tuple(spent)):
            return True
    return False


def candidate_germs(c: DecoratedCurve) -> List[DecoratedCurve]:
    """Every germ occurring in some output of :func:`delta_const_candidates`.

    The graphs of a candidate are the union of the graphs of its germs, so a
    property of graphs holds on all candidates exactly when it holds on these
    germs.  For smooth branches each possible point germ is kept when the
    remaining contacts can still be placed within the decorations, instead
    of listing the (much larger) product of choices.
    """
    ls = c.decorations()
    r = len(ls)
    if not _smooth_branches(c) or r == 1:
        seen: Dict[tuple, DecoratedCurve] = {}
        for cand in delta_const_candidates(c):
            for g in cand.germs:
                seen.setdefault(_germ_key(g), g)
        return list(seen.values())
    pairs = list(combinations(range(r), 2))
    total = {p: c.intersection(*p) for p in pairs}
    out: Dict[tuple, DecoratedCurve] = {}

    def add(g: DecoratedCurve) -> None:
        out.setdefault(_germ_key(g), g)

    for size in range(2, r + 1):
        for members in combinations(range(r), size):
            sub = {p: total[p] for p in combinations(members, 2)}
            if min(sub.values()) < 1:
                continue
            for um in _ultrametrics(list(members), sub):
                local = [_local_m(members, um, a) for a in members]
                rest = tuple(total[p] - um.get(p, 0) for p in pairs)

                def grow(k: int, lam: List[int]) -> None:
                    # feasibility only gets harder as a decoration grows
                    budget = list(ls)
                    for a, x in zip(members, lam + local[k:]):
                        budget[a] -= x
                    if not _completable(rest, tuple(budget)):
                        return
                    if k == len(members):
                        add(_local_germ(members, um, lam))
                        return
                    for x in range(local[k], ls[members[k]] + 1):
                        budget = list(ls)
                        for a, y in zip(members, lam + [x] + local[k + 1:]):
                            budget[a] -= y
                        if not _completable(rest, tuple(budget)):
                            break
                        grow(k + 1, lam + [x])

                grow(0, [])
    full = tuple(total[p] for p in pairs)
    for i in range(r):
        for part in range(2, ls[i] + 1):
            budget = list(ls)
            budget[i] -= part
            if not _completable(full, tuple(budget)):
                break
            add(_smooth_cached(((0,),), (part,)))
    return list(out.values())


def _smooth_branches(c: DecoratedCurve) -> bool:
    if not c.points:
        return True
    return all(c.multiplicities(i)[0] == 1 for i in range(len(c.branches)))


def _germ_key(c: DecoratedCurve) -> tuple:
    pts = tuple((p.id, -1 if p.parent is None else p.parent, p.proximate_to) for p in c.points)
    return pts, tuple((-1 if b.attach is None else b.attach, b.l) for b in c.branches)


def delta_const_candidates(c: DecoratedCurve, depth: Optional[int] = None) -> List[Candidate]:
    """Combinatorial candidates for the general fibre of a delta-constant deformation.

    Supported inputs are curves with smooth branches and a single ``A_{2k}``
    branch.  For smooth branches each pairwise intersection number is split
    over points (contacts at a point form an ultrametric) and every
    decoration is split with ``l_p(i) >= m_p(i)``; the rest of a decoration
    sits at smooth points of the branch.  ``depth`` bounds the number of germs
    in a fibre.  Candidates are not checked for geometric realizability.
    """
    seen: Set[tuple] = set()
    out: List[Candidate] = []

    def emit(germs: Tuple[DecoratedCurve, ...]) -> None:
        key = tuple(sorted(_germ_key(g) for g in germs))
        if key not in seen:
            seen.add(key)
            out.append(Candidate(germs))

    ls = c.decorations()
    r = len(ls)
    if _smooth_branches(c):
        if r == 1:
            for parts in _partitions(ls[0]):
                germs = tuple(_smooth_cached(((0,),), (p,)) for p in parts if p >= 2)
                if depth is None or len(germs) <= depth:
                    emit(germs)
            return out
        for points in _layouts(c):
            for germs in _spread(points, ls, depth):
                emit(germs)
        return out
    if r == 1:
        t = germ_type(c)
        if not t.startswith("A") or t == "A0" or int(t[1:]) % 2:
            raise UnsupportedCurve(f"branch of type {t} is not supported")
        k = int(t[1:]) // 2
        l_total = ls[0]
        for lo in range(k + 1):
            for parts in _partitions(k - lo):
                for germs in _a_series_fibres(lo, parts, l_total, depth):
                    emit(germs)
        return out
    raise UnsupportedCurve("only smooth branches or a single A_2k branch are supported")


def _a_series_fibres(lo: int, parts: Sequence[int], l_total: int, depth: Optional[int]) -> Iterator[Tuple[DecoratedCurve, ...]]:
    """Fibres with one ``A_{2 lo}`` point and ``A_{2m-1}`` points for ``m`` in ``parts``."""
    mins = []
    if lo:
        mins.append(2 * lo + 2)
    for m in parts:
        mins.extend([m, m])
    spare = l_total - sum(mins)
    if spare < 0:
        return
    for extra in range(spare + 1):
        for comp in _compositions(extra, len(mins)):
            for rest in _partitions(spare - extra):
                vals = [a + b for a, b in zip(mins, comp)]
                germs = []
                pos = 0
                if lo:
                    germs.append(monomial_curve(2, 2 * lo + 1, vals[0]))
                    pos = 1
                for m in parts:
                    germs.append(smooth_curve([[0, m], [m, 0]], vals[pos:pos + 2]))
                    pos += 2
                germs.extend(smooth_curve([[0]], [p]) for p in rest if p >= 2)
                if depth is not None and len(germs) > depth:
                    continue
                yield tuple(germs)


# -- ends ------------------------------------------------------------------------------

def min_property(c: DecoratedCurve, part: Sequence[int]) -> bool:
    """``C_i . C_j <= min(l(i), l(j)) <= C_i . C_j + 1`` on all pairs of ``part``."""
    for i, j in combinations(part, 2):
        n = c.intersection(i, j)
        low = min(c.branches[i].l, c.branches[j].l)
        if not n <= low <= n + 1:
            return False
    return True


def ends_bound(c: DecoratedCurve, partition: Sequence[Sequence[int]]) -> int:
    """Upper bound ``k + 1`` on the ends of each singularity of ``X(C, l)``."""
    if not _smooth_branches(c):
        raise UnsupportedCurve("the ends bound is stated for smooth branches")
    covered = set()
    for part in partition:
        covered.update(part)
        if not min_property(c, part):
            raise GraphError(f"part {list(part)} violates the intersection/decoration property")
    if covered != set(range(len(c.branches))):
        raise GraphError("the parts must cover all branches")
    bound = len(partition) + 1
    for h in graph_of(c):
        if ends(h) > bound:
            raise AssertionError(f"graph with {ends(h)} ends exceeds the bound {bound}")
    return bound
