"""Fundamental cycles, rationality, positive roots and the first blow-up."""
from __future__ import annotations

import os
import random
from itertools import product
from typing import List, Optional, Sequence, Set, Tuple

from .graph_core import (
    Cycle,
    GraphError,
    WeightedDualGraph,
    _dot_vec,
    arithmetic_genus,
    canonical_dot,
    connected_components,
    is_negative_definite,
    subgraph,
)

__all__ = [
    "NotNegativeDefinite",
    "NotRational",
    "EnumerationTooLarge",
    "DEFAULT_MAX_BOX",
    "max_box",
    "fundamental_cycle",
    "is_rational",
    "multiplicity",
    "positive_roots",
    "is_positive_root",
    "in_computation_sequence",
    "is_almost_reduced",
    "obstruction_number",
    "blow_up_decomposition",
    "resolution_profile",
    "contact",
]

DEFAULT_MAX_BOX = 10**7
MAX_PROFILE_DEPTH = 64


class NotNegativeDefinite(GraphError):
    pass


class NotRational(GraphError):
    pass


class EnumerationTooLarge(GraphError):
    pass


def max_box() -> int:
    raw = os.environ.get("SINGRAPH_MAX_BOX")
    return int(raw) if raw else DEFAULT_MAX_BOX


def _require_singularity_graph(g: WeightedDualGraph) -> None:
    if len(g) == 0:
        raise NotNegativeDefinite("empty graph")
    if not is_negative_definite(g):
        raise NotNegativeDefinite("intersection form is not negative definite")
    if not g.is_connected():
        raise GraphError("graph is not connected")


def contact(g: WeightedDualGraph, d: Sequence[int]) -> List[int]:
    """The vector ``(D . E_v)_v``."""
    out = []
    for i in range(len(g.vertices)):
        s = g.weights[i] * d[i]
        for j, m in g.adjacency[i]:
            s += m * d[j]
        out.append(s)
    return out


def _laufer(g: WeightedDualGraph, start: int, rng: Optional[random.Random] = None) -> Tuple[List[int], List[int]]:
    n = len(g.vertices)
    z = [0] * n
    z[start] = 1
    s = [0] * n
    s[start] = g.weights[start]
    for j, m in g.adjacency[start]:
        s[j] += m
    seq = [start]
    while True:
        pos = [i for i in range(n) if s[i] > 0]
        if not pos:
            return z, seq
        i = rng.choice(pos) if rng is not None else pos[0]
        z[i] += 1
        s[i] += g.weights[i]
        for j, m in g.adjacency[i]:
            s[j] += m
        seq.append(i)
        if len(seq) > 10**6:
            raise GraphError("computation sequence does not terminate")


def fundamental_cycle(g: WeightedDualGraph, rng: Optional[random.Random] = None) -> Tuple[Cycle, List[str]]:
    """Artin's fundamental cycle with a witnessing computation sequence.

    The sequence starts at the least vertex and always adds the least vertex
    with ``Z_j . E_v > 0``.  Passing ``rng`` randomizes both choices (used to
    test independence of the result).
    """
    _require_singularity_graph(g)
    if rng is None:
        hit = g._cache.get("zcycle")
        if hit is not None:
            return hit
    start = rng.randrange(len(g.vertices)) if rng is not None else 0
    z, seq = _laufer(g, start, rng)
    out = (Cycle(g, tuple(z)), [g.vertices[i] for i in seq])
    if rng is None:
        g._cache["zcycle"] = out
    return out


def is_rational(g: WeightedDualGraph) -> bool:
    """Artin's criterion ``p_a(Z) = 0``."""
    hit = g._cache.get("rational")
    if hit is None:
        z, _ = fundamental_cycle(g)
        hit = arithmetic_genus(g, z) == 0
        g._cache["rational"] = hit
    return hit


def _require_rational(g: WeightedDualGraph) -> Cycle:
    if not is_rational(g):
        raise NotRational("graph is not rational")
    return fundamental_cycle(g)[0]


def multiplicity(g: WeightedDualGraph) -> int:
    """``-Z^2`` of a rational graph."""
    z = _require_rational(g)
    return -_dot_vec(g, z.coeffs, z.coeffs)


def is_positive_root(g: WeightedDualGraph, d: Cycle) -> bool:
    return d.is_positive() and arithmetic_genus(g, d) == 0


def in_computation_sequence(g: WeightedDualGraph, d: Cycle) -> bool:
    """Whether ``D`` occurs in some computation sequence.

    Greedy search: starting from any ``E_v`` in the support, keep adding
    vertices ``E_i`` with ``C . E_i > 0`` while staying below ``D``.  The step
    order does not matter for the maximal cycle reached, so one pass per start
    vertex decides the question.
    """
    if not d.is_positive():
        return False
    target = d.coeffs
    n = len(target)
    for start in range(n):
        if not target[start]:
            continue
        c = [0] * n
        c[start] = 1
        s = contact(g, c)
        progressed = True
        while progressed:
            progressed = False
            for i in range(n):
                if c[i] < target[i] and s[i] > 0:
                    c[i] += 1
                    s[i] += g.weights[i]
                    for j, m in g.adjacency[i]:
                        s[j] += m
                    progressed = True
                    break
        if list(c) == list(target):
            return True
    return False


def positive_roots(g: WeightedDualGraph, check: bool = True) -> List[Cycle]:
    """All cycles ``0 < D <= Z`` with ``p_a(D) = 0`` in lexicographic order.

    Exhaustive over the box ``[0, Z]``; each hit is cross-checked against the
    computation-sequence characterization when ``check`` is set.
    """
    hit = g._cache.get("roots")
    if hit is not None:
        return hit
    z = _require_rational(g)
    box = 1
    for c in z.coeffs:
        box *= c + 1
    bound = max_box()
    if box > bound:
        raise EnumerationTooLarge(f"root box has {box} candidates, limit {bound} (set SINGRAPH_MAX_BOX)")
    kd = [-w - 2 for w in g.weights]
    roots = []
    for coeffs in product(*(range(c + 1) for c in z.coeffs)):
        if not any(coeffs):
            continue
        twice = _dot_vec(g, coeffs, coeffs) + sum(a * b for a, b in zip(coeffs, kd))
        if twice == -2:
            d = Cycle(g, tuple(coeffs))
            if check and not in_computation_sequence(g, d):
                raise AssertionError(f"{d} has p_a = 0 but is not in a computation sequence")
            roots.append(d)
    g._cache["roots"] = roots
    return roots


def is_almost_reduced(g: WeightedDualGraph, d: Cycle) -> bool:
    """Coefficient at most one on every curve with ``E^2 < -2``."""
    return all(c <= 1 for c, w in zip(d.coeffs, g.weights) if w < -2)


def obstruction_number(g: WeightedDualGraph, d: Cycle) -> int:
    """``(D - D_red) . K``."""
    if not d.is_positive():
        raise GraphError("needs a positive cycle")
    return canonical_dot(g, d - d.reduction())


def blow_up_decomposition(g: WeightedDualGraph) -> List[WeightedDualGraph]:
    """Singularity graphs on the first blow-up of a rational singularity.

    These are the connected components spanned by curves with ``Z . E = 0``.
    """
    z = _require_rational(g)
    s = contact(g, z.coeffs)
    zero = [v for v, x in zip(g.vertices, s) if x == 0]
    if not zero:
        return []
    sub = subgraph(g, zero)
    return [subgraph(sub, comp) for comp in connected_components(sub)]


def resolution_profile(g: WeightedDualGraph) -> List[Tuple[int, int]]:
    """``(multiplicity, depth)`` of every singularity in the iterated blow-up."""
    out: List[Tuple[int, int]] = []

    def rec(h: WeightedDualGraph, depth: int) -> None:
        if depth > MAX_PROFILE_DEPTH:
            raise GraphError(f"blow-up recursion deeper than {MAX_PROFILE_DEPTH}")
        out.append((multiplicity(h), depth))
        for comp in blow_up_decomposition(h):
            if len(comp) >= len(h):
                raise GraphError("blow-up did not shrink the graph")
            rec(comp, depth + 1)

    rec(g, 0)
    return out


def positive_root_set(g: WeightedDualGraph) -> Set[Tuple[int, ...]]:
    return {d.coeffs for d in positive_roots(g)}
