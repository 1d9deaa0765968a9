"""Exhaustive enumeration of weighted trees up to isomorphism.

Free trees are generated rooted at their centroid, so every isomorphism class
of vertex-weighted trees appears exactly once.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple

from .graph_core import WeightedDualGraph

__all__ = ["rooted_trees", "weighted_trees", "tree_from_code"]

Code = Tuple[int, tuple]


def _multisets(pool: Sequence[Tuple[int, Code]], total: int, start: int = 0) -> Iterator[List[Code]]:
    """Non-decreasing selections from ``pool`` (pairs ``(size, code)``) of total size ``total``."""
    if total == 0:
        yield []
        return
    for k in range(start, len(pool)):
        size, code = pool[k]
        if size > total:
            continue
        for rest in _multisets(pool, total - size, k):
            yield [code] + rest


@lru_cache(maxsize=None)
def rooted_trees(size: int, weights: Tuple[int, ...]) -> Tuple[Code, ...]:
    """Canonical codes ``(weight, children)`` of rooted weighted trees."""
    if size < 1:
        return ()
    pool = [(s, c) for s in range(1, size) for c in rooted_trees(s, weights)]
    out = []
    for w in weights:
        for kids in _multisets(pool, size - 1):
            out.append((w, tuple(kids)))
    return tuple(out)


def tree_from_code(codes: Sequence[Code], prefix: str = "v") -> WeightedDualGraph:
    """Graph of one rooted code, or of two codes whose roots are joined."""
    w = {}
    edges = []
    counter = [0]

    def build(code: Code, parent) -> str:
        counter[0] += 1
        v = f"{prefix}{counter[0]}"
        w[v] = code[0]
        if parent is not None:
            edges.append((parent, v))
        for kid in code[1]:
            build(kid, v)
        return v

    roots = [build(c, None) for c in codes]
    if len(roots) == 2:
        edges.append((roots[0], roots[1]))
    return WeightedDualGraph(w, edges)


def _size(code: Code) -> int:
    return 1 + sum(_size(k) for k in code[1])


def weighted_trees(n: int, weights: Sequence[int]) -> Iterator[WeightedDualGraph]:
    """All trees on ``n`` vertices with weights from ``weights``, one per class."""
    ws = tuple(sorted(set(weights), reverse=True))
    if n == 1:
        for w in ws:
            yield tree_from_code([(w, ())])
        return
    half = (n - 1) // 2
    pool = [(s, c) for s in range(1, half + 1) for c in rooted_trees(s, ws)]
    for w in ws:
        for kids in _multisets(pool, n - 1):
            yield tree_from_code([(w, tuple(kids))])
    if n % 2 == 0:
        side = rooted_trees(n // 2, ws)
        for i, a in enumerate(side):
            for b in side[i:]:
                yield tree_from_code([a, b])
