"""Golden corpus: named graphs and decorated curves with their expected invariants.

Each entry is stored as one JSON file under ``data/corpus``::

    {"name": "E8", "kind": "graph", "family": "ADE",
     "graph": {...}, "expected": {...}}

Curve entries carry ``"curve"`` instead of ``"graph"``.  ``verify`` recomputes
every expected field and reports the differences.  Running this module as a
script rewrites the files from the builders below.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .classify import TAUT_TEMPLATES, LauferTag, laufer_type, is_rdp, is_rtp, obtainable_from_base, sandwich_obstruction
from .cycles import fundamental_cycle, is_rational, multiplicity, resolution_profile
from .graph_core import GraphError, WeightedDualGraph, is_negative_definite
from .io import curve_from_json, curve_to_json, dumps, graph_from_json, graph_to_json, load_json
from .sandwich import (
    DecoratedCurve,
    SandwichUnknown,
    attach_arrows,
    decorated_curve_of,
    graph_of,
    is_sandwiched,
    monomial_curve,
    recipe_iii3,
    recipe_iii4,
)

__all__ = [
    "CORPUS_DIR",
    "Entry",
    "dynkin",
    "n_star",
    "table1_instance",
    "builtin_entries",
    "expected_for",
    "load_corpus",
    "verify",
    "write_corpus",
]

CORPUS_DIR = Path(__file__).resolve().parent / "data" / "corpus"

Subject = Union[WeightedDualGraph, DecoratedCurve]


@dataclass(frozen=True)
class Entry:
    name: str
    family: str
    subject: Subject
    expected: Optional[Dict[str, Any]] = None

    @property
    def kind(self) -> str:
        return "graph" if isinstance(self.subject, WeightedDualGraph) else "curve"


# -- builders -------------------------------------------------------------------

def dynkin(kind: str, n: int) -> WeightedDualGraph:
    """All-(-2) Dynkin graph of type A_n, D_n (n >= 4) or E_n (n = 6, 7, 8)."""
    if kind == "A" and n >= 1:
        return WeightedDualGraph.chain([-2] * n)
    if kind == "D" and n >= 4:
        return WeightedDualGraph.star(-2, [[-2], [-2], [-2] * (n - 3)])
    if kind == "E" and n in (6, 7, 8):
        return WeightedDualGraph.star(-2, [[-2], [-2, -2], [-2] * (n - 4)])
    raise GraphError(f"no Dynkin graph {kind}{n}")


def n_star(n: int) -> WeightedDualGraph:
    """Central -4 vertex with four arms of n-1 vertices of weight -2."""
    if n < 1:
        raise GraphError("n must be positive")
    return WeightedDualGraph.star(-4, [[-2] * (n - 1)] * 4)


_TOKEN_WEIGHT = {"dot": -2, "sq": -3, "m2": -2}


def table1_instance(tag: LauferTag, extra: Optional[Dict[str, Sequence[int]]] = None,
                    deepen: Optional[Dict[str, Sequence[int]]] = None, center: Optional[int] = None) -> WeightedDualGraph:
    """A taut template with every slot at its least negative weight.

    ``extra[arm]`` appends chain vertices with the given weights to arms that
    may grow; ``deepen[arm]`` overrides weights of the fixed slots (entries of
    0 keep the minimal weight).  ``center`` overrides the central weight.
    """
    if tag is LauferTag.I_II:
        raise GraphError("chains are built with WeightedDualGraph.chain")
    ctoken, slots = TAUT_TEMPLATES[tag]
    extra = extra or {}
    deepen = deepen or {}
    arms = []
    for name in ("left", "down", "right"):
        fixed, more = slots[name]
        ws = [_TOKEN_WEIGHT[t] for t in fixed]
        for k, w in enumerate(deepen.get(name, ())):
            if w:
                ws[k] = w
        tail = list(extra.get(name, ()))
        if tail and not more:
            raise GraphError(f"arm {name!r} of {tag.value} has fixed length")
        arms.append(ws + tail)
    return WeightedDualGraph.star(_TOKEN_WEIGHT[ctoken] if center is None else center, arms)


def _x37_11() -> WeightedDualGraph:
    return WeightedDualGraph.chain([-4, -2, -3, -2, -2])


def _x37_11_curve() -> DecoratedCurve:
    return decorated_curve_of(attach_arrows(_x37_11()))


def builtin_entries() -> List[Entry]:
    out: List[Entry] = []
    for n in range(1, 9):
        out.append(Entry(f"A{n}", "ADE", dynkin("A", n)))
    for n in (4, 5, 6):
        out.append(Entry(f"D{n}", "ADE", dynkin("D", n)))
    for n in (6, 7, 8):
        out.append(Entry(f"E{n}", "ADE", dynkin("E", n)))

    chains = {
        "chain_-3": [-3],
        "chain_-5": [-5],
        "chain_-2_-3_-2": [-2, -3, -2],
        "chain_-3_-2_-2_-4": [-3, -2, -2, -4],
        "X37_11": [-4, -2, -3, -2, -2],
    }
    for name, ws in chains.items():
        out.append(Entry(name, "I/II", WeightedDualGraph.chain(ws)))

    for tag in list(LauferTag)[1:]:
        out.append(Entry(f"{tag.value}_min", tag.value, table1_instance(tag)))
    out.append(Entry("III.1_long", "III.1", table1_instance(LauferTag.III_1, {"left": [-2], "right": [-3, -2]})))
    out.append(Entry("III.1_deep", "III.1", table1_instance(LauferTag.III_1, deepen={"down": [-4]}, center=-5)))
    out.append(Entry("III.2_long", "III.2", table1_instance(LauferTag.III_2, {"right": [-2, -2]})))
    out.append(Entry("III.3_min_long", "III.3", table1_instance(LauferTag.III_3, {"right": [-2]})))
    out.append(Entry("III.5_long", "III.5", table1_instance(LauferTag.III_5, {"right": [-2]})))
    out.append(Entry("III.6_deep", "III.6", table1_instance(LauferTag.III_6, deepen={"left": [0, -3]})))
    out.append(Entry("III.7_deep", "III.7", table1_instance(LauferTag.III_7, deepen={"right": [0, -4]})))

    table2 = {
        "E6~_a": WeightedDualGraph.star(-2, [[-3, -2], [-2, -2], [-2, -2]]),
        "E6~_b": WeightedDualGraph.star(-2, [[-2, -2], [-2, -2], [-3, -3]]),
        "E7~_a": WeightedDualGraph.star(-2, [[-3], [-2, -2, -2], [-2, -2, -2]]),
        "E7~_b": WeightedDualGraph.star(-2, [[-2], [-2, -2, -2], [-2, -3, -2]]),
        "E8~_a": WeightedDualGraph.star(-2, [[-2], [-2, -3], [-2, -2, -2, -2, -2]]),
        "E8~_b": WeightedDualGraph.star(-2, [[-2], [-2, -2], [-2, -2, -2, -3, -2]]),
    }
    for name, g in table2.items():
        out.append(Entry(name, "confining", g))

    for n in range(1, 5):
        out.append(Entry(f"star{n}", "n-star", n_star(n)))

    out.append(Entry("X37_11_curve", "curve", _x37_11_curve()))
    out.append(Entry("cusp_l4", "curve", monomial_curve(2, 3, 4)))
    out.append(Entry("cusp_l6", "curve", monomial_curve(2, 3, 6)))
    out.append(Entry("recipe_iii3_k1_s0", "III.3 recipe", recipe_iii3(1, 0)))
    out.append(Entry("recipe_iii3_k2_s1", "III.3 recipe", recipe_iii3(2, 1)))
    out.append(Entry("recipe_iii3_k2_s1_full", "III.3 recipe", recipe_iii3(2, 1, left=[1, 2], short=1, right=[1, 2])))
    out.append(Entry("recipe_iii4_E6_k2", "III.4 recipe", recipe_iii4("E6", 2)))
    out.append(Entry("recipe_iii4_E6_k3_full", "III.4 recipe", recipe_iii4("E6", 3, first=1, second=1, right=[2, 3])))
    out.append(Entry("recipe_iii4_E8_k2", "III.4 recipe", recipe_iii4("E8", 2)))
    out.append(Entry("recipe_iii4_E8_k3_full", "III.4 recipe", recipe_iii4("E8", 3, first=1, right=[2])))
    out.append(Entry("recipe_iii4_x3_k3", "III.4 recipe", recipe_iii4("x3", 3)))
    out.append(Entry("recipe_iii4_x3_k3_smooth", "III.4 recipe", recipe_iii4("x3", 3, smooth=[2])))
    return out


# -- expected values -----------------------------------------------------------

def _sandwiched(g: WeightedDualGraph) -> Union[bool, str]:
    try:
        return is_sandwiched(g)
    except SandwichUnknown:
        return "unknown"


def _graph_expected(g: WeightedDualGraph) -> Dict[str, Any]:
    nd = is_negative_definite(g)
    out: Dict[str, Any] = {"negative_definite": nd}
    if not nd:
        return out
    rational = is_rational(g)
    z, _ = fundamental_cycle(g)
    out["rational"] = rational
    out["fundamental_cycle"] = z.as_dict()
    out["laufer_type"] = laufer_type(g).name if g.is_minimal() else None
    out["rdp"] = is_rdp(g)
    out["rtp"] = is_rtp(g)
    if rational:
        ob = obtainable_from_base(g)
        profile = resolution_profile(g)
        out["multiplicity"] = multiplicity(g)
        out["obtainable"] = ob.base.value if ob.base else None
        out["simple"] = bool(ob)
        out["quadruple_points"] = sum(1 for m, _ in profile if m == 4)
        out["sandwich_obstruction"] = sandwich_obstruction(g)
        out["sandwiched"] = _sandwiched(g)
    return out


def _curve_expected(c: DecoratedCurve) -> Dict[str, Any]:
    graphs = graph_of(c)
    return {
        "branches": len(c.branches),
        "decorations": c.decorations(),
        "m": [c.m(i) for i in range(len(c.branches))],
        "intersections": c.intersection_matrix(),
        "delta": c.delta(),
        "graphs": [graph_to_json(g) for g in graphs],
        "laufer_types": [laufer_type(g).name if g.is_minimal() else None for g in graphs],
    }


def expected_for(subject: Subject) -> Dict[str, Any]:
    if isinstance(subject, WeightedDualGraph):
        return _graph_expected(subject)
    return _curve_expected(subject)


# -- files ------------------------------------------------------------------------

def entry_to_json(e: Entry) -> Dict[str, Any]:
    data: Dict[str, Any] = {"name": e.name, "kind": e.kind, "family": e.family}
    if e.kind == "graph":
        data["graph"] = graph_to_json(e.subject)  # type: ignore[arg-type]
    else:
        data["curve"] = curve_to_json(e.subject)  # type: ignore[arg-type]
    data["expected"] = e.expected if e.expected is not None else expected_for(e.subject)
    return data


def entry_from_json(data: Any, where: str) -> Entry:
    kind = data.get("kind") if isinstance(data, dict) else None
    if kind == "graph":
        subject: Subject = graph_from_json(data.get("graph"), f"{where}.graph")
    elif kind == "curve":
        subject = curve_from_json(data.get("curve"), f"{where}.curve")
    else:
        raise GraphError(f"{where}.kind: expected 'graph' or 'curve', got {kind!r}")
    return Entry(str(data.get("name", where)), str(data.get("family", "")), subject, data.get("expected", {}))


def write_corpus(directory: Path = CORPUS_DIR, entries: Optional[Sequence[Entry]] = None) -> List[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for e in entries if entries is not None else builtin_entries():
        p = directory / f"{e.name}.json"
        p.write_text(dumps(entry_to_json(e)) + "\n", encoding="utf-8")
        paths.append(p)
    return paths


def load_corpus(directory: Path = CORPUS_DIR) -> List[Entry]:
    return [entry_from_json(load_json(p), str(p)) for p in sorted(directory.glob("*.json"))]


def verify(directory: Path = CORPUS_DIR, names: Optional[Sequence[str]] = None) -> Iterator[Tuple[Entry, List[str]]]:
    """Yield each entry with the list of expected fields that disagree."""
    for e in load_corpus(directory):
        if names and e.name not in names:
            continue
        got = expected_for(e.subject)
        bad = []
        for key, want in (e.expected or {}).items():
            if key not in got:
                bad.append(f"{key}: not computed")
            elif got[key] != want:
                bad.append(f"{key}: expected {want!r}, got {got[key]!r}")
        yield e, bad


def _main(argv: Optional[Sequence[str]] = None) -> int:
    ap = argparse.ArgumentParser(description="rewrite the golden corpus files")
    ap.add_argument("--dir", type=Path, default=CORPUS_DIR)
    args = ap.parse_args(argv)
    for p in write_corpus(args.dir):
        print(p)
    return 0


if __name__ == "__main__":
    raise SystemExit(_main())
