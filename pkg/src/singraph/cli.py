"""Command-line front end.

Exit status: 0 on success, 1 on a domain error (for instance a graph that is
not negative definite), 2 on a usage error or a malformed input file.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO

from . import __version__
from .classify import classify, find_confining_subgraph, obstructing_subgraph
from .corpus import CORPUS_DIR, load_corpus, verify
from .cycles import (
    fundamental_cycle,
    is_rational,
    multiplicity,
    obstruction_number,
    positive_roots,
    resolution_profile,
)
from .deform import adjacencies, collection_graph, star_deformation
from .graph_core import GraphError, WeightedDualGraph, arithmetic_genus, dot, is_negative_definite
from .io import (
    FormatError,
    curve_from_json,
    curve_to_json,
    cycle_to_json,
    dumps,
    graph_from_json,
    graph_to_json,
    load_json,
    to_dot,
)
from .sandwich import (
    DecoratedCurve,
    SandwichUnknown,
    attach_arrows,
    decorated_curve_of,
    delta_const_candidates,
    graph_of,
    is_sandwiched,
    proximity_factorize,
    sandwich_augmentation,
)

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> Any:
    """A JSON file, falling back to the built-in corpus entry of that name."""
    p = Path(path)
    if not p.is_file():
        p = CORPUS_DIR / f"{path}.json"
        if Path(path).name != path or not p.is_file():
            raise UsageError(f"{path}: no such file or corpus entry")
    return load_json(p)


def read_graph(path: str) -> WeightedDualGraph:
    """A graph file, or a corpus entry holding a graph."""
    data = _read(path)
    if isinstance(data, dict) and "graph" in data:
        return graph_from_json(data["graph"], f"{path}: graph")
    return graph_from_json(data, path)


def read_curve(path: str) -> DecoratedCurve:
    """A decorated-curve file, or a corpus entry holding a curve."""
    data = _read(path)
    if isinstance(data, dict) and "curve" in data:
        return curve_from_json(data["curve"], f"{path}: curve")
    return curve_from_json(data, path)


def _weights_line(g: WeightedDualGraph) -> str:
    if len(g) == 0:
        return "(smooth)"
    body = " ".join(f"{v}:{w}" for v, w in zip(g.vertices, g.weights))
    es = " ".join(f"{a}-{b}" + (f"x{m}" if m != 1 else "") for a, b, m in g.edges())
    return f"{body}" + (f" | {es}" if es else "")


def _emit(args: argparse.Namespace, out: TextIO, data: Dict[str, Any], text: List[str],
          graph: Optional[WeightedDualGraph] = None, highlight: Optional[Sequence[str]] = None) -> None:
    if getattr(args, "json", False):
        out.write(dumps(data) + "\n")
    elif getattr(args, "dot", False) and graph is not None:
        out.write(to_dot(graph, highlight=highlight))
    else:
        out.write("\n".join(text) + "\n")


def _require_nd(g: WeightedDualGraph) -> None:
    if len(g) == 0 or not g.is_connected():
        raise GraphError("graph must be non-empty and connected")
    if not is_negative_definite(g):
        raise GraphError("intersection form is not negative definite")


# -- graph commands ---------------------------------------------------------------

def _summary(info: Dict[str, Any]) -> str:
    if not info.get("rational"):
        return "not rational; not simple"
    if info.get("rdp"):
        kind = "rational double point"
    elif info.get("rtp"):
        kind = "rational triple point"
    else:
        kind = f"rational singularity of multiplicity {info['multiplicity']}"
    if "simple" not in info:
        return kind
    return f"{kind}; {'simple' if info['simple'] else 'not simple'}"


def cmd_classify(args: argparse.Namespace, out: TextIO) -> int:
    g = read_graph(args.graph)
    info = classify(g)
    text = [_summary(info), f"rational: {info['rational']}"]
    if "multiplicity" in info:
        text.append(f"multiplicity: {info['multiplicity']}")
    if not info["minimal"]:
        text.append("minimal: False (some weight > -2); template checks skipped")
    else:
        text.append(f"Laufer type: {info['laufer_type']}")
        if info["rational"]:
            ob = info["obtainable"]
            text.append(f"obtainable from: {ob or 'none'}")
            if info["base_weights"]:
                text.append("  base weights: " + " ".join(f"{v}:{w}" for v, w in info["base_weights"].items()))
            text.append(f"conjecturally simple: {info['simple']}")
            text.append(f"sandwich obstruction: {info['sandwich_obstruction']}")
            if "witness" in info:
                w = info["witness"]
                detail = {k: v for k, v in w.items() if k != "kind"}
                text.append(f"non-simple witness: {w['kind']} {detail}")
    hl = info.get("witness", {}).get("path") or list(info.get("witness", {}).get("slots", {}).values())
    _emit(args, out, info, text, g, hl)
    return EXIT_OK


def cmd_zcycle(args: argparse.Namespace, out: TextIO) -> int:
    g = read_graph(args.graph)
    _require_nd(g)
    z, seq = fundamental_cycle(g)
    pa = arithmetic_genus(g, z)
    data = {
        "fundamental_cycle": cycle_to_json(z),
        "sequence": seq,
        "arithmetic_genus": pa,
        "self_intersection": dot(g, z, z),
        "reduced": z.is_reduced(),
        "rational": pa == 0,
    }
    if pa == 0:
        data["multiplicity"] = multiplicity(g)
    text = [
        "Z = " + " ".join(f"{v}:{c}" for v, c in z.as_dict().items()),
        f"Z.Z = {data['self_intersection']}, p_a(Z) = {pa}, reduced: {z.is_reduced()}",
        "computation sequence: " + " ".join(seq),
    ]
    _emit(args, out, data, text, g)
    return EXIT_OK


def cmd_roots(args: argparse.Namespace, out: TextIO) -> int:
    g = read_graph(args.graph)
    _require_nd(g)
    if not is_rational(g):
        raise GraphError("graph is not rational")
    roots = positive_roots(g)
    data = {
        "count": len(roots),
        "roots": [dict(cycle_to_json(r), obstruction=obstruction_number(g, r)) for r in roots],
    }
    text = [f"{len(roots)} positive roots"]
    text += ["  " + " ".join(f"{v}:{c}" for v, c in r.as_dict(nonzero=True).items()) for r in roots]
    _emit(args, out, data, text, g)
    return EXIT_OK


def cmd_adjacencies(args: argparse.Namespace, out: TextIO) -> int:
    g = read_graph(args.graph)
    _require_nd(g)
    adj = adjacencies(g, args.max_m)
    data = {
        "count": len(adj),
        "adjacencies": [
            {"graph": graph_to_json(a.graph), "collection": [cycle_to_json(d) for d in a.roots]} for a in adj
        ],
    }
    text = [f"{len(adj)} adjacencies"]
    for a in adj:
        text.append("  " + _weights_line(a.graph))
        for name, d in zip(a.graph.vertices, a.roots):
            text.append(f"    {name} = " + " + ".join(f"{c}*{v}" if c > 1 else v for v, c in d.as_dict(nonzero=True).items()))
    _emit(args, out, data, text)
    return EXIT_OK


def cmd_star(args: argparse.Namespace, out: TextIO) -> int:
    g = read_graph(args.graph)
    _require_nd(g)
    witness = find_confining_subgraph(g)
    if witness is None:
        raise GraphError("graph has no confining ~E6/~E7/~E8 subgraph")
    col = star_deformation(g, witness)
    star = collection_graph(col)
    data = {
        "type": witness.type,
        "slots": witness.slots,
        "collection": {n: cycle_to_json(d) for n, d in col.named().items()},
        "star": graph_to_json(star),
    }
    text = [f"confining subgraph {witness.type}"]
    for n, d in col.named().items():
        text.append(f"  {n} = " + " + ".join(f"{c}*{v}" if c > 1 else v for v, c in d.as_dict(nonzero=True).items())
                    + f"   ({n}^2 = {dot(g, d, d)})")
    text.append("star: " + _weights_line(star))
    _emit(args, out, data, text, star)
    return EXIT_OK


def cmd_blowup_profile(args: argparse.Namespace, out: TextIO) -> int:
    g = read_graph(args.graph)
    _require_nd(g)
    if not is_rational(g):
        raise GraphError("graph is not rational")
    prof = resolution_profile(g)
    quad = sum(1 for m, _ in prof if m == 4)
    data = {"profile": [{"multiplicity": m, "depth": d} for m, d in prof], "quadruple_points": quad}
    text = ["  " * d + f"multiplicity {m}" for m, d in prof]
    text.append(f"quadruple points: {quad}")
    _emit(args, out, data, text, g)
    return EXIT_OK


# -- sandwich commands -------------------------------------------------------------

def cmd_sandwich_build(args: argparse.Namespace, out: TextIO) -> int:
    g = read_graph(args.graph)
    _require_nd(g)
    if is_rational(g) and fundamental_cycle(g)[0].is_reduced():
        aug = attach_arrows(g, args.e0)
    else:
        if args.e0:
            raise GraphError("--e0 applies only to graphs with reduced fundamental cycle")
        aug = sandwich_augmentation(g)
        if aug is None:
            raise GraphError("graph is not sandwiched")
    curve = decorated_curve_of(aug, proximity_factorize(aug))
    data = curve_to_json(curve)
    text = [
        "arrows: " + " ".join(f"{v}:{k}" for v, k in aug.arrow_counts().items() if k),
        f"decorations: {curve.decorations()}",
        f"multiplicities m(i): {[curve.m(i) for i in range(len(curve.branches))]}",
        "intersections: " + str(curve.intersection_matrix()),
    ]
    if args.json:
        out.write(dumps(data) + "\n")
    elif args.dot:
        out.write(to_dot(aug.graph, highlight=list(aug.arrows)))
    else:
        out.write("\n".join(text) + "\n")
    return EXIT_OK


def cmd_sandwich_graph(args: argparse.Namespace, out: TextIO) -> int:
    c = read_curve(args.curve)
    graphs = graph_of(c)
    data = {"graphs": [graph_to_json(h) for h in graphs]}
    if args.dot:
        for k, h in enumerate(graphs):
            out.write(to_dot(h, name=f"X{k + 1}"))
        return EXIT_OK
    text = [_weights_line(h) for h in graphs] or ["(smooth)"]
    _emit(args, out, data, text)
    return EXIT_OK


def cmd_sandwich_deform(args: argparse.Namespace, out: TextIO) -> int:
    c = read_curve(args.curve)
    cands = delta_const_candidates(c, args.depth)
    items = []
    text = [f"{len(cands)} combinatorial candidates"]
    for cand in cands:
        graphs = cand.graphs()
        items.append({
            "label": cand.label,
            "curve_types": list(cand.curve_types()),
            "germs": [curve_to_json(gm) for gm in cand.germs],
            "graphs": [graph_to_json(h) for h in graphs],
        })
        types = " + ".join(cand.curve_types()) or "smooth"
        text.append(f"  [{cand.label}] {types}: " + ("; ".join(_weights_line(h) for h in graphs) or "(smooth)"))
    _emit(args, out, {"candidates": items}, text)
    return EXIT_OK


def cmd_sandwich_check(args: argparse.Namespace, out: TextIO) -> int:
    g = read_graph(args.graph)
    _require_nd(g)
    data: Dict[str, Any] = {}
    if is_rational(g):
        sub = obstructing_subgraph(g)
        data["sandwich_obstruction"] = sub is not None
        data["obstructing_subgraph"] = sub
    try:
        data["sandwiched"] = is_sandwiched(g, args.budget)
    except SandwichUnknown as exc:
        data["sandwiched"] = "unknown"
        data["note"] = str(exc)
    text = [f"sandwiched: {data['sandwiched']}"]
    if "sandwich_obstruction" in data:
        text.append(f"obstruction: {data['sandwich_obstruction']}"
                    + (f" (subgraph {' '.join(data['obstructing_subgraph'])})" if data["obstructing_subgraph"] else ""))
    if "note" in data:
        text.append(data["note"])
    _emit(args, out, data, text, g, data.get("obstructing_subgraph"))
    return EXIT_OK


# -- corpus -----------------------------------------------------------------------

def cmd_corpus_verify(args: argparse.Namespace, out: TextIO) -> int:
    results = []
    failed = 0
    for e, bad in verify(Path(args.dir), args.names or None):
        results.append({"name": e.name, "family": e.family, "ok": not bad, "mismatches": bad})
        failed += bool(bad)
    if args.json:
        out.write(dumps({"entries": results, "failed": failed}) + "\n")
    else:
        for r in results:
            out.write(f"{'PASS' if r['ok'] else 'FAIL'} {r['name']}\n")
            for m in r["mismatches"]:
                out.write(f"    {m}\n")
        out.write(f"{len(results) - failed}/{len(results)} corpus entries verified\n")
    return EXIT_OK if failed == 0 else EXIT_DOMAIN


def cmd_corpus_list(args: argparse.Namespace, out: TextIO) -> int:
    entries = load_corpus(Path(args.dir))
    if args.json:
        out.write(dumps([{"name": e.name, "kind": e.kind, "family": e.family} for e in entries]) + "\n")
    else:
        for e in entries:
            out.write(f"{e.name:28s} {e.kind:6s} {e.family}\n")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def _formats(p: argparse.ArgumentParser, dot: bool = True) -> None:
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--json", action="store_true", help="machine-readable JSON output")
    if dot:
        grp.add_argument("--dot", action="store_true", help="emit the relevant graph in DOT")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="singraph", description="Resolution graphs of rational surface singularities.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def graph_cmd(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("graph", help="graph JSON file (or corpus entry)")
        _formats(p)
        p.set_defaults(func=fn)
        return p

    graph_cmd("classify", cmd_classify, "rationality, Laufer type, simpleness and sandwich verdicts")
    graph_cmd("zcycle", cmd_zcycle, "fundamental cycle and its computation sequence")
    graph_cmd("roots", cmd_roots, "positive roots")
    p = graph_cmd("adjacencies", cmd_adjacencies, "adjacencies on the Artin component")
    p.add_argument("--max-m", type=int, default=None, help="largest collection size (default: number of vertices)")
    graph_cmd("star", cmd_star, "star deformation of a confining graph")
    graph_cmd("blowup-profile", cmd_blowup_profile, "multiplicities of the iterated blow-up")

    sw = sub.add_parser("sandwich", help="decorated curves and sandwiched singularities")
    ssub = sw.add_subparsers(dest="action", metavar="ACTION")
    ssub.required = True
    p = ssub.add_parser("build", help="decorated curve of a sandwiched graph")
    p.add_argument("graph")
    p.add_argument("--e0", default=None, help="end vertex receiving one arrow less (default: least end vertex)")
    _formats(p)
    p.set_defaults(func=cmd_sandwich_build)
    p = ssub.add_parser("graph", help="graphs of X(C,l) for a decorated curve")
    p.add_argument("curve")
    _formats(p)
    p.set_defaults(func=cmd_sandwich_graph)
    p = ssub.add_parser("deform", help="combinatorial delta-constant candidates")
    p.add_argument("curve")
    p.add_argument("--depth", type=int, default=None, help="maximal number of singular points per fibre")
    _formats(p, dot=False)
    p.set_defaults(func=cmd_sandwich_deform)
    p = ssub.add_parser("check", help="decide whether a graph is sandwiched")
    p.add_argument("graph")
    p.add_argument("--budget", type=int, default=None, help="arrows per vertex (default: multiplicity)")
    _formats(p)
    p.set_defaults(func=cmd_sandwich_check)

    cp = sub.add_parser("corpus", help="golden corpus")
    csub = cp.add_subparsers(dest="action", metavar="ACTION")
    csub.required = True
    p = csub.add_parser("verify", help="recompute every golden value")
    p.add_argument("names", nargs="*", help="restrict to these entries")
    p.add_argument("--dir", default=str(CORPUS_DIR))
    _formats(p, dot=False)
    p.set_defaults(func=cmd_corpus_verify)
    p = csub.add_parser("list", help="list corpus entries")
    p.add_argument("--dir", default=str(CORPUS_DIR))
    _formats(p, dot=False)
    p.set_defaults(func=cmd_corpus_list)
    return ap


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, FormatError) as exc:
        print(f"singraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, SandwichUnknown) as exc:
        print(f"singraph: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    raise SystemExit(main())
