from __future__ import annotations

from itertools import permutations

import pytest

from singraph.classify import (
    TAUT_TEMPLATES,
    Base,
    ConfiningSubgraph,
    HighValencyStar,
    LauferTag,
    TwoTripleMerge,
    _arm_matches,
    _fits,
    classify,
    find_confining_subgraph,
    is_conjecturally_simple,
    is_rdp,
    is_rtp,
    laufer_type,
    nonsimple_witness,
    obstructing_subgraph,
    obtainable_from_base,
    sandwich_obstruction,
    star_arms,
)
from singraph.corpus import dynkin, n_star, table1_instance
from singraph.cycles import is_rational
from singraph.graph_core import GraphError, WeightedDualGraph, is_negative_definite, merge_chain, valency
from singraph.universe import weighted_trees

W = WeightedDualGraph
FORBIDDEN = W.star(-2, [[-2, -2], [-2, -2], [-3]])


def _matching_tags(g: WeightedDualGraph):
    """Every taut template the graph fits (not just the first)."""
    if g.is_chain():
        return [LauferTag.I_II]
    shape = star_arms(g)
    if shape is None:
        return []
    c, arms = shape
    arm_w = [[g.weight(v) for v in a] for a in arms]
    out = []
    for tag, (ctoken, slots) in TAUT_TEMPLATES.items():
        if not _fits(ctoken, g.weight(c)):
            continue
        pats = list(slots.values())
        if any(all(_arm_matches(arm_w[p[k]], pats[k]) for k in range(3)) for p in permutations(range(3))):
            out.append(tag)
    return out


def test_laufer_type_examples():
    assert laufer_type(W.chain([-4, -2, -3, -2, -2])).tag is LauferTag.I_II
    g = W.star(-3, [[-2, -5], [-4], [-2, -2, -2]])
    lt = laufer_type(g)
    assert lt.tag is LauferTag.III_1 and lt.witness["center"] == "c"
    assert laufer_type(W.star(-2, [[-2, -2], [-2, -2], [-2, -2]])).tag is None
    with pytest.raises(GraphError):
        laufer_type(W.chain([-1, -2]))


def test_minimal_instances_get_their_own_type():
    for tag in list(LauferTag)[1:]:
        assert laufer_type(table1_instance(tag)).tag is tag


def test_iii2_arm_lengths():
    # III.2 has two arms of length one; D5 fits it, E6 does not
    assert laufer_type(W.star(-2, [[-2, -2], [-2], [-2]])).tag is LauferTag.III_2
    assert laufer_type(W.star(-2, [[-2, -2], [-2, -2], [-2]])).tag is LauferTag.III_7


def test_rdp_rtp():
    assert is_rdp(dynkin("E", 7))
    assert not is_rdp(W.chain([-3]))
    assert is_rtp(W.chain([-2, -3, -2, -2]))
    assert is_rtp(W.star(-3, [[-2], [-2], [-2]]))
    assert not is_rtp(dynkin("D", 5))


def test_obtainable_examples():
    for kind, n in [("A", 3), ("D", 5), ("E", 6), ("E", 8)]:
        ob = obtainable_from_base(dynkin(kind, n))
        assert ob.base is Base.RDP and set(ob.weights.values()) == {-2}
    assert obtainable_from_base(W.chain([-4, -2, -3, -2, -2])).base is Base.RDP
    # the forbidden graph for sandwiching is an E6 with one -3
    assert obtainable_from_base(FORBIDDEN).base is Base.RDP
    ob = obtainable_from_base(W.star(-2, [[-3, -2], [-2, -2], [-2]]))
    assert ob.base is Base.RDP


def test_rtp_witness_places_the_minus_three_on_a_deep_vertex():
    g = W.star(-2, [[-2, -2], [-2, -2], [-2, -3]])  # ~E6 shape, one tip -3, not rational
    with pytest.raises(GraphError):
        obtainable_from_base(g)
    g = W.star(-3, [[-2, -2], [-2, -3], [-2, -2, -2]])
    ob = obtainable_from_base(g)
    assert ob.base is Base.RTP
    assert sorted(ob.weights.values()).count(-3) == 1
    deep = [v for v, w in ob.weights.items() if w == -3][0]
    assert g.weight(deep) <= -3


def test_conjecturally_simple_examples():
    assert is_conjecturally_simple(dynkin("E", 8))
    for n in (2, 3, 4):
        assert not is_conjecturally_simple(n_star(n))
    assert not is_conjecturally_simple(W.star(-2, [[-2], [-2, -2], [-2, -2, -2, -3, -2]]))
    with pytest.raises(GraphError):
        is_conjecturally_simple(W.star(-2, [[-2, -2], [-2, -2], [-2, -2]]))


def test_nonsimple_witness_kinds():
    w = nonsimple_witness(n_star(2))
    assert isinstance(w, HighValencyStar) and w.vertex == "c"
    two = W({"a": -2, "b": -2, "x": -2, "y": -3, "p": -3, "q": -3, "r": -2},
            [("a", "x"), ("b", "x"), ("x", "r"), ("r", "y"), ("y", "p"), ("y", "q")])
    assert is_rational(two) and not obtainable_from_base(two)
    w = nonsimple_witness(two)
    assert isinstance(w, TwoTripleMerge) and w.path == ("x", "r", "y")
    assert valency(merge_chain(two, list(w.path), "m"), "m") >= 4
    e6 = W.star(-2, [[-3, -2], [-2, -2], [-2, -2]])
    w = nonsimple_witness(e6)
    assert isinstance(w, ConfiningSubgraph) and w.type == "E6~"
    with pytest.raises(GraphError):
        nonsimple_witness(dynkin("E", 6))


def test_two_triple_merge_always_produces_a_star():
    found = 0
    for n in range(6, 9):
        for g in weighted_trees(n, [-2, -3]):
            if sum(1 for v in g.vertices if len(g.neighbors(v)) == 3) < 2:
                continue
            if not is_negative_definite(g) or not is_rational(g) or obtainable_from_base(g):
                continue
            w = nonsimple_witness(g)
            assert isinstance(w, TwoTripleMerge)
            assert valency(merge_chain(g, list(w.path), "m"), "m") >= 4
            found += 1
    assert found > 0


def test_confining_subgraph_respects_table2_weights():
    # the E7~ template needs -2 next to the center on both long arms
    g = W.star(-2, [[-2], [-3, -2, -2], [-2, -2, -2]])
    conf = find_confining_subgraph(g)
    assert conf is None or conf.type != "E7~" or g.weight(conf.slots["E2,1"]) == -2


def test_sandwich_obstruction_examples():
    assert sandwich_obstruction(dynkin("D", 4))
    assert sandwich_obstruction(FORBIDDEN)
    for ws in ([-2], [-4, -2, -3, -2, -2], [-2] * 6, [-5, -3]):
        assert not sandwich_obstruction(W.chain(ws))
    assert sorted(obstructing_subgraph(dynkin("E", 8))) == ["a1_1", "a2_1", "a3_1", "c"]


def test_classify_report():
    info = classify(dynkin("E", 8))
    assert info["rdp"] and info["simple"] and info["laufer_type"] == "III.9"
    info = classify(n_star(3))
    assert info["witness"]["kind"] == "HighValencyStar"
    with pytest.raises(GraphError):
        classify(W.star(-2, [[-2, -2], [-2, -2], [-2, -2]]))


def test_templates_are_mutually_exclusive_and_iii5_up_are_obstructed():
    late = {LauferTag.III_5, LauferTag.III_6, LauferTag.III_7, LauferTag.III_8, LauferTag.III_9}
    seen = set()
    for n in range(1, 8):
        for g in weighted_trees(n, [-2, -3, -4]):
            if not is_negative_definite(g):
                continue
            tags = _matching_tags(g)
            assert len(tags) <= 1, (g, tags)
            if tags and tags[0] in late and is_rational(g):
                assert sandwich_obstruction(g)
                seen.add(tags[0])
    # III.6 and III.9 need eight and nine vertices
    assert seen == late - {LauferTag.III_6, LauferTag.III_9}
