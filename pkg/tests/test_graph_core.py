from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singraph.graph_core import (
    GraphError,
    WeightedDualGraph,
    arithmetic_genus,
    blow_up_smooth_point,
    canonical_dot,
    canonical_form,
    contract,
    dot,
    ends,
    is_isomorphic,
    is_negative_definite,
    merge_chain,
    subgraph,
    valency,
)

from oracles import det, negative_definite

W = WeightedDualGraph
X37 = [-4, -2, -3, -2, -2]


def d4() -> WeightedDualGraph:
    return W.star(-2, [[-2], [-2], [-2]])


def e8_tilde() -> WeightedDualGraph:
    return W.star(-2, [[-2], [-2, -2], [-2, -2, -2, -2, -2]])


# -- construction ---------------------------------------------------------------

def test_vertices_sorted_naturally():
    g = W({"v10": -2, "v2": -2, "v1": -3}, [("v1", "v2"), ("v2", "v10")])
    assert g.vertices == ("v1", "v2", "v10")
    assert g.weight("v1") == -3


def test_rejects_bad_input():
    with pytest.raises(GraphError):
        W({"a": -2}, [("a", "b")])
    with pytest.raises(GraphError):
        W({"a": -2}, [("a", "a")])
    with pytest.raises(GraphError):
        W({"a": -2.0})
    with pytest.raises(GraphError):
        W({"a": -2}, genus={"a": 1})


def test_intersection_matrix_symmetric_with_weights_on_diagonal():
    g = W({"a": -3, "b": -2, "c": -1}, [("a", "b", 2), ("b", "c")])
    m = g.intersection_matrix()
    assert m == [[-3, 2, 0], [2, -2, 1], [0, 1, -1]]
    assert g.mult("b", "a") == 2


# -- dot, canonical_dot, arithmetic genus ---------------------------------------------

def test_dot_examples():
    g = W({"e": -5})
    e = g.basis("e")
    assert dot(g, e, e) == -5
    g2 = W.chain([-2, -3])
    assert dot(g2, g2.basis("v1"), g2.basis("v2")) == 1
    d = d4()
    z = d.cycle({"c": 2, "a1_1": 1, "a2_1": 1, "a3_1": 1})
    assert dot(d, z, z) == -2


def test_canonical_dot_examples():
    assert canonical_dot(W({"e": -2}), W({"e": -2}).basis("e")) == 0
    assert canonical_dot(W({"e": -3}), W({"e": -3}).basis("e")) == 1
    g = W.chain(X37)
    assert canonical_dot(g, g.reduced_cycle()) == 3


def test_arithmetic_genus_examples():
    for w in (-1, -2, -7):
        g = W({"e": w})
        assert arithmetic_genus(g, g.basis("e")) == 0
    d = d4()
    z = d.cycle({"c": 2, "a1_1": 1, "a2_1": 1, "a3_1": 1})
    assert arithmetic_genus(d, z) == 0
    # the ~E8 multiplicities 2 4 6 5 4 3 2 1 with 3 below the center
    g = e8_tilde()
    z = g.cycle({"a3_5": 1, "a3_4": 2, "a3_3": 3, "a3_2": 4, "a3_1": 5, "c": 6, "a2_1": 4, "a2_2": 2, "a1_1": 3})
    assert arithmetic_genus(g, z) == 1


def test_arithmetic_genus_rejects_zero():
    g = W({"e": -2})
    with pytest.raises(GraphError):
        arithmetic_genus(g, g.cycle())


def _small_graph(rng: random.Random) -> WeightedDualGraph:
    n = rng.randint(1, 5)
    ws = {f"v{i}": rng.randint(-5, -1) for i in range(1, n + 1)}
    edges = [(f"v{rng.randint(1, i - 1)}", f"v{i}", rng.randint(1, 2)) for i in range(2, n + 1)]
    return W(ws, edges)


def test_genus_additivity_and_bilinearity():
    rng = random.Random(7)
    for _ in range(300):
        g = _small_graph(rng)
        n = len(g)
        c = g.cycle([rng.randint(0, 3) for _ in range(n)])
        d = g.cycle([rng.randint(0, 3) for _ in range(n)])
        e = g.cycle([rng.randint(0, 3) for _ in range(n)])
        assert dot(g, c, d) == dot(g, d, c)
        assert dot(g, c + d, e) == dot(g, c, e) + dot(g, d, e)
        if c.is_positive() and d.is_positive():
            assert arithmetic_genus(g, c + d) == arithmetic_genus(g, c) + arithmetic_genus(g, d) + dot(g, c, d) - 1


# -- negative definiteness --------------------------------------------------------

def test_negative_definite_examples():
    assert is_negative_definite(W({"e": -2}))
    assert not is_negative_definite(e8_tilde())
    assert is_negative_definite(W.chain(X37))


def test_negative_definite_matches_determinant_oracle():
    rng = random.Random(11)
    for _ in range(300):
        g = _small_graph(rng)
        assert is_negative_definite(g) == negative_definite(g.intersection_matrix())


def test_negative_definite_false_for_nonnegative_weight_and_invariant_under_relabel():
    g = W({"a": 0, "b": -5}, [("a", "b")])
    assert not is_negative_definite(g)
    h = W.chain(X37)
    assert is_negative_definite(h.relabel({"v1": "z", "v5": "a"}))
    assert det([[-x for x in row] for row in h.intersection_matrix()]) == 37


# -- surgery ----------------------------------------------------------------------

def test_blow_up_then_contract_is_identity():
    g = W({"e": -2})
    b = blow_up_smooth_point(g, "e", "n")
    assert b.weight_map() == {"e": -3, "n": -1}
    assert b.mult("e", "n") == 1
    assert contract(b, "n") == g


def test_iterated_blow_up_gives_chain():
    g = W({"e": -2})
    last = "e"
    for k in range(1, 4):
        g = blow_up_smooth_point(g, last, f"n{k}")
        last = f"n{k}"
    assert g.is_chain()
    assert sorted(g.weights) == [-3, -2, -2, -1]


@given(st.lists(st.integers(-6, -1), min_size=1, max_size=6), st.data())
@settings(max_examples=60, deadline=None)
def test_contract_inverts_blow_up(weights, data):
    g = W.chain(weights)
    v = data.draw(st.sampled_from(list(g.vertices)))
    assert contract(blow_up_smooth_point(g, v, "new"), "new") == g


def test_contract_examples():
    assert contract(W.chain([-3, -1]), "v2") == W({"v1": -2})
    h = contract(W.chain([-2, -1, -2]), "v2")
    assert h.weight_map() == {"v1": -1, "v3": -1}
    assert h.mult("v1", "v3") == 1
    with pytest.raises(GraphError):
        contract(W.chain([-2, -2]), "v1")


def test_merge_chain_examples():
    assert merge_chain(W.chain([-4, -3]), ["v1", "v2"]).weights == (-5,)
    assert merge_chain(W.chain([-2, -2]), ["v1", "v2"]).weights == (-2,)
    assert merge_chain(W.chain([-2, -3, -2]), ["v1", "v2", "v3"]).weights == (-3,)


def test_merge_chain_keeps_outside_edges_and_rejects_non_chains():
    g = W.star(-2, [[-3, -2], [-2], [-4]])
    m = merge_chain(g, ["a1_1", "c"], "x")
    assert m.weight("x") == -3
    assert sorted(m.neighbors("x")) == ["a1_2", "a2_1", "a3_1"]
    with pytest.raises(GraphError):
        merge_chain(g, ["a1_2", "a2_1"])


def test_subgraph_valency_ends():
    g = d4()
    assert valency(g, "c") == 3
    assert ends(g) == 3
    s = subgraph(g, ["c", "a1_1"])
    assert s.is_chain() and len(s) == 2
    assert ends(W.chain([-2])) == 0


# -- isomorphism ------------------------------------------------------------------

def test_canonical_form_ignores_labels():
    g = W.star(-2, [[-3], [-2, -4], [-2]])
    h = g.relabel({"c": "zz", "a1_1": "q", "a2_2": "b7"})
    assert canonical_form(g) == canonical_form(h)
    assert is_isomorphic(g, h)
    assert not is_isomorphic(g, g.with_weights({"c": -3}))


def test_isomorphism_for_multigraphs():
    g = W({"a": -3, "b": -3, "c": -2}, [("a", "b", 2), ("b", "c")])
    h = W({"x": -2, "y": -3, "z": -3}, [("y", "z", 2), ("x", "z")])
    assert is_isomorphic(g, h)
    k = W({"x": -2, "y": -3, "z": -3}, [("y", "z", 2), ("x", "y"), ("x", "z")])
    assert not is_isomorphic(g, k)
