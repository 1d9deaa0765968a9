from __future__ import annotations

from itertools import combinations

import pytest

from singraph.classify import LauferTag, laufer_type
from singraph.corpus import builtin_entries, dynkin, n_star, table1_instance
from singraph.cycles import fundamental_cycle, is_rational
from singraph.graph_core import GraphError, WeightedDualGraph, ends, is_isomorphic
from singraph.sandwich import (
    AugmentedGraph,
    Branch,
    ClusterPoint,
    DecoratedCurve,
    NotBlowdownable,
    SandwichUnknown,
    UnsupportedCurve,
    a_series_types,
    attach_arrows,
    decorated_curve_of,
    delta_const_candidates,
    e8_resolution_profiles,
    ends_bound,
    germ_type,
    graph_of,
    is_sandwiched,
    min_property,
    monomial_curve,
    proximity_factorize,
    recipe_iii3,
    recipe_iii4,
    sandwich_augmentation,
    smooth_curve,
)

import oracles

W = WeightedDualGraph
X37 = W.chain([-4, -2, -3, -2, -2])


def _x37_curve() -> DecoratedCurve:
    return decorated_curve_of(attach_arrows(X37))


# -- arrows and blow-down certificates -------------------------------------------------

def test_attach_arrows_examples():
    a = attach_arrows(X37)
    assert a.arrow_counts() == {"v1": 2, "v2": 0, "v3": 1, "v4": 0, "v5": 1}
    for n in (2, 3, 6):
        assert len(attach_arrows(W({"e": -n})).arrows) == n - 1
    assert len(attach_arrows(dynkin("A", 1)).arrows) == 1
    assert attach_arrows(X37, e0="v5").arrow_counts()["v5"] == 0


def test_attach_arrows_needs_reduced_fundamental_cycle():
    with pytest.raises(GraphError):
        attach_arrows(dynkin("D", 4))
    with pytest.raises(GraphError):
        attach_arrows(W.star(-2, [[-2, -2], [-2, -2], [-2, -3]]))


def test_proximity_factorize_examples():
    pm = proximity_factorize(W({"e": -1}))
    assert pm.matrix == ((1,),)
    with pytest.raises(NotBlowdownable):
        proximity_factorize(dynkin("D", 4))
    pm = proximity_factorize(attach_arrows(X37))
    n = len(pm.order)
    inv = pm.inverse()
    assert all(inv[i][j] >= 0 for i in range(n) for j in range(n))
    assert all(pm.matrix[i][i] == 1 and all(pm.matrix[i][j] == 0 for j in range(i + 1, n)) for i in range(n))


def test_proximity_matrix_reproduces_the_form():
    a = attach_arrows(W.star(-3, [[-2], [-4], [-2, -2]]))
    pm = proximity_factorize(a)
    g = a.graph
    p = pm.matrix
    n = len(p)
    for x, u in enumerate(pm.order):
        for y, v in enumerate(pm.order):
            want = g.weight(u) if u == v else g.mult(u, v)
            assert -sum(p[r][x] * p[r][y] for r in range(n)) == want


# -- decorated curves --------------------------------------------------------------------

def test_x37_decorated_curve():
    c = _x37_curve()
    assert sorted(c.decorations()) == [2, 2, 4, 6]
    assert all(c.multiplicities(i)[0] == 1 for i in range(4))
    assert [c.m(i) for i in range(4)] == [1, 1, 3, 3]
    for i, j in combinations(range(4), 2):
        assert min(c.branches[i].l, c.branches[j].l) == c.intersection(i, j) + 1
    six = c.decorations().index(6)
    four = c.decorations().index(4)
    assert c.intersection(six, four) == 3
    assert [h.weights for h in graph_of(c)] == [(-4, -2, -3, -2, -2)]


def test_single_minus_one_with_one_arrow():
    a = AugmentedGraph(W({}), W({"r": -1}), (("r", ""),))
    c = decorated_curve_of(a)
    assert len(c.branches) == 1 and c.branches[0].l == 1
    assert graph_of(c) == []
    # A1 gets one arrow, a smooth branch through two points
    c = decorated_curve_of(attach_arrows(dynkin("A", 1)))
    assert c.decorations() == [2]
    assert [h.weights for h in graph_of(c)] == [(-2,)]


def test_decoration_must_reach_m():
    pts = (ClusterPoint(1, None), ClusterPoint(2, 1))
    with pytest.raises(GraphError):
        DecoratedCurve(pts, (Branch(2, 1), Branch(2, 2)))
    with pytest.raises(GraphError):
        monomial_curve(2, 3, 3)
    with pytest.raises(GraphError):
        smooth_curve([[0, 2], [2, 0]], [1, 3])


def test_graph_of_examples():
    assert graph_of(smooth_curve([[0]], [0])) == []
    assert graph_of(smooth_curve([[0]], [1])) == []
    # a smooth branch decorated l is the A_{l-1} chain
    assert [h.weights for h in graph_of(smooth_curve([[0]], [4]))] == [(-2, -2, -2)]
    cusp = monomial_curve(2, 3)
    assert cusp.decorations() == [4]
    assert sorted(h.weights for h in graph_of(cusp)) == [(-3,), (-2,)]
    (h,) = graph_of(monomial_curve(2, 3, 6))
    assert sorted(h.weights) == [-3, -2, -2, -2] and not h.is_chain()


def test_noether_formula_against_curvette_oracle():
    c = _x37_curve()
    parent = {p.id: p.parent for p in c.points}
    prox = {p.id: p.proximities() for p in c.points}
    order = c.ids
    for i, b in enumerate(c.branches):
        m = oracles.curvette_multiplicities(parent, prox, order, b.attach)
        assert c.multiplicities(i) == [m[p] for p in order]
    # P^T m_i = e_{attach}, hence m_i^T (P P^T) m_j = [attach_i = attach_j]
    p = c.proximity_matrix()
    n = len(p)
    ppt = [[sum(p[x][r] * p[y][r] for r in range(n)) for y in range(n)] for x in range(n)]
    pos = c.position()
    for i, j in combinations(range(len(c.branches)), 2):
        mi, mj = c.multiplicities(i), c.multiplicities(j)
        lhs = sum(mi[x] * ppt[x][y] * mj[y] for x in range(n) for y in range(n))
        assert lhs == (1 if c.branches[i].attach == c.branches[j].attach else 0)
        assert [sum(p[r][x] * mi[r] for r in range(n)) for x in range(n)] == [int(x == pos[c.branches[i].attach]) for x in range(n)]
        assert c.intersection(i, j) == sum(a * b for a, b in zip(mi, mj))


def test_delta_of_cusp():
    assert monomial_curve(2, 3).delta() == 1
    assert monomial_curve(2, 5).delta() == 2
    assert _x37_curve().delta() == sum(sum(row) for row in _x37_curve().intersection_matrix()) // 2


# -- round trip --------------------------------------------------------------------------

def test_round_trip_on_reduced_corpus_graphs():
    checked = 0
    for e in builtin_entries():
        if e.kind != "graph" or not is_rational(e.subject):
            continue
        g = e.subject
        if not fundamental_cycle(g)[0].is_reduced():
            continue
        (h,) = graph_of(decorated_curve_of(attach_arrows(g)))
        assert is_isomorphic(h, g), e.name
        checked += 1
    assert checked >= 10


def test_round_trip_on_chains():
    for ws in ([-2], [-3, -2], [-5], [-2, -4, -3], [-3, -3, -3], [-2, -2, -2, -6]):
        g = W.chain(ws)
        (h,) = graph_of(decorated_curve_of(attach_arrows(g)))
        assert is_isomorphic(h, g)


# -- sandwiched decision -----------------------------------------------------------------

def test_is_sandwiched_examples():
    for ws in ([-2], [-2] * 5, [-4, -2, -3, -2, -2], [-7, -2]):
        assert is_sandwiched(W.chain(ws))
    assert not is_sandwiched(dynkin("D", 4))
    assert not is_sandwiched(table1_instance(LauferTag.III_9))
    assert is_sandwiched(table1_instance(LauferTag.III_1))
    assert is_sandwiched(n_star(3))


def test_is_sandwiched_budget_is_reported_as_unknown():
    g = table1_instance(LauferTag.III_4)
    assert not fundamental_cycle(g)[0].is_reduced()
    assert not is_sandwiched(g)
    with pytest.raises(SandwichUnknown):
        is_sandwiched(g, arrow_budget=1)
    # an all -2 graph needs at most one arrow per vertex, so budget 1 is definite
    assert not is_sandwiched(dynkin("D", 4), arrow_budget=1)
    with pytest.raises(GraphError):
        is_sandwiched(W({"a": -2, "b": -2}))  # disconnected


def test_sandwich_augmentation_blows_down():
    for g in (n_star(2), table1_instance(LauferTag.III_3), W.chain([-3, -5])):
        a = sandwich_augmentation(g)
        assert a is not None
        proximity_factorize(a)
    assert sandwich_augmentation(dynkin("E", 6)) is None


# -- recipes --------------------------------------------------------------------------

def test_recipe_iii3_core():
    c = recipe_iii3(2, 1)
    assert len(c.branches) == 1 and c.decorations() == [2 * 2 + 4 + 1]
    assert germ_type(c) == "A4"
    (h,) = graph_of(c)
    assert laufer_type(h).tag in (LauferTag.III_2, LauferTag.III_3)


def test_recipe_iii3_arms():
    c = recipe_iii3(2, 1, left=[1, 2], short=1, right=[1, 2])
    assert len(c.branches) == 6
    assert [c.intersection(0, i) for i in range(1, 6)] == [2, 4, 5, 11, 12]
    (h,) = graph_of(c)
    assert laufer_type(h).tag is LauferTag.III_3
    with pytest.raises(GraphError):
        recipe_iii3(2, 1, left=[3])
    with pytest.raises(GraphError):
        recipe_iii3(0, 1)


def test_recipe_iii4_families():
    c = recipe_iii4("E6", 3, first=1, second=1, right=[2, 3])
    assert c.decorations()[0] == 3 + 7
    assert [c.intersection(0, i) for i in (3, 4)] == [12 + 2, 12 + 3]
    for curve in (c, recipe_iii4("E8", 3, first=1, right=[2]), recipe_iii4("x3", 3, smooth=[2])):
        (h,) = graph_of(curve)
        assert laufer_type(h).tag is LauferTag.III_4
    with pytest.raises(GraphError):
        recipe_iii4("E6", 3, right=[1])
    with pytest.raises(GraphError):
        recipe_iii4("x3", 2)
    with pytest.raises(GraphError):
        recipe_iii4("E8", 2, second=1)
    with pytest.raises(GraphError):
        recipe_iii4("E7", 2)


def test_e8_profiles():
    big, small = e8_resolution_profiles(1)
    assert big == (3, 2, 1, 1, 1, 1) and small == (2, 2, 2, 2, 1)
    assert sum(x * (x - 1) // 2 for x in big) == sum(x * (x - 1) // 2 for x in small) == 4
    with pytest.raises(GraphError):
        e8_resolution_profiles(-1)


# -- delta-constant candidates -----------------------------------------------------------

def test_a_series_types_match_partition_oracle():
    for k in range(1, 6):
        assert set(a_series_types(k)) == oracles.a_series_family(k)
    assert len(a_series_types(2)) == 4


def test_a4_candidates():
    c = monomial_curve(2, 5, 8)
    types = {cand.curve_types() for cand in delta_const_candidates(c)}
    assert types == oracles.a_series_family(2)
    # the trivial deformation is present
    assert any(len(cand.germs) == 1 and germ_type(cand.germs[0]) == "A4" for cand in delta_const_candidates(c))


def test_two_smooth_branches_one_point_may_exceed():
    n = 3
    c = smooth_curve([[0, n], [n, 0]], [n + 1, n + 5])
    for cand in delta_const_candidates(c):
        over = 0
        for gm in cand.germs:
            if len(gm.branches) == 2:
                if min(gm.decorations()) == gm.intersection(0, 1) + 1:
                    over += 1
        assert over <= 1


def test_candidates_preserve_delta_and_decorations():
    c = smooth_curve([[0, 2, 2], [2, 0, 3], [2, 3, 0]], [3, 4, 5])
    cands = delta_const_candidates(c)
    assert cands
    total = sum(c.intersection(i, j) for i, j in combinations(range(3), 2))
    for cand in cands:
        assert cand.label == "combinatorial"
        meet = sum(gm.intersection(i, j) for gm in cand.germs for i, j in combinations(range(len(gm.branches)), 2))
        assert meet <= total
        for gm in cand.germs:
            for i, b in enumerate(gm.branches):
                assert b.l >= gm.m(i)


def test_candidates_reject_unsupported_branches():
    with pytest.raises(UnsupportedCurve):
        delta_const_candidates(monomial_curve(3, 4))
    with pytest.raises(UnsupportedCurve):
        delta_const_candidates(recipe_iii3(1, 0, short=1))


def test_depth_bounds_the_number_of_germs():
    c = smooth_curve([[0, 2], [2, 0]], [3, 6])
    assert all(len(cand.germs) <= 1 for cand in delta_const_candidates(c, depth=1))
    assert len(delta_const_candidates(c, depth=1)) < len(delta_const_candidates(c))


def test_cyclic_quotient_candidates_stay_chains():
    c = _x37_curve()
    assert min_property(c, range(4))
    for cand in delta_const_candidates(c):
        for h in cand.graphs():
            assert h.is_chain()


def test_ends_monotone_on_x37():
    base = ends(X37)
    for cand in delta_const_candidates(_x37_curve()):
        for h in cand.graphs():
            assert ends(h) <= base


# -- ends bound ----------------------------------------------------------------------------

def test_ends_bound_examples():
    c = _x37_curve()
    assert ends_bound(c, [range(4)]) == 2
    assert ends_bound(c, [[i] for i in range(4)]) == 5
    bad = smooth_curve([[0, 1], [1, 0]], [4, 5])
    assert not min_property(bad, [0, 1])
    with pytest.raises(GraphError):
        ends_bound(bad, [[0, 1]])
    with pytest.raises(GraphError):
        ends_bound(c, [[0, 1]])
    with pytest.raises(UnsupportedCurve):
        ends_bound(monomial_curve(2, 3), [[0]])
