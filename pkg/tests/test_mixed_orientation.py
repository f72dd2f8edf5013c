from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from efxgraph.core import Notion, build_instance
from efxgraph.fairness import passes
from efxgraph.mixed_orientation import (
    NotAPath,
    NotAStar,
    NotATree,
    UnsupportedSignPattern,
    bfs_layers,
    path_efx0minus_decide,
    star_efx00_decide,
    tree_efxplus0_orientation,
)
from efxgraph.oracle import Mode, SearchSpec, oracle_exists

from helpers import good_then_chore_path, sym, three_vertex_path, two_sided


def _oracle(inst, notion):
    return oracle_exists(inst, SearchSpec(Mode.ORIENTATIONS, notion)).exists


# --- trees -----------------------------------------------------------------


def test_tree_single_good_edge():
    inst = sym(2, [(0, 1)], [1])
    assert tree_efxplus0_orientation(inst).owner == (0,)


def test_tree_chore_then_good_path():
    inst = three_vertex_path()
    o = tree_efxplus0_orientation(inst, root=0)
    assert o.owner == (1, 1)
    assert passes(inst, o, Notion.EFX_PLUS0)


def test_tree_star_goods_for_leaves():
    inst = two_sided(4, [(0, 1), (0, 2), (0, 3)], [(-1, 2), (-1, 2), (-1, 2)])
    o = tree_efxplus0_orientation(inst, root=0)
    assert o.owner == (1, 2, 3)
    assert passes(inst, o, Notion.EFX_PLUS0)


def test_bfs_layers():
    inst = sym(4, [(0, 1), (1, 2), (1, 3)], [1, 1, 1])
    layer, parent = bfs_layers(inst, 0)
    assert layer == {0: 1, 1: 2, 2: 3, 3: 3}
    assert parent == {1: 0, 2: 1, 3: 2}


@pytest.mark.parametrize("n, edges", [
    (3, [(0, 1)]),
    (3, [(0, 1), (1, 2), (0, 2)]),
    (4, [(0, 1), (2, 3), (1, 2), (0, 3)]),
])
def test_not_a_tree(n, edges):
    with pytest.raises(NotATree):
        tree_efxplus0_orientation(sym(n, edges, [1] * len(edges)))


def random_tree(rng, n, values):
    edges = [(rng.randrange(v), v) for v in range(1, n)]
    perm = list(range(n))
    rng.shuffle(perm)
    edges = [(perm[u], perm[v]) for u, v in edges]
    pairs = [(rng.choice(values), rng.choice(values)) for _ in edges]
    return two_sided(n, edges, pairs)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 9), st.integers(0, 10 ** 6))
def test_tree_solver_every_root(n, seed):
    inst = random_tree(random.Random(seed), n, [-3, -2, -1, 0, 1, 2, 3])
    for root in range(n):
        o = tree_efxplus0_orientation(inst, root)
        assert o.is_orientation(inst) and o.is_complete()
        assert passes(inst, o, Notion.EFX_PLUS0)


# --- stars -------------------------------------------------------------------


def test_star_goods_for_satellites():
    inst = sym(3, [(0, 1), (0, 2)], [1, 1])
    res = star_efx00_decide(inst)
    assert res.exists and res.witness.owner == (1, 2)


@pytest.mark.parametrize("notion", [Notion.EFX_00, Notion.EFX_0MINUS])
def test_three_vertex_path_as_star(notion):
    # centre a1, the good goes out to a0 and the chore is forced onto a1
    inst = good_then_chore_path()
    assert not star_efx00_decide(inst, notion).exists
    assert not _oracle(inst, notion)


def test_star_dummies_for_satellites():
    # no edge is a chore for its satellite, so every edge goes out; the centre
    # envies each satellite only up to that single edge
    inst = build_instance(4, [(0, 1), (0, 2), (0, 3)], {(0, 0): 1, (0, 1): 1, (0, 2): 1})
    res = star_efx00_decide(inst)
    assert res.exists and res.witness.owner == (1, 2, 3)
    assert passes(inst, res.witness, Notion.EFX_00)
    assert passes(inst, (0, 0, 0), Notion.EF)


def test_star_trivial_cases():
    assert star_efx00_decide(sym(3, [], [])).exists
    assert star_efx00_decide(sym(2, [(0, 1)], [-5])).exists


def test_not_a_star():
    with pytest.raises(NotAStar):
        star_efx00_decide(sym(4, [(0, 1), (2, 3)], [1, 1]))


def test_star_decider_rejects_other_notions():
    with pytest.raises(Exception):
        star_efx00_decide(sym(2, [(0, 1)], [1]), Notion.EF)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 4), st.data())
def test_star_decider_matches_oracle(k, data):
    vals = st.integers(-2, 2)
    pairs = [(data.draw(vals), data.draw(vals)) for _ in range(k)]
    inst = two_sided(k + 1, [(0, s) for s in range(1, k + 1)], pairs)
    for notion in (Notion.EFX_00, Notion.EFX_0MINUS):
        res = star_efx00_decide(inst, notion)
        assert res.exists == _oracle(inst, notion)
        if res.exists:
            assert passes(inst, res.witness, notion)


# --- paths -------------------------------------------------------------------


def test_two_edge_path_with_chore():
    assert not path_efx0minus_decide(good_then_chore_path()).exists
    assert not path_efx0minus_decide(three_vertex_path()).exists


def test_goods_path_points_right():
    inst = sym(6, [(k, k + 1) for k in range(5)], [1, 2, 3, 4, 5])
    res = path_efx0minus_decide(inst)
    assert res.exists and res.witness.owner == (1, 2, 3, 4, 5)


def test_path_with_forced_chore():
    # g g c g g; the chore cannot go left (a1 prefers e12 to e01), so a3 takes
    # the chore with e34 and a4 takes e45
    edges = [(k, k + 1) for k in range(5)]
    inst = two_sided(6, edges, [(2, 2), (3, 2), (-1, -1), (2, 2), (2, 2)])
    res = path_efx0minus_decide(inst)
    assert res.exists
    assert res.witness.owner == (1, 2, 3, 3, 4)
    assert passes(inst, res.witness, Notion.EFX_0MINUS)
    assert _oracle(inst, Notion.EFX_0MINUS)


def test_path_vertices_in_any_order():
    inst = sym(4, [(2, 0), (0, 3), (3, 1)], [1, -1, 1])
    assert path_efx0minus_decide(inst).exists == _oracle(inst, Notion.EFX_0MINUS)


def test_path_rejects_mixed_edges():
    inst = two_sided(3, [(0, 1), (1, 2)], [(1, -1), (1, 1)])
    with pytest.raises(UnsupportedSignPattern):
        path_efx0minus_decide(inst)
    with pytest.raises(NotAPath):
        path_efx0minus_decide(sym(4, [(0, 1), (0, 2), (0, 3)], [1, 1, 1]))


@pytest.mark.parametrize("length", [1, 2, 3, 4, 5])
def test_path_decider_matches_oracle_exhaustively_on_signs(length):
    edges = [(k, k + 1) for k in range(length)]
    for signs in itertools.product((1, -1), repeat=length):
        inst = sym(length + 1, edges, [2 * s for s in signs])
        res = path_efx0minus_decide(inst)
        for notion in (Notion.EFX_0MINUS, Notion.EFX_00):
            assert res.exists == _oracle(inst, notion)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 5), st.data())
def test_path_decider_matches_oracle(length, data):
    edges = [(k, k + 1) for k in range(length)]
    pairs = []
    for _ in edges:
        mag = st.integers(1, 2)
        sign = data.draw(st.sampled_from((1, -1)))
        pairs.append((sign * data.draw(mag), sign * data.draw(mag)))
    inst = two_sided(length + 1, edges, pairs)
    res = path_efx0minus_decide(inst)
    assert res.exists == _oracle(inst, Notion.EFX_0MINUS)
    if res.exists:
        assert passes(inst, res.witness, Notion.EFX_0MINUS)
