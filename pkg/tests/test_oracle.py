from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from efxgraph.core import EfxError, Notion
from efxgraph.fairness import passes
from efxgraph.oracle import BudgetExceeded, Mode, SearchSpec, iter_solutions, oracle_count, oracle_exists, state_count
from efxgraph.reductions import priceless_matching_instance

from helpers import chorded_square, instances, sym

ORI = Mode.ORIENTATIONS
ALL = Mode.ALLOCATIONS


def test_chorded_square_has_no_chore_orientation():
    for notion in (Notion.EFX_CMINUS, Notion.EFX_C0):
        assert not oracle_exists(chorded_square(), SearchSpec(ORI, notion)).exists


@pytest.mark.parametrize("n", [2, 3, 4])
def test_single_good_edge_never_envy_free(n):
    inst = sym(n, [(0, 1)], [1])
    assert not oracle_exists(inst, SearchSpec(ALL, Notion.EF)).exists


def test_priceless_matching_no_efx00_allocation():
    inst = priceless_matching_instance()
    assert state_count(inst, SearchSpec(ALL, Notion.EFX_00)) == 4 ** 6
    assert not oracle_exists(inst, SearchSpec(ALL, Notion.EFX_00)).exists
    res = oracle_exists(inst, SearchSpec(ALL, Notion.EFX_0MINUS))
    assert res.exists and passes(inst, res.witness, Notion.EFX_0MINUS)


def test_three_edge_variant_has_efx00_allocation():
    # priceless e01, e23 and one small edge e02: 4^3 allocations, some EFX^0_0
    inst = sym(4, [(0, 1), (2, 3), (0, 2)], [2, 2, 1])
    assert oracle_exists(inst, SearchSpec(ALL, Notion.EFX_00)).exists


@pytest.mark.parametrize("notion", list(Notion))
def test_empty_edge_set_count(notion):
    assert oracle_count(sym(3, [], []), SearchSpec(ALL, notion)) == 1


def test_chore_triangle_two_cyclic_orientations():
    inst = sym(3, [(0, 1), (1, 2), (0, 2)], [-1, -1, -1])
    assert oracle_count(inst, SearchSpec(ORI, Notion.EFX_C0)) == 2


def test_goods_cycle_every_orientation_passes():
    inst = sym(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [1, 1, 1, 1])
    assert oracle_count(inst, SearchSpec(ORI, Notion.EFX_GPLUS)) == 16


def test_single_good_edge_allocation_exists():
    res = oracle_exists(sym(2, [(0, 1)], [1]), SearchSpec(ALL, Notion.EFX_00))
    assert res.exists and res.witness.owner == (0,)


def test_budget():
    inst = sym(4, [(0, 1), (1, 2), (2, 3)], [1, 1, 1])
    with pytest.raises(BudgetExceeded):
        oracle_exists(inst, SearchSpec(ALL, Notion.EF, budget=63))
    with pytest.raises(BudgetExceeded):
        oracle_count(inst, SearchSpec(ORI, Notion.EF, budget=7))
    assert oracle_count(inst, SearchSpec(ORI, Notion.EFX_GPLUS, budget=8)) == 8


def test_fixed_edges():
    inst = sym(3, [(0, 1), (1, 2)], [1, 1])
    spec = SearchSpec(ORI, Notion.EFX_GPLUS, fixed={0: 1})
    assert all(owner[0] == 1 for owner in iter_solutions(inst, spec))
    with pytest.raises(EfxError):
        oracle_exists(inst, SearchSpec(ORI, Notion.EF, fixed={0: 2}))


def _naive(inst, mode, notion):
    choices = [e.endpoints if mode is ORI else range(inst.n) for e in inst.edges]
    return [o for o in itertools.product(*choices) if passes(inst, o, notion)]


@settings(max_examples=150, deadline=None)
@given(instances(max_n=4, max_m=5, lo=-2, hi=2), st.sampled_from(list(Notion)))
def test_orientation_pruning_matches_plain_enumeration(inst, notion):
    naive = _naive(inst, ORI, notion)
    found = list(iter_solutions(inst, SearchSpec(ORI, notion)))
    assert found == naive
    res = oracle_exists(inst, SearchSpec(ORI, notion))
    assert res.exists == bool(naive)
    if naive:
        assert res.witness.owner == naive[0]


@settings(max_examples=60, deadline=None)
@given(instances(max_n=3, max_m=3, lo=-2, hi=2), st.sampled_from(list(Notion)))
def test_allocation_mode_matches_plain_enumeration(inst, notion):
    naive = _naive(inst, ALL, notion)
    assert oracle_count(inst, SearchSpec(ALL, notion)) == len(naive)


def test_parallel_search_gives_same_answers():
    inst = sym(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)], [1, -1, 2, -2, 1, 1])
    for notion in (Notion.EFX_00, Notion.EFX_PLUSMINUS, Notion.EF):
        one = oracle_exists(inst, SearchSpec(ORI, notion))
        two = oracle_exists(inst, SearchSpec(ORI, notion, jobs=2))
        assert one == two
        assert oracle_count(inst, SearchSpec(ORI, notion)) == oracle_count(inst, SearchSpec(ORI, notion, jobs=2))
