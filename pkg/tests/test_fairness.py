from __future__ import annotations

import pytest
from hypothesis import given, settings

from efxgraph.core import Allocation, Notion, build_instance
from efxgraph.fairness import (
    EnvyCycleDetected,
    EnvyContext,
    IncompleteAllocation,
    Side,
    Violation,
    audit_properties,
    check,
    envy_state,
    find_envy_path,
    is_envy_free,
    pair_violations,
    passes,
    safe_for,
    verdicts,
)
from efxgraph.mixed_allocation import initial_orientation

from helpers import good_then_chore_path, instance_and_owner, sym


def test_single_good_edge_efx_plus_but_not_ef():
    inst = sym(2, [(0, 1)], [1])
    alloc = Allocation((0,))
    assert passes(inst, alloc, Notion.EFX_GPLUS)
    report = check(inst, alloc, Notion.EF)
    assert list(report) == [Violation(1, 0)]


def test_path_orientation_witness():
    inst = good_then_chore_path()
    report = check(inst, Allocation((1, 1)), Notion.EFX_00)
    assert Violation(0, 1, 1, Side.ENVIED_BUNDLE) in report


def test_own_bundle_witness_depends_on_removable_class():
    # a1 holds a dummy and a chore, sits at -1 and envies a0's empty bundle
    inst = build_instance(3, [(0, 1), (1, 2)], {(1, 1): -1})
    owner = (1, 1)
    assert Violation(1, 0, 0, Side.OWN_BUNDLE) in check(inst, owner, Notion.EFX_C0)
    # dropping the chore instead brings her to 0
    assert passes(inst, owner, Notion.EFX_CMINUS)


def test_ef_allocation_passes_everything():
    inst = sym(4, [(0, 1), (2, 3)], [-1, -1])
    alloc = Allocation((2, 0))
    assert is_envy_free(inst, alloc)
    assert all(verdicts(inst, alloc).values())


@pytest.mark.parametrize("n, edges, vals, owner, expected", [
    (3, [(0, 1)], [-1], (2,), True),
    (2, [(0, 1)], [1], (0,), False),
    (2, [], [], (), True),
])
def test_is_envy_free(n, edges, vals, owner, expected):
    assert is_envy_free(sym(n, edges, vals), Allocation(owner)) is expected


def test_incomplete_allocation_rejected():
    inst = sym(2, [(0, 1)], [1])
    with pytest.raises(IncompleteAllocation):
        check(inst, Allocation((None,)), Notion.EF)
    with pytest.raises(IncompleteAllocation):
        check(inst, (0, 1), Notion.EF)
    assert check(inst, Allocation((None,)), Notion.EF, partial=True).ok


# --- safety -----------------------------------------------------------------


def test_safe_when_candidate_holds_dummies():
    # protected a0 has no free non-chore edge and value 0; candidate a1 holds
    # an edge a0 does not care about
    inst = build_instance(3, [(0, 1), (1, 2)], {(1, 0): 1, (1, 1): 1})
    assert safe_for(inst, (1, 1), candidate=1, protected=0)


def test_unsafe_when_candidate_holds_valuable_edge():
    inst = build_instance(3, [(0, 1), (0, 2)], {(0, 0): 5, (0, 1): 3})
    assert not safe_for(inst, (1, 0), candidate=1, protected=0)


def test_safe_with_small_free_edge():
    # protected a0 holds 3, candidate a2 holds a dummy for a0, a0's free edge
    # e01 is worth 2 to her: 3 >= 0 + 2
    inst = build_instance(3, [(0, 1), (0, 2), (1, 2)], {(0, 0): 2, (0, 1): 3})
    assert safe_for(inst, (None, 0, 2), candidate=2, protected=0)


# --- properties and envy paths -------------------------------------------------


def test_empty_allocation_properties():
    inst = sym(3, [(0, 1), (1, 2)], [1, -1])
    assert audit_properties(inst, (None, None)) == {2, 3, 4, 5, 6, 7, 8}
    chores = sym(3, [(0, 1), (1, 2)], [-1, -1])
    assert audit_properties(chores, (None, None)) == set(range(1, 9))


def test_initial_orientation_on_goods_cycle():
    inst = sym(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [1, 1, 1, 1])
    state = initial_orientation(inst)
    assert {1, 4, 5, 6, 7} <= audit_properties(inst, state.owner)


def test_complete_ef_allocation_has_all_properties():
    inst = sym(4, [(0, 1), (2, 3)], [-1, -1])
    assert audit_properties(inst, (2, 0)) == set(range(1, 9))


def test_envy_paths():
    # a1 holds e01 and e12; a0 envies a1, nobody envies a0 or a2
    inst = sym(3, [(0, 1), (1, 2)], [1, 1])
    assert find_envy_path(inst, (1, 1), 0) == [0]
    assert find_envy_path(inst, (1, 1), 1) == [1, 0]
    state = envy_state(inst, (1, 1))
    assert state.envies == {(0, 1), (2, 1)}
    assert state.envied == {1}


def test_envy_cycle_detected():
    # each agent holds her own chore and values the other's bundle at 0
    inst = build_instance(3, [(0, 2), (1, 2)], {(0, 0): -1, (1, 1): -1})
    ctx = EnvyContext(inst, (0, 1))
    assert ctx.envies(0, 1) and ctx.envies(1, 0)
    with pytest.raises(EnvyCycleDetected):
        ctx.envy_path(0)
    assert 7 not in audit_properties(inst, (0, 1))


# --- properties of the checker itself ----------------------------------------


@settings(max_examples=300, deadline=None)
@given(instance_and_owner(max_n=5, max_m=7))
def test_passes_agrees_with_check(case):
    inst, owner = case
    for notion in Notion:
        assert passes(inst, owner, notion) == check(inst, owner, notion).ok


@settings(max_examples=300, deadline=None)
@given(instance_and_owner(max_n=5, max_m=7))
def test_lattice_on_random_allocations(case):
    inst, owner = case
    v = verdicts(inst, owner)
    for strong in Notion:
        if v[strong]:
            for weak in Notion:
                if strong.implies(weak):
                    assert v[weak], (strong, weak)


def _brute_pair(inst, owner, i, j, notion):
    """Direct definition of the EFX variants for one ordered pair."""
    own = [e for e, a in enumerate(owner) if a == i]
    other = [e for e, a in enumerate(owner) if a == j]
    vo, vj = inst.value(i, own), inst.value(i, other)
    if vo >= vj:
        return True
    if notion.envied_side is None and notion.own_side is None:
        return False
    if notion.envied_side is not None:
        for e in other:
            s = inst.value(i, [e])
            if s < 0 or (notion.envied_side == "+" and s == 0):
                continue
            if vo < inst.value(i, [f for f in other if f != e]):
                return False
    if notion.own_side is not None:
        for e in own:
            s = inst.value(i, [e])
            if s > 0 or (notion.own_side == "-" and s == 0):
                continue
            if inst.value(i, [f for f in own if f != e]) < vj:
                return False
    return True


@settings(max_examples=300, deadline=None)
@given(instance_and_owner(max_n=4, max_m=6))
def test_checker_matches_definition(case):
    inst, owner = case
    bundles = [[e for e, a in enumerate(owner) if a == k] for k in range(inst.n)]
    for notion in Notion:
        expected = all(_brute_pair(inst, owner, i, j, notion)
                       for i in range(inst.n) for j in range(inst.n) if i != j)
        assert passes(inst, owner, notion) == expected
        for i in range(inst.n):
            for j in range(inst.n):
                if i != j:
                    none = next(pair_violations(inst, bundles, i, j, notion), None) is None
                    assert none == _brute_pair(inst, owner, i, j, notion)
