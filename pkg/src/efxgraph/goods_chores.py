"""Solvers for pure goods and pure chores instances."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import Allocation, EfxError, Instance, InstanceKind, Orientation, Sign
from .oracle import DecideResult


class NotGoodsInstance(EfxError):
    pass


class NotChoresInstance(EfxError):
    pass


class TooFewAgents(EfxError):
    pass


def _require(instance: Instance, kind: InstanceKind) -> None:
    if kind is InstanceKind.GOODS and any(instance.chores):
        raise NotGoodsInstance("some agent has a chore among her incident edges")
    if kind is InstanceKind.CHORES and any(instance.goods):
        raise NotChoresInstance("some agent has a good among her incident edges")


def goods_efxplus_orientation(instance: Instance) -> Orientation:
    """Every edge to its lower endpoint.

    Any orientation works for goods: the envied agent's only edge valued by
    the envier is the one they share.
    """
    _require(instance, InstanceKind.GOODS)
    return Orientation.of(instance, [e.u for e in instance.edges])


def goods_efx0_allocation(instance: Instance) -> Allocation:
    """EFX^0 allocation for goods, via the general EFX^0_- algorithm."""
    from .mixed_allocation import efx0minus_allocation

    _require(instance, InstanceKind.GOODS)
    return efx0minus_allocation(instance)


def chores_ef_allocation(instance: Instance) -> Allocation:
    """Each edge to the smallest agent that is not one of its endpoints."""
    _require(instance, InstanceKind.CHORES)
    if instance.m and instance.n <= 2:
        raise TooFewAgents("every agent is an endpoint of the edge; an envy-free allocation needs a third agent")
    owner = []
    for e in instance.edges:
        owner.append(next(a for a in range(instance.n) if a not in e.endpoints))
    return Allocation(tuple(owner))


# --- EFX_- orientations -----------------------------------------------------


def _components(n: int, adj: list[list[tuple[int, int]]]) -> list[list[int]]:
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, _ in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def _one_edge_each(comp: list[int], adj: list[list[tuple[int, int]]], owner: list) -> None:
    """Give every vertex of a tree or unicyclic component at most one edge."""
    members = set(comp)
    edges = {e for u in comp for _, e in adj[u]}
    # strip leaves to find the cycle, if any
    degree = {u: len(adj[u]) for u in comp}
    leaves = deque(u for u in comp if degree[u] <= 1)
    removed = set()
    while leaves:
        u = leaves.popleft()
        removed.add(u)
        for v, _ in adj[u]:
            if v not in removed:
                degree[v] -= 1
                if degree[v] == 1:
                    leaves.append(v)
    cycle = [u for u in comp if u not in removed]
    parent_side: dict[int, int] = {}
    if cycle:
        on_cycle = set(cycle)
        start = cycle[0]
        prev, cur = None, start
        while True:
            nxt_edge = None
            for v, e in sorted(adj[cur]):
                if v in on_cycle and v != prev and e not in parent_side.values():
                    nxt_edge = (v, e)
                    break
            v, e = nxt_edge
            owner[e] = v
            parent_side[v] = e
            prev, cur = cur, v
            if cur == start:
                break
        roots = cycle
    else:
        roots = [comp[0]]
    queue = deque(roots)
    visited = set(roots)
    while queue:
        u = queue.popleft()
        for v, e in adj[u]:
            if v not in visited and v in members:
                visited.add(v)
                owner[e] = v
                queue.append(v)
    assert all(owner[e] is not None for e in edges)


def chores_efxminus_orientation(instance: Instance) -> DecideResult:
    """EFX_- orientations of chores exist iff, after dropping every edge that
    is a dummy for one of its endpoints, no component has more edges than
    vertices."""
    _require(instance, InstanceKind.CHORES)
    n = instance.n
    owner: list = [None] * instance.m
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e in instance.edges:
        du = instance.sign(e.u, e.id) is Sign.DUMMY
        dv = instance.sign(e.v, e.id) is Sign.DUMMY
        if du or dv:
            owner[e.id] = e.u if du else e.v
        else:
            adj[e.u].append((e.v, e.id))
            adj[e.v].append((e.u, e.id))
    comps = _components(n, adj)
    for comp in comps:
        n_edges = sum(len(adj[u]) for u in comp) // 2
        if n_edges > len(comp):
            return DecideResult(False)
    for comp in comps:
        if len(comp) > 1:
            _one_edge_each(comp, adj, owner)
    return DecideResult(True, Orientation.of(instance, owner))


# --- EFX_0 orientations -----------------------------------------------------


@dataclass(frozen=True)
class PushOutcome:
    flag: bool
    orientation: tuple | None = None
    touched: frozenset = frozenset()
    remaining: frozenset = frozenset()


def push(instance: Instance, owner, edge: int, target: int, remaining) -> PushOutcome:
    """Push ``edge`` to ``target`` and propagate.

    The target must not hold anything yet.  If the edge is a dummy for her she
    also takes her other unallocated dummies; every other unallocated edge of
    hers is then pushed to its other endpoint, depth first.  Any failure
    aborts the whole push.
    """
    owner = list(owner)
    R = set(remaining)
    touched: set[int] = set()

    def place(e: int, u: int):
        """Allocate e (and possibly dummies) to u; return u's pending edges or None."""
        if any(owner[f] == u for f in instance.incident[u]):
            return None
        owner[e] = u
        R.discard(e)
        touched.add(u)
        if instance.sign(u, e) is Sign.DUMMY:
            for f in instance.dummies[u]:
                if f in R:
                    owner[f] = u
                    R.discard(f)
        return iter([f for f in instance.incident[u] if owner[f] != u])

    first = place(edge, target)
    if first is None:
        return PushOutcome(False)
    stack = [(target, first)]
    while stack:
        u, pending = stack[-1]
        for f in pending:
            if f in R:
                v = instance.edges[f].other(u)
                nxt = place(f, v)
                if nxt is None:
                    return PushOutcome(False)
                stack.append((v, nxt))
                break
        else:
            stack.pop()
    # maximal w.r.t. the touched agents: all their edges are placed, and
    # everything placed by this push went to one of them
    assert all(owner[f] is not None for u in touched for f in instance.incident[u])
    assert all(a in touched for f, a in enumerate(owner) if f in remaining and a is not None)
    return PushOutcome(True, tuple(owner), frozenset(touched), frozenset(R))


def chores_efx0_orientation(instance: Instance) -> DecideResult:
    """Decide whether an EFX_0 orientation exists, by repeated pushes.

    In an EFX_0 orientation of chores every agent holds either exactly one
    edge, a chore for her, or only dummies.
    """
    _require(instance, InstanceKind.CHORES)
    owner: tuple = (None,) * instance.m
    R = set(range(instance.m))
    while R:
        agent = min(a for a in range(instance.n) if any(e in R for e in instance.incident[a]))
        for e in instance.incident[agent]:
            if e not in R:
                continue
            out = push(instance, owner, e, agent, R)
            if out.flag:
                owner = out.orientation
                R = set(out.remaining)
                for u in out.touched:
                    R.difference_update(instance.incident[u])
                break
        else:
            return DecideResult(False)
    return DecideResult(True, Orientation.of(instance, owner))
