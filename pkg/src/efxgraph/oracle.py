"""Exhaustive ground truth: enumerate allocations or orientations.

States are owner vectors enumerated in mixed-radix order with edge 0 as the
most significant digit; the first passing state is the witness.  In
orientation mode the search backtracks over edges and evaluates an agent pair
as soon as every edge incident to either agent is placed (only those edges
can end up in the two bundles), which prunes without changing the verdict,
the count or the witness.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .core import EfxError, Instance, Notion, Orientation, Allocation
from .fairness import pair_violations, passes

DEFAULT_BUDGET = 20_000_000


class BudgetExceeded(EfxError):
    pass


class Mode(enum.Enum):
    ALLOCATIONS = "allocations"
    ORIENTATIONS = "orientations"


@dataclass(frozen=True)
class SearchSpec:
    mode: Mode
    notion: Notion
    budget: int = DEFAULT_BUDGET
    jobs: int = 1
    fixed: Mapping[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class DecideResult:
    exists: bool
    witness: Allocation | None = None


def _choices(instance: Instance, spec: SearchSpec) -> list[tuple[int, ...]]:
    out = []
    for e in instance.edges:
        opts = e.endpoints if spec.mode is Mode.ORIENTATIONS else tuple(range(instance.n))
        if e.id in spec.fixed:
            a = spec.fixed[e.id]
            if a not in opts:
                raise EfxError(f"fixed owner {a} of edge {e.id} is not a valid choice")
            opts = (a,)
        out.append(tuple(opts))
    return out


def state_count(instance: Instance, spec: SearchSpec) -> int:
    total = 1
    for opts in _choices(instance, spec):
        total *= len(opts)
    return total


def _pair_schedule(instance: Instance) -> list[list[tuple[int, int]]]:
    """schedule[d + 1] = pairs whose incident edges are all placed after edge d."""
    m = instance.m
    last = [max(instance.incident[i], default=-1) for i in range(instance.n)]
    schedule: list[list[tuple[int, int]]] = [[] for _ in range(m + 1)]
    for i in range(instance.n):
        for j in range(instance.n):
            if i != j:
                schedule[max(last[i], last[j]) + 1].append((i, j))
    return schedule


def _orientation_solutions(instance: Instance, notion: Notion, choices) -> Iterator[tuple]:
    m = instance.m
    schedule = _pair_schedule(instance)
    bundles: list[list[int]] = [[] for _ in range(instance.n)]
    owner: list = [None] * m

    def ok(depth: int) -> bool:
        for i, j in schedule[depth]:
            if next(pair_violations(instance, bundles, i, j, notion), None) is not None:
                return False
        return True

    if not ok(0):
        return
    # iterative DFS; pos[d] indexes the option tried for edge d
    pos = [-1] * m
    d = 0
    while d >= 0:
        if d == m:
            yield tuple(owner)
            d -= 1
            continue
        if pos[d] >= 0:
            bundles[owner[d]].pop()
        pos[d] += 1
        if pos[d] >= len(choices[d]):
            pos[d] = -1
            owner[d] = None
            d -= 1
            continue
        a = choices[d][pos[d]]
        owner[d] = a
        bundles[a].append(d)
        if ok(d + 1):
            d += 1


def _allocation_solutions(instance: Instance, notion: Notion, choices) -> Iterator[tuple]:
    for owner in itertools.product(*choices):
        if passes(instance, owner, notion):
            yield owner


def iter_solutions(instance: Instance, spec: SearchSpec) -> Iterator[tuple]:
    """Every passing owner vector, in canonical order."""
    total = state_count(instance, spec)
    if total > spec.budget:
        raise BudgetExceeded(f"{total} states exceed the budget of {spec.budget}")
    choices = _choices(instance, spec)
    if spec.mode is Mode.ORIENTATIONS:
        return _orientation_solutions(instance, spec.notion, choices)
    return _allocation_solutions(instance, spec.notion, choices)


def _wrap(instance: Instance, spec: SearchSpec, owner) -> Allocation:
    if spec.mode is Mode.ORIENTATIONS:
        return Orientation.of(instance, owner)
    return Allocation(tuple(owner))


def _split(instance: Instance, spec: SearchSpec) -> list[SearchSpec]:
    """Sub-searches fixing a prefix of free edges, in canonical order."""
    choices = _choices(instance, spec)
    free = [e for e in range(instance.m) if len(choices[e]) > 1]
    prefix: list[int] = []
    parts = 1
    for e in free:
        if parts >= 4 * spec.jobs:
            break
        prefix.append(e)
        parts *= len(choices[e])
    specs = []
    for combo in itertools.product(*(choices[e] for e in prefix)):
        fixed = dict(spec.fixed)
        fixed.update(zip(prefix, combo))
        specs.append(SearchSpec(spec.mode, spec.notion, spec.budget, 1, fixed))
    return specs


def _first(args):
    instance, spec = args
    return next(iter_solutions(instance, spec), None)


def _count(args):
    instance, spec = args
    return sum(1 for _ in iter_solutions(instance, spec))


def oracle_exists(instance: Instance, spec: SearchSpec) -> DecideResult:
    total = state_count(instance, spec)
    if total > spec.budget:
        raise BudgetExceeded(f"{total} states exceed the budget of {spec.budget}")
    if spec.jobs > 1 and instance.m > 0:
        parts = _split(instance, spec)
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            # parts are in canonical order, so the first hit is the minimum
            for found in pool.map(_first, [(instance, p) for p in parts]):
                if found is not None:
                    return DecideResult(True, _wrap(instance, spec, found))
        return DecideResult(False)
    found = next(iter_solutions(instance, spec), None)
    if found is None:
        return DecideResult(False)
    return DecideResult(True, _wrap(instance, spec, found))


def oracle_count(instance: Instance, spec: SearchSpec) -> int:
    total = state_count(instance, spec)
    if total > spec.budget:
        raise BudgetExceeded(f"{total} states exceed the budget of {spec.budget}")
    if spec.jobs > 1 and instance.m > 0:
        parts = _split(instance, spec)
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            return sum(pool.map(_count, [(instance, p) for p in parts]))
    return sum(1 for _ in iter_solutions(instance, spec))
