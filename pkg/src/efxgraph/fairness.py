"""Fairness predicates, envy graphs and the properties used by the EFX^0_- solver.

Every function takes an instance plus an allocation (complete or partial).
Values of other agents' bundles are always computed on the part of the
bundle incident to the evaluating agent: the rest is dummy for her and does
not change the value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .core import Allocation, EfxError, Instance, Notion, Sign, validate_allocation


class IncompleteAllocation(EfxError):
    pass


class EnvyCycleDetected(EfxError):
    pass


class Side(enum.Enum):
    ENVIED_BUNDLE = "envied_bundle"
    OWN_BUNDLE = "own_bundle"


@dataclass(frozen=True)
class Violation:
    """``envious`` still envies ``envied`` after removing ``edge``.

    For EF violations ``edge`` and ``side`` are None.
    """

    envious: int
    envied: int
    edge: int | None = None
    side: Side | None = None

    def to_dict(self) -> dict:
        return {
            "envious": self.envious,
            "envied": self.envied,
            "edge": self.edge,
            "side": self.side.value if self.side else None,
        }


class ViolationReport(list):
    """List of :class:`Violation`; empty iff the notion holds."""

    @property
    def ok(self) -> bool:
        return not self

    def to_dict(self, notion: Notion) -> dict:
        return {"notion": notion.value, "holds": self.ok, "violations": [v.to_dict() for v in self]}


def _owners(alloc) -> Sequence:
    return alloc.owner if isinstance(alloc, Allocation) else alloc


def _bundles(n: int, owner: Sequence) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(n)]
    for e, a in enumerate(owner):
        if a is not None:
            out[a].append(e)
    return out


def _pair_witnesses(instance, i, j, own, vo, part, vj, bundle_j, c1, c2) -> Iterator[Violation]:
    """Witnesses for the ordered pair (i, j); ``part`` is X_j restricted to E_i."""
    if vj <= vo:
        return
    if c1 is None and c2 is None:
        yield Violation(i, j)
        return
    if c1 is not None:
        inc = instance.incident_sets[i]
        for e in bundle_j:
            if e not in inc:
                # dummy for i: removing it leaves the value unchanged
                if c1 == "0":
                    yield Violation(i, j, e, Side.ENVIED_BUNDLE)
                continue
            s = instance.sign(i, e)
            if s is Sign.CHORE or (c1 == "+" and s is not Sign.GOOD):
                continue
            rest = [f for f in part if f != e]
            if vo < instance.value(i, rest):
                yield Violation(i, j, e, Side.ENVIED_BUNDLE)
    if c2 is not None:
        for e in own:
            s = instance.sign(i, e)
            if s is Sign.GOOD or (c2 == "-" and s is not Sign.CHORE):
                continue
            rest = [f for f in own if f != e]
            if instance.value(i, rest) < vj:
                yield Violation(i, j, e, Side.OWN_BUNDLE)


def _incident_parts(instance: Instance, owner: Sequence, i: int) -> dict[int, list[int]]:
    seen: dict[int, list[int]] = {}
    for e in instance.incident[i]:
        a = owner[e]
        if a is not None and a != i:
            seen.setdefault(a, []).append(e)
    return seen


def _iter_violations(instance: Instance, owner: Sequence, notion: Notion) -> Iterator[Violation]:
    n = instance.n
    bundles = _bundles(n, owner)
    c1 = notion.envied_side
    c2 = notion.own_side
    for i in range(n):
        own = bundles[i]
        vo = instance.value(i, own)
        empty_value = None
        seen = _incident_parts(instance, owner, i)
        for j in range(n):
            if j == i:
                continue
            part = seen.get(j, ())
            if part:
                vj = instance.value(i, part)
            else:
                if empty_value is None:
                    empty_value = instance.value(i, ())
                vj = empty_value
            yield from _pair_witnesses(instance, i, j, own, vo, part, vj, bundles[j], c1, c2)


def pair_violations(instance: Instance, bundles: Sequence[Sequence[int]], i: int, j: int, notion: Notion) -> Iterator[Violation]:
    """Witnesses for one ordered pair, given the bundles of i and j.

    Only X_i and X_j are read, which lets exhaustive searches evaluate a pair
    as soon as both bundles are final.
    """
    own = bundles[i]
    inc = instance.incident_sets[i]
    part = [e for e in bundles[j] if e in inc]
    vo = instance.value(i, own)
    vj = instance.value(i, part)
    return _pair_witnesses(instance, i, j, own, vo, part, vj, bundles[j], notion.envied_side, notion.own_side)


def check(instance: Instance, alloc, notion: Notion, partial: bool = False) -> ViolationReport:
    """All witnesses against ``notion``; pairs lexicographic, edges ascending.

    With ``partial`` the allocation may leave edges unallocated; they are
    simply in nobody's bundle.
    """
    owner = _require_complete(instance, alloc, partial)
    return ViolationReport(_iter_violations(instance, owner, notion))


def passes(instance: Instance, alloc, notion: Notion, partial: bool = False) -> bool:
    """Same verdict as ``check(...).ok`` but stops at the first witness."""
    owner = _require_complete(instance, alloc, partial)
    return next(_iter_violations(instance, owner, notion), None) is None


def _require_complete(instance: Instance, alloc, partial: bool = False) -> Sequence:
    owner = _owners(alloc)
    if isinstance(alloc, Allocation):
        validate_allocation(instance, alloc)
    if len(owner) != instance.m:
        raise IncompleteAllocation(f"owner vector has {len(owner)} entries for {instance.m} edges")
    if not partial and any(a is None for a in owner):
        raise IncompleteAllocation("the allocation must assign every edge")
    return owner


def is_envy_free(instance: Instance, alloc) -> bool:
    return passes(instance, alloc, Notion.EF)


# --- envy graph and the safe-for relation ----------------------------------


class EnvyContext:
    """Envy graph and derived quantities of a (partial) allocation.

    ``enviers[i]`` lists, ascending, the agents who envy ``i``;
    ``envies_out[i]`` lists the agents ``i`` envies.  ``spare[i]`` is
    E_i^{>=0} intersected with the unallocated edges.
    """

    def __init__(self, instance: Instance, owner: Sequence):
        self.instance = instance
        self.owner = owner
        n = instance.n
        self.bundles = _bundles(n, owner)
        self.unallocated = {e for e, a in enumerate(owner) if a is None}
        self.own_value = [instance.value(i, self.bundles[i]) for i in range(n)]
        self.spare = [[e for e in instance.nonchores[i] if e in self.unallocated] for i in range(n)]
        self._spare_value: list = [None] * n
        enviers: list[list[int]] = [[] for _ in range(n)]
        envies_out: list[list[int]] = [[] for _ in range(n)]
        for i in range(n):
            vo = self.own_value[i]
            seen: dict[int, list[int]] = {}
            for e in instance.incident[i]:
                a = owner[e]
                if a is not None and a != i:
                    seen.setdefault(a, []).append(e)
            empty_envied = instance.value(i, ()) > vo
            for j in range(n):
                if j == i:
                    continue
                part = seen.get(j)
                if part:
                    if instance.value(i, part) > vo:
                        envies_out[i].append(j)
                        enviers[j].append(i)
                elif empty_envied:
                    envies_out[i].append(j)
                    enviers[j].append(i)
        self.enviers = enviers
        self.envies_out = envies_out
        self.envied = [bool(x) for x in enviers]
        self.non_envied = [i for i in range(n) if not enviers[i]]

    def envies(self, i: int, j: int) -> bool:
        return j in self.envies_out[i]

    def spare_value(self, i: int):
        if self._spare_value[i] is None:
            self._spare_value[i] = self.instance.value(i, self.spare[i])
        return self._spare_value[i]

    def safe(self, candidate: int, protected: int) -> bool:
        i, j = protected, candidate
        inc = self.instance.incident_sets[i]
        seen = [e for e in self.bundles[j] if e in inc]
        return self.own_value[i] >= self.instance.value(i, seen + self.spare[i])

    def safe_agents(self, protected: int) -> list[int]:
        return [k for k in self.non_envied if self.safe(k, protected)]

    def envy_path(self, start: int) -> list[int]:
        """start = i_0 <- i_1 <- ... <- i_s, smallest envier at each step."""
        path = [start]
        on_path = {start}
        cur = start
        while self.enviers[cur]:
            cur = self.enviers[cur][0]
            if cur in on_path:
                raise EnvyCycleDetected(f"envy cycle through agent {cur}")
            path.append(cur)
            on_path.add(cur)
        return path

    # -- the eight properties --

    def property1(self) -> bool:
        inst = self.instance
        return all(self.own_value[i] >= inst.value(i, (e,)) for i in range(inst.n) for e in self.spare[i])

    def property2_violation(self) -> int | None:
        for i in range(self.instance.n):
            if self.envied[i] and self.own_value[i] < self.spare_value(i):
                return i
        return None

    def _safe_summary(self, i: int) -> tuple[bool, set[int]]:
        """(base, exceptions) describing which non-envied agents are safe for i.

        A non-envied agent holding no edge of E_i is safe iff ``base``; the
        exceptions are the holders whose status differs from ``base``.
        """
        base = self.own_value[i] >= self.spare_value(i)
        holders = {self.owner[e] for e in self.instance.incident[i]} - {None, i}
        exc = {k for k in holders if not self.envied[k] and self.safe(k, i) != base}
        return base, exc

    def property3_violation(self) -> tuple[int, int] | None:
        envied = [i for i in range(self.instance.n) if self.envied[i]]
        if not envied:
            return None
        summary = {i: self._safe_summary(i) for i in envied}
        total = len(self.non_envied)
        for a, i in enumerate(envied):
            bi, ei = summary[i]
            for j in envied[a:]:
                bj, ej = summary[j]
                if bi and bj:
                    ok = total > len(ei | ej)
                elif bi:
                    ok = bool(ej - ei)
                elif bj:
                    ok = bool(ei - ej)
                else:
                    ok = bool(ei & ej)
                if not ok:
                    return (i, j)
        return None

    def property4(self) -> bool:
        inst = self.instance
        return not any(inst.is_chore(i, e) for i in range(inst.n) for e in self.bundles[i])

    def property5(self) -> bool:
        return all(len(self.bundles[i]) == 1 for i in range(self.instance.n) if self.envied[i])

    def property6(self) -> bool:
        return all(len(x) == 1 for x in self.enviers if x)

    def property7(self) -> bool:
        n = self.instance.n
        indeg = [len(x) for x in self.enviers]
        stack = [i for i in range(n) if indeg[i] == 0]
        done = 0
        while stack:
            k = stack.pop()
            done += 1
            for j in self.envies_out[k]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    stack.append(j)
        return done == n

    def property8_violation(self) -> tuple[int, int] | None:
        """(i_0, k): k lies on an envy path from i_0 ending at a non-envied
        agent but is not safe for i_0."""
        n = self.instance.n
        can_end = [not self.envied[i] for i in range(n)]
        stack = [i for i in range(n) if can_end[i]]
        while stack:
            k = stack.pop()
            for j in self.envies_out[k]:
                if not can_end[j]:
                    can_end[j] = True
                    stack.append(j)
        for i0 in range(n):
            if not self.envied[i0]:
                continue
            reached: set[int] = set()
            frontier = list(self.enviers[i0])
            while frontier:
                k = frontier.pop()
                if k in reached:
                    continue
                reached.add(k)
                frontier.extend(self.enviers[k])
            for k in sorted(reached):
                if can_end[k] and not self.safe(k, i0):
                    return (i0, k)
        return None

    def audit(self) -> set[int]:
        out = set()
        if self.property1():
            out.add(1)
        if self.property2_violation() is None:
            out.add(2)
        if self.property3_violation() is None:
            out.add(3)
        if self.property4():
            out.add(4)
        if self.property5():
            out.add(5)
        if self.property6():
            out.add(6)
        if self.property7():
            out.add(7)
        if self.property8_violation() is None:
            out.add(8)
        return out


@dataclass(frozen=True)
class EnvyState:
    envies: frozenset
    envied_by: tuple

    @property
    def envied(self) -> frozenset:
        return frozenset(j for j, c in enumerate(self.envied_by) if c)


def envy_state(instance: Instance, alloc) -> EnvyState:
    ctx = EnvyContext(instance, _owners(alloc))
    pairs = frozenset((i, j) for i in range(instance.n) for j in ctx.envies_out[i])
    return EnvyState(pairs, tuple(len(x) for x in ctx.enviers))


def safe_for(instance: Instance, alloc, candidate: int, protected: int) -> bool:
    """v_i(X_i) >= v_i(X_j + (E_i^{>=0} & R)) with i = protected, j = candidate."""
    return EnvyContext(instance, _owners(alloc)).safe(candidate, protected)


def audit_properties(instance: Instance, alloc) -> set[int]:
    """Indices of the properties (1)-(8) satisfied by a partial allocation."""
    return EnvyContext(instance, _owners(alloc)).audit()


def find_envy_path(instance: Instance, alloc, start: int) -> list[int]:
    return EnvyContext(instance, _owners(alloc)).envy_path(start)


def verdicts(instance: Instance, alloc, notions: Iterable[Notion] = tuple(Notion)) -> dict[Notion, bool]:
    return {x: passes(instance, alloc, x) for x in notions}
