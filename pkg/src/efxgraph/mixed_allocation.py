"""EFX allocations for mixed instances.

The EFX^0_- algorithm works in two parts.  Part 1 builds a partial
orientation in which nobody holds a chore for her and the envy graph is
well behaved (Properties (1)-(8), see ``fairness.EnvyContext``); Part 2
hands out the remaining edges without creating new envy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Allocation, EfxError, Instance, Notion
from .fairness import EnvyContext, passes
from .goods_chores import chores_ef_allocation
from .oracle import DecideResult, Mode, SearchSpec, oracle_exists, DEFAULT_BUDGET


class PreconditionViolated(EfxError):
    pass


class NonTermination(EfxError):
    pass


class DegenerateAllChores(EfxError):
    pass


ALL_PROPERTIES = frozenset(range(1, 9))
BASE_PROPERTIES = frozenset({1, 4, 5, 6, 7})
FIRST_SEVEN = frozenset(range(1, 8))


@dataclass(frozen=True)
class TraceStep:
    """One Part-1 step: which operation ran, the properties it guarantees
    afterwards, and the resulting owner vector."""

    op: str
    claimed: frozenset
    owner: tuple
    agents: tuple = ()

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "agents": list(self.agents),
            "claimed": sorted(self.claimed),
            "owner": {str(e): a for e, a in enumerate(self.owner) if a is not None},
        }


@dataclass
class Part1State:
    instance: Instance
    owner: list
    trace: list = field(default_factory=list)
    record: bool = False

    def log(self, op: str, claimed: frozenset, agents=()) -> None:
        if self.record:
            self.trace.append(TraceStep(op, frozenset(claimed), tuple(self.owner), tuple(agents)))

    def context(self) -> EnvyContext:
        return EnvyContext(self.instance, self.owner)

    def allocation(self) -> Allocation:
        return Allocation(tuple(self.owner))


def _favourite(instance: Instance, agent: int, edges) -> int | None:
    """Highest-valued edge for ``agent``; smallest id on ties."""
    best = None
    for e in edges:
        if best is None or instance.value(agent, (e,)) > instance.value(agent, (best,)):
            best = e
    return best


def _spare(instance: Instance, owner, agent: int) -> list[int]:
    return [e for e in instance.nonchores[agent] if owner[e] is None]


# --- Part 1 ------------------------------------------------------------------


def initial_orientation(instance: Instance, record: bool = False) -> Part1State:
    """Agents pick their favourite free non-chore edge in chains: after an
    agent picks, the other endpoint of her edge picks next."""
    owner: list = [None] * instance.m
    has = [False] * instance.n
    state = Part1State(instance, owner, record=record)
    start = 0
    while start < instance.n:
        if has[start] or not _spare(instance, owner, start):
            start += 1
            continue
        k = start
        while not has[k]:
            e = _favourite(instance, k, _spare(instance, owner, k))
            if e is None:
                break
            owner[e] = k
            has[k] = True
            k = instance.edges[e].other(k)
        # agents skipped earlier only lose options, so scanning on is enough
    state.log("initial", BASE_PROPERTIES)
    return state


def _release(owner, edges) -> None:
    for e in edges:
        owner[e] = None


def _bundle(owner, agent: int) -> list[int]:
    return [e for e, a in enumerate(owner) if a == agent]


def _restore_property1(state: Part1State) -> None:
    """While some agent prefers a single free non-chore edge to her bundle,
    she swaps her bundle for her favourite such edge."""
    inst, owner = state.instance, state.owner
    while True:
        for j in range(inst.n):
            spare = _spare(inst, owner, j)
            if not spare:
                continue
            e = _favourite(inst, j, spare)
            held = _bundle(owner, j)
            if inst.value(j, held) < inst.value(j, (e,)):
                _release(owner, held)
                owner[e] = j
                break
        else:
            return


def repair_property2(state: Part1State) -> Part1State:
    """Envied agents whose free non-chore edges beat their bundle take all
    of them and release the old bundle; released edges are then picked up by
    whoever prefers them."""
    inst, owner = state.instance, state.owner
    while True:
        i = state.context().property2_violation()
        if i is None:
            break
        held = _bundle(owner, i)
        spare = _spare(inst, owner, i)
        _release(owner, held)
        for e in spare:
            owner[e] = i
        _restore_property1(state)
    state.log("property2", FIRST_SEVEN)
    return state


def _rotate(instance: Instance, owner, path: list[int]) -> None:
    """Every agent on the envy path takes the edge to the agent she envies."""
    for a, b in zip(path, path[1:]):
        e = instance.edge_between(a, b)
        if e is None or owner[e] != a:
            raise PreconditionViolated(f"agent {a} does not hold the edge to her envier {b}")
        owner[e] = b


def _absorb_terminal_edge(state: Part1State, path: list[int]) -> None:
    """The head of the path takes the edge held by the path's non-envied end
    plus her free non-chore edges; everyone on the path moves up one."""
    inst, owner = state.instance, state.owner
    head, tail = path[0], path[-1]
    e = inst.edge_between(head, tail)
    if e is None or owner[e] != tail:
        raise PreconditionViolated(f"agent {tail} does not hold an edge of agent {head}")
    spare = _spare(inst, owner, head)
    _rotate(inst, owner, path)
    owner[e] = head
    for f in spare:
        owner[f] = head


def _disjoint(p: list[int], q: list[int]) -> None:
    if set(p) & set(q):
        raise PreconditionViolated(f"envy paths {p} and {q} meet")


def repair_property3(state: Part1State, pair: tuple[int, int] | None = None) -> Part1State:
    """Fix a pair of envied agents with no common safe non-envied agent."""
    inst, owner = state.instance, state.owner
    ctx = state.context()
    if pair is None:
        pair = ctx.property3_violation()
        if pair is None:
            return state
    i, j = pair
    if not (ctx.envied[i] and ctx.envied[j]):
        raise PreconditionViolated(f"agents {i} and {j} must both be envied")
    pi, pj = ctx.envy_path(i), ctx.envy_path(j)
    i_s, j_t = pi[-1], pj[-1]

    def case1(path):
        head, tail = path[0], path[-1]
        e = inst.edge_between(head, tail)
        return e is not None and owner[e] == tail and not ctx.safe(tail, head)

    if case1(pi) or case1(pj):
        path = pi if case1(pi) else pj
        _absorb_terminal_edge(state, path)
        state.log("property3-case1", FIRST_SEVEN, path)
        return state

    e_j_is = inst.edge_between(j, i_s)
    e_i_jt = inst.edge_between(i, j_t)
    if e_j_is is None or owner[e_j_is] != i_s or e_i_jt is None or owner[e_i_jt] != j_t:
        raise PreconditionViolated(f"unexpected configuration for envied pair ({i}, {j})")
    _disjoint(pi, pj)
    e_ij = inst.edge_between(i, j)
    if e_ij is not None and inst.value(i, (e_ij,)) >= inst.value(i, (e_i_jt,)):
        # case 2: a_i re-picks, her path moves up, a_{i_s} lets go of e_{j,i_s}
        pick = _favourite(inst, i, _spare(inst, owner, i))
        _rotate(inst, owner, pi)
        if pick is not None:
            owner[pick] = i
        owner[e_j_is] = None
        op = "property3-case2"
    else:
        # case 3: a_j takes e_{j,i_s} and her free edges, both paths move up,
        # a_{j_t} lets go of e_{i,j_t} and a_i re-picks
        spare_j = _spare(inst, owner, j)
        _rotate(inst, owner, pj)
        _rotate(inst, owner, pi)
        owner[e_j_is] = j
        for f in spare_j:
            owner[f] = j
        owner[e_i_jt] = None
        pick = _favourite(inst, i, _spare(inst, owner, i))
        if pick is not None:
            owner[pick] = i
        op = "property3-case3"
    state.log(op, BASE_PROPERTIES, (i, j))
    if state.context().property2_violation() is not None:
        repair_property2(state)
    return state


def repair_property8(state: Part1State) -> Part1State:
    """Rotate envy paths whose non-envied end holds an edge of the head and
    is not safe for her, until no such path is left."""
    inst, owner = state.instance, state.owner
    for _ in range(inst.n + 1):
        ctx = state.context()
        bad = ctx.property8_violation()
        if bad is None:
            return state
        head, k = bad
        path = ctx.envy_path(head)
        if path[-1] != k:
            raise PreconditionViolated(f"agent {k} is unsafe for {head} but is not the end of her envy path")
        _absorb_terminal_edge(state, path)
        state.log("property8", FIRST_SEVEN, path)
    raise NonTermination("property (8) repair did not settle")


def part1(instance: Instance, record: bool = False) -> Part1State:
    state = initial_orientation(instance, record=record)
    cap = 4 * max(1, instance.n) * max(1, instance.m)
    for _ in range(cap):
        ctx = state.context()
        if not (ctx.property1() and ctx.property4() and ctx.property5()
                and ctx.property6() and ctx.property7()):
            raise PreconditionViolated(f"part 1 lost a base property; audit = {sorted(ctx.audit())}")
        if ctx.property2_violation() is not None:
            repair_property2(state)
        elif (pair := ctx.property3_violation()) is not None:
            repair_property3(state, pair)
        elif ctx.property8_violation() is not None:
            repair_property8(state)
        else:
            state.log("done", ALL_PROPERTIES)
            return state
    raise NonTermination(f"part 1 exceeded {cap} repair rounds; owner = {state.owner}")


# --- Part 2 ------------------------------------------------------------------


class _Live:
    """Incrementally maintained bundles and values for Part 2."""

    def __init__(self, instance: Instance, owner: list):
        self.instance = instance
        self.owner = owner
        self.bundles = [set() for _ in range(instance.n)]
        for e, a in enumerate(owner):
            if a is not None:
                self.bundles[a].add(e)
        self.value = [instance.value(i, self.bundles[i]) for i in range(instance.n)]

    def give(self, e: int, agent: int) -> None:
        self.owner[e] = agent
        self.bundles[agent].add(e)
        self.value[agent] = self.instance.value(agent, self.bundles[agent])

    def envies(self, x: int, i: int) -> bool:
        inc = self.instance.incident_sets[x]
        part = [e for e in self.bundles[i] if e in inc]
        return self.instance.value(x, part) > self.value[x]

    def enviers(self, i: int) -> list[int]:
        n = self.instance.n
        cand = set(self.instance.neighbors(i))
        cand.update(x for x in range(n) if self.value[x] < 0)
        cand.discard(i)
        return sorted(x for x in cand if self.envies(x, i))

    def envied(self, i: int) -> bool:
        return bool(self.enviers(i))

    def safe(self, k: int, i: int) -> bool:
        inst = self.instance
        inc = inst.incident_sets[i]
        seen = [e for e in self.bundles[k] if e in inc]
        spare = [e for e in inst.nonchores[i] if self.owner[e] is None]
        return self.value[i] >= inst.value(i, seen + spare)

    def envy_path(self, start: int) -> list[int]:
        path = [start]
        while True:
            ev = self.enviers(path[-1])
            if not ev:
                return path
            if ev[0] in path:
                raise PreconditionViolated(f"envy cycle through agent {ev[0]}")
            path.append(ev[0])


def _groups(instance: Instance, envied: list[bool], remaining: list[int]) -> tuple[list, list, list, list]:
    g1, g2, g3, g4 = [], [], [], []
    for e in remaining:
        u, v = instance.edges[e].endpoints
        if any(not envied[a] and not instance.is_chore(a, e) for a in (u, v)):
            g1.append(e)
        elif envied[u] and envied[v]:
            g2.append(e)
        elif any(not envied[a] and instance.is_chore(a, e) for a in (u, v)) and any(
            envied[a] and not instance.is_chore(a, e) for a in (u, v)
        ):
            g3.append(e)
        else:
            g4.append(e)
    return g1, g2, g3, g4


def part2(instance: Instance, state: Part1State) -> Allocation:
    """Allocate the edges left over by Part 1."""
    owner = list(state.owner)
    ctx = EnvyContext(instance, owner)
    remaining = sorted(ctx.unallocated)
    g1, g2, g3, g4 = _groups(instance, ctx.envied, remaining)
    live = _Live(instance, owner)

    def to_free_endpoint(e: int) -> bool:
        """G1 rule: a non-envied endpoint for whom e is not a chore."""
        for a in instance.edges[e].endpoints:
            if not instance.is_chore(a, e) and not live.envied(a):
                live.give(e, a)
                return True
        return False

    for e in g1:
        if not to_free_endpoint(e):
            raise PreconditionViolated(f"edge {e} lost its non-envied endpoint")
    non_envied = [k for k in range(instance.n) if not live.envied(k)]
    for e in g2:
        if to_free_endpoint(e):
            continue
        u, v = instance.edges[e].endpoints
        k = next((k for k in non_envied
                  if not instance.is_chore(k, e) and not live.envied(k)
                  and live.safe(k, u) and live.safe(k, v)), None)
        if k is None:
            raise PreconditionViolated(f"no non-envied agent is safe for both endpoints of edge {e}")
        live.give(e, k)
    for e in g3:
        if to_free_endpoint(e):
            continue
        u, v = instance.edges[e].endpoints
        i, j = (u, v) if instance.is_chore(v, e) else (v, u)
        k = next((k for k in range(instance.n)
                  if k not in (i, j) and not live.envied(k) and live.safe(k, i)), None)
        if k is None:
            path = live.envy_path(i)
            if path[-1] != j or len(path) < 2:
                raise PreconditionViolated(f"edge {e}: envy path from {i} ends at {path[-1]}, not {j}")
            k = path[-2]
        live.give(e, k)
    if g4:
        envied = [live.envied(k) for k in range(instance.n)]
        if not any(envied):
            for e in g4:
                ends = instance.edges[e].endpoints
                outside = [k for k in range(instance.n) if k not in ends]
                live.give(e, outside[0] if outside else min(ends))
        else:
            pair = next(((i, j) for i in range(instance.n) if envied[i]
                         for j in live.enviers(i) if not envied[j]), None)
            if pair is None:
                raise PreconditionViolated("every envier is envied")
            i, j = pair
            for e in g4:
                live.give(e, i if e in instance.incident_sets[j] else j)
    return Allocation(tuple(owner))


def efx0minus_allocation(instance: Instance) -> Allocation:
    return part2(instance, part1(instance))


def trace(instance: Instance) -> tuple[Allocation, list[TraceStep]]:
    """EFX^0_- allocation together with the recorded Part-1 steps."""
    state = part1(instance, record=True)
    return part2(instance, state), state.trace


# --- EFX^+_0 -----------------------------------------------------------------


def _good_endpoint(instance: Instance, e: int) -> int | None:
    edge = instance.edges[e]
    for a in edge.endpoints:
        if instance.is_good(a, e):
            return a
    return None


def _case2_edge(instance: Instance) -> tuple[int, int]:
    """(i, j) for the first edge not a chore for a_i, preferring edges that
    are a chore for exactly one endpoint."""
    fallback = None
    for e in instance.edges:
        for i, j in ((e.u, e.v), (e.v, e.u)):
            if instance.is_chore(i, e.id):
                continue
            if instance.is_chore(j, e.id):
                return i, j
            if fallback is None:
                fallback = (i, j)
    if fallback is None:
        raise PreconditionViolated("every edge is a chore for both endpoints")
    return fallback


def efxplus0_allocation(instance: Instance) -> Allocation:
    n, m = instance.n, instance.m
    if all(instance.is_chore(a, e.id) for e in instance.edges for a in e.endpoints):
        if n >= 3 or m == 0:
            return chores_ef_allocation(instance)
        if m > n:
            raise DegenerateAllChores("more chores than agents")
        # one chore each: removing it leaves 0, which nobody can beat
        return Allocation(tuple(e.u for e in instance.edges))
    owner: list = [None] * m
    not_good_anywhere = [e.id for e in instance.edges
                         if not any(instance.is_good(a, e.id) for a in e.endpoints)]
    rich = next((a for a in range(n) if instance.value(a, instance.incident[a]) >= 0), None)
    if rich is not None:
        i = rich
        for e in instance.incident[i]:
            owner[e] = i
        for e in not_good_anywhere:
            if owner[e] is None:
                owner[e] = i
    else:
        i, j = _case2_edge(instance)
        for e in instance.nonchores[i]:
            owner[e] = i
        inc_i = instance.incident_sets[i]
        for e in not_good_anywhere:
            if owner[e] is None and e not in inc_i:
                owner[e] = i
        for e in instance.goods[j]:
            if owner[e] is None:
                owner[e] = j
        for e in instance.incident[i]:
            if owner[e] is None and not instance.is_good(instance.edges[e].other(i), e):
                owner[e] = j
    for e in range(m):
        if owner[e] is None:
            a = _good_endpoint(instance, e)
            if a is None:
                raise PreconditionViolated(f"edge {e} is left without a taker")
            owner[e] = a
    return Allocation(tuple(owner))


def efxplusminus_allocation(instance: Instance) -> Allocation:
    """EFX^+_0 implies EFX^+_-, so the EFX^+_0 allocation serves."""
    try:
        return efxplus0_allocation(instance)
    except DegenerateAllChores:
        return efx0minus_allocation(instance)


def efx00_allocation_bruteforce(instance: Instance, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> DecideResult:
    """Exhaustive search; no polynomial method is known for EFX^0_0."""
    return oracle_exists(instance, SearchSpec(Mode.ALLOCATIONS, Notion.EFX_00, budget, jobs))
