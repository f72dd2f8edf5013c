"""Instance model, exact values and allocation objects.

Agents are the vertices ``0..n-1`` of a simple graph and every item is an
edge.  An edge can only carry non-zero marginal value for its two endpoints,
for everybody else it is a dummy.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Protocol, Sequence, Union

Value = Union[int, Fraction]


class EfxError(Exception):
    """Base class for every error raised by this package."""


class InstanceError(EfxError, ValueError):
    """The instance or one of its serialized forms is invalid."""


class DuplicateEdge(InstanceError):
    pass


class SelfLoop(InstanceError):
    pass


class NonIncidentValue(InstanceError):
    pass


class EmptyAgentSet(InstanceError):
    pass


class EndpointOutOfRange(InstanceError):
    pass


class FormatError(InstanceError):
    """Malformed JSON document."""


class NotAnOrientation(EfxError):
    pass


def exact(x) -> Value:
    """Convert ``x`` to an exact number, keeping integers as ``int``.

    Plain ints keep the arithmetic fast; anything fractional becomes a
    ``Fraction``.  Floats are rejected because they would make equality
    comparisons meaningless.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not values")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        f = Fraction(x)
        return f.numerator if f.denominator == 1 else f
    raise TypeError(f"unsupported value type {type(x).__name__}; use int, Fraction or str")


class Sign(enum.Enum):
    GOOD = "good"
    CHORE = "chore"
    DUMMY = "dummy"


class InstanceKind(enum.Enum):
    GOODS = "goods"
    CHORES = "chores"
    MIXED = "mixed"


class Valuation(Protocol):
    """What the algorithms need to know about the agents' preferences.

    ``sign`` must be consistent with ``value``: adding an edge of class GOOD
    to any set strictly raises the value, CHORE strictly lowers it and DUMMY
    leaves it unchanged.  Edges that are not incident to an agent are always
    DUMMY for her.
    """

    def value(self, agent: int, edges: Iterable[int]) -> Value: ...

    def sign(self, agent: int, edge: int) -> Sign: ...


class AdditiveValuation:
    """v_i(S) is the sum of per-edge values over S."""

    def __init__(self, table: Mapping[tuple[int, int], object]):
        self._table: dict[tuple[int, int], Value] = {k: exact(v) for k, v in table.items()}
        rows: dict[int, dict[int, Value]] = {}
        for (agent, edge), val in self._table.items():
            rows.setdefault(agent, {})[edge] = val
        self._rows = rows

    @property
    def table(self) -> dict[tuple[int, int], Value]:
        return dict(self._table)

    def single(self, agent: int, edge: int) -> Value:
        return self._rows.get(agent, {}).get(edge, 0)

    def value(self, agent: int, edges: Iterable[int]) -> Value:
        row = self._rows.get(agent)
        if not row:
            return 0
        total = 0
        for e in edges:
            total += row.get(e, 0)
        return total

    def sign(self, agent: int, edge: int) -> Sign:
        v = self.single(agent, edge)
        if v > 0:
            return Sign.GOOD
        if v < 0:
            return Sign.CHORE
        return Sign.DUMMY


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.u, self.v)

    def other(self, agent: int) -> int:
        if agent == self.u:
            return self.v
        if agent == self.v:
            return self.u
        raise ValueError(f"agent {agent} is not an endpoint of edge {self.id}")


class Instance:
    """A validated graph instance with cached incidence data.

    ``incident[i]`` is E_i in ascending edge id; ``goods[i]``, ``chores[i]``,
    ``dummies[i]`` split it by sign class and ``nonchores[i]`` is E_i^{>=0}.
    """

    def __init__(self, n: int, edges: Sequence[Edge], valuation: Valuation):
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(edges)
        self.valuation = valuation
        incident: list[list[int]] = [[] for _ in range(n)]
        self._pair: dict[tuple[int, int], int] = {}
        for e in self.edges:
            incident[e.u].append(e.id)
            incident[e.v].append(e.id)
            self._pair[(e.u, e.v)] = e.id
            self._pair[(e.v, e.u)] = e.id
        self.incident: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(x)) for x in incident)
        self.incident_sets: tuple[frozenset[int], ...] = tuple(frozenset(x) for x in self.incident)
        goods, chores, dummies = [], [], []
        for i in range(n):
            g, c, d = [], [], []
            for eid in self.incident[i]:
                s = valuation.sign(i, eid)
                (g if s is Sign.GOOD else c if s is Sign.CHORE else d).append(eid)
            goods.append(tuple(g))
            chores.append(tuple(c))
            dummies.append(tuple(d))
        self.goods = tuple(goods)
        self.chores = tuple(chores)
        self.dummies = tuple(dummies)
        self.nonchores = tuple(tuple(sorted(g + d)) for g, d in zip(goods, dummies))
        self._signs = {}
        for i in range(n):
            for eid in self.goods[i]:
                self._signs[(i, eid)] = Sign.GOOD
            for eid in self.chores[i]:
                self._signs[(i, eid)] = Sign.CHORE

    @property
    def m(self) -> int:
        return len(self.edges)

    def value(self, agent: int, edges: Iterable[int]) -> Value:
        return self.valuation.value(agent, edges)

    def sign(self, agent: int, edge: int) -> Sign:
        return self._signs.get((agent, edge), Sign.DUMMY)

    def is_good(self, agent: int, edge: int) -> bool:
        return self._signs.get((agent, edge)) is Sign.GOOD

    def is_chore(self, agent: int, edge: int) -> bool:
        return self._signs.get((agent, edge)) is Sign.CHORE

    def edge_between(self, i: int, j: int) -> int | None:
        return self._pair.get((i, j))

    def neighbors(self, agent: int) -> list[int]:
        return [self.edges[e].other(agent) for e in self.incident[agent]]

    def kind(self) -> InstanceKind:
        has_good = any(self.goods)
        has_chore = any(self.chores)
        if not has_chore:
            return InstanceKind.GOODS
        if not has_good:
            return InstanceKind.CHORES
        return InstanceKind.MIXED

    def __repr__(self) -> str:
        return f"Instance(n={self.n}, m={self.m})"


def build_instance(n: int, edges: Iterable, values: Mapping[tuple[int, int], object] | None = None) -> Instance:
    """Validate and build an instance with additive valuations.

    ``edges`` is a sequence of endpoint pairs (edge ids are the positions) or
    of :class:`Edge` objects with ids ``0..m-1`` in order.  ``values`` maps
    ``(agent, edge)`` to a value; missing incident pairs are dummies.
    """
    if n < 1:
        raise EmptyAgentSet("an instance needs at least one agent")
    built: list[Edge] = []
    seen: set[tuple[int, int]] = set()
    for k, item in enumerate(edges):
        if isinstance(item, Edge):
            if item.id != k:
                raise InstanceError(f"edge ids must be 0..m-1 in order, got {item.id} at position {k}")
            u, v = item.u, item.v
        else:
            u, v = item
        if not (0 <= u < n and 0 <= v < n):
            raise EndpointOutOfRange(f"edge {k} = ({u},{v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise SelfLoop(f"edge {k} is a self-loop at agent {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {k} duplicates the pair {key}")
        seen.add(key)
        built.append(Edge(k, key[0], key[1]))
    table: dict[tuple[int, int], Value] = {}
    for (agent, eid), val in (values or {}).items():
        if not 0 <= eid < len(built):
            raise InstanceError(f"value given for unknown edge {eid}")
        if agent not in built[eid].endpoints:
            raise NonIncidentValue(f"agent {agent} is not an endpoint of edge {eid}")
        table[(agent, eid)] = exact(val)
    return Instance(n, built, AdditiveValuation(table))


class Notion(enum.Enum):
    """The nine fairness predicates, valued by their command-line names.

    ``envied_side`` says which items of the envied bundle may be removed
    ('0': any non-chore of the envier, '+': goods only); ``own_side`` says
    which items of the envier's own bundle may be removed ('0': any
    non-good, '-': chores only).  None means the condition is not checked.
    """

    EF = "ef"
    EFX_G0 = "efxg0"
    EFX_GPLUS = "efxg+"
    EFX_C0 = "efxc0"
    EFX_CMINUS = "efxc-"
    EFX_00 = "efx00"
    EFX_0MINUS = "efx0-"
    EFX_PLUS0 = "efx+0"
    EFX_PLUSMINUS = "efx+-"

    @property
    def envied_side(self) -> str | None:
        return _SIDES[self][0]

    @property
    def own_side(self) -> str | None:
        return _SIDES[self][1]

    def implies(self, other: "Notion") -> bool:
        return other in implied_by(self)


_SIDES = {
    Notion.EF: (None, None),
    Notion.EFX_G0: ("0", None),
    Notion.EFX_GPLUS: ("+", None),
    Notion.EFX_C0: (None, "0"),
    Notion.EFX_CMINUS: (None, "-"),
    Notion.EFX_00: ("0", "0"),
    Notion.EFX_0MINUS: ("0", "-"),
    Notion.EFX_PLUS0: ("+", "0"),
    Notion.EFX_PLUSMINUS: ("+", "-"),
}

# Direct implications (Hasse diagram); implied_by() takes the closure.
IMPLICATIONS: dict[Notion, tuple[Notion, ...]] = {
    Notion.EF: (Notion.EFX_00,),
    Notion.EFX_00: (Notion.EFX_0MINUS, Notion.EFX_PLUS0),
    Notion.EFX_0MINUS: (Notion.EFX_PLUSMINUS, Notion.EFX_G0),
    Notion.EFX_PLUS0: (Notion.EFX_PLUSMINUS, Notion.EFX_C0),
    Notion.EFX_PLUSMINUS: (Notion.EFX_GPLUS, Notion.EFX_CMINUS),
    Notion.EFX_G0: (Notion.EFX_GPLUS,),
    Notion.EFX_C0: (Notion.EFX_CMINUS,),
    Notion.EFX_GPLUS: (),
    Notion.EFX_CMINUS: (),
}


def implied_by(notion: Notion) -> frozenset[Notion]:
    """Every notion implied by ``notion``, itself included."""
    seen = {notion}
    stack = [notion]
    while stack:
        for nxt in IMPLICATIONS[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return frozenset(seen)


def parse_notion(name: str) -> Notion:
    """Accepts the short names (``efx0-``) and spelled-out ones (``efx0minus``)."""
    key = name.strip().lower().replace("minus", "-").replace("plus", "+")
    try:
        return Notion(key)
    except ValueError:
        valid = ", ".join(x.value for x in Notion)
        raise EfxError(f"unknown notion {name!r}; expected one of {valid}") from None


@dataclass(frozen=True)
class Allocation:
    """Edge -> agent map; ``owner[e] is None`` means e is unallocated."""

    owner: tuple

    @classmethod
    def empty(cls, m: int) -> "Allocation":
        return cls((None,) * m)

    @classmethod
    def from_mapping(cls, m: int, mapping: Mapping[int, int]) -> "Allocation":
        owner = [None] * m
        for e, a in mapping.items():
            owner[e] = a
        return cls(tuple(owner))

    @property
    def m(self) -> int:
        return len(self.owner)

    def is_complete(self) -> bool:
        return all(a is not None for a in self.owner)

    def unallocated(self) -> list[int]:
        return [e for e, a in enumerate(self.owner) if a is None]

    def bundles(self, n: int) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(n)]
        for e, a in enumerate(self.owner):
            if a is not None:
                out[a].append(e)
        return out

    def is_orientation(self, instance: Instance) -> bool:
        return all(a is None or a in instance.edges[e].endpoints for e, a in enumerate(self.owner))

    def as_dict(self) -> dict[int, int]:
        return {e: a for e, a in enumerate(self.owner) if a is not None}


class Orientation(Allocation):
    """An allocation in which every allocated edge sits with an endpoint."""

    @classmethod
    def of(cls, instance: Instance, owner: Sequence) -> "Orientation":
        owner = tuple(owner)
        for e, a in enumerate(owner):
            if a is not None and a not in instance.edges[e].endpoints:
                raise NotAnOrientation(f"edge {e} assigned to non-endpoint agent {a}")
        return cls(owner)


def validate_allocation(instance: Instance, alloc: Allocation) -> None:
    if alloc.m != instance.m:
        raise InstanceError(f"allocation covers {alloc.m} edges, instance has {instance.m}")
    for e, a in enumerate(alloc.owner):
        if a is not None and not (isinstance(a, int) and 0 <= a < instance.n):
            raise InstanceError(f"edge {e} owned by unknown agent {a!r}")


# --- JSON -----------------------------------------------------------------


def _as_int(obj, what: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise FormatError(f"{what} must be an integer, got {obj!r}")
    return obj


def instance_to_dict(instance: Instance) -> dict:
    val = instance.valuation
    if not isinstance(val, AdditiveValuation):
        raise FormatError("only additive valuations can be serialized")
    values = []
    for (agent, eid), v in sorted(val.table.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        f = Fraction(v)
        values.append({"agent": agent, "edge": eid, "num": f.numerator, "den": f.denominator})
    return {
        "agents": instance.n,
        "edges": [{"id": e.id, "u": e.u, "v": e.v} for e in instance.edges],
        "values": values,
    }


def instance_from_dict(doc: Mapping) -> Instance:
    if not isinstance(doc, Mapping):
        raise FormatError("instance document must be a JSON object")
    try:
        n = _as_int(doc["agents"], "agents")
        raw_edges = doc.get("edges", [])
        raw_values = doc.get("values", [])
    except KeyError as exc:
        raise FormatError(f"missing key {exc}") from None
    pairs: dict[int, tuple[int, int]] = {}
    for item in raw_edges:
        try:
            k = _as_int(item["id"], "edge id")
            pairs[k] = (_as_int(item["u"], "edge endpoint"), _as_int(item["v"], "edge endpoint"))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad edge entry {item!r}: {exc}") from None
    if sorted(pairs) != list(range(len(pairs))) or len(pairs) != len(raw_edges):
        raise FormatError("edge ids must be exactly 0..m-1 without repeats")
    values: dict[tuple[int, int], Fraction] = {}
    for item in raw_values:
        try:
            agent = _as_int(item["agent"], "agent")
            eid = _as_int(item["edge"], "edge")
            num = _as_int(item["num"], "num")
            den = _as_int(item.get("den", 1), "den")
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad value entry {item!r}: {exc}") from None
        if den == 0:
            raise FormatError(f"zero denominator in {item!r}")
        if (agent, eid) in values:
            raise FormatError(f"duplicate value entry for agent {agent}, edge {eid}")
        values[(agent, eid)] = Fraction(num, den)
    return build_instance(n, [pairs[k] for k in range(len(pairs))], values)


def allocation_to_dict(alloc: Allocation) -> dict:
    return {"owner": {str(e): a for e, a in enumerate(alloc.owner) if a is not None}}


def allocation_from_dict(doc: Mapping, m: int) -> Allocation:
    if not isinstance(doc, Mapping) or not isinstance(doc.get("owner"), Mapping):
        raise FormatError('allocation document must look like {"owner": {"0": 1, ...}}')
    owner: list = [None] * m
    for key, agent in doc["owner"].items():
        try:
            e = int(key)
        except ValueError:
            raise FormatError(f"edge key {key!r} is not an integer") from None
        if not 0 <= e < m:
            raise FormatError(f"edge {e} out of range 0..{m - 1}")
        owner[e] = _as_int(agent, "owner")
    return Allocation(tuple(owner))


def dumps(doc) -> str:
    """Canonical JSON text used for every file this package writes."""
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from None
    return instance_from_dict(doc)


def load_allocation(path, m: int) -> Allocation:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from None
    return allocation_from_dict(doc, m)
