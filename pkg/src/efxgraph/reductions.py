"""Instance compilers for two hardness constructions, with certificate
translators in both directions.

* (3,B2)-SAT -> EFX^+_- orientations: variable pairs joined by a value-2
  edge, clause agents joined to their literals by value-1 edges, and every
  agent anchored to a chore triangle by a -1 edge.
* Circuit-SAT -> EFX^0_0 allocations: every wire is a priceless edge whose
  orientation encodes its truth value (upper endpoint = True); OR, NOT and
  WIRE gadgets connect them and a terminator forces the output to True.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .core import Allocation, EfxError, Instance, Notion, Orientation, build_instance
from .fairness import passes


class ReductionError(EfxError):
    pass


class ParseError(ReductionError, ValueError):
    pass


class NotThreeDistinctLiterals(ParseError):
    pass


class OccurrenceCountViolated(ParseError):
    pass


class CycleDetected(ParseError):
    pass


class UndrivenWire(ParseError):
    pass


class MultipleDrivers(ParseError):
    pass


class ContainsAnd(ReductionError):
    pass


class NotSatisfying(ReductionError):
    pass


class OutputFalse(ReductionError):
    pass


class NotEfx(ReductionError):
    pass


@dataclass(frozen=True)
class ReductionBundle:
    """A compiled instance plus what is needed to translate certificates.

    ``roles[e]`` is a list of tags for edge ``e`` (a wire edge shared by two
    gadgets carries one tag per gadget).
    """

    kind: str
    instance: Instance
    roles: list
    params: dict
    source: object

    def to_map(self) -> dict:
        if self.kind == "sat3b2":
            src = {"n_vars": self.source.n_vars, "clauses": [list(c) for c in self.source.clauses]}
        else:
            src = circuit_to_dict(self.source)
        return {"kind": self.kind, "params": self.params, "roles": self.roles, "source": src}


def bundle_from_map(instance: Instance, data: dict) -> ReductionBundle:
    kind = data.get("kind")
    src = data.get("source", {})
    if kind == "sat3b2":
        source = Sat3B2Formula(src["n_vars"], tuple(tuple(c) for c in src["clauses"]))
    elif kind == "circuit":
        source = circuit_from_dict(src)
    else:
        raise ReductionError(f"unknown reduction kind {kind!r}")
    return ReductionBundle(kind, instance, data["roles"], data["params"], source)


# --- (3,B2)-SAT ----------------------------------------------------------------


@dataclass(frozen=True)
class Sat3B2Formula:
    n_vars: int
    clauses: tuple  # tuples of non-zero ints, DIMACS style

    @property
    def m(self) -> int:
        return len(self.clauses)

    def occurrences(self, var: int, positive: bool) -> list[int]:
        """Clause indices containing the literal, ascending."""
        lit = var if positive else -var
        return [j for j, c in enumerate(self.clauses) if lit in c]

    def satisfied_by(self, assignment) -> bool:
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {self.m}"]
        lines += [" ".join(str(l) for l in c) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def validate_sat3b2(formula: Sat3B2Formula) -> Sat3B2Formula:
    for j, c in enumerate(formula.clauses):
        if len(c) != 3 or len(set(c)) != 3:
            raise NotThreeDistinctLiterals(f"clause {j + 1} {list(c)} needs three distinct literals")
        for l in c:
            if l == 0 or abs(l) > formula.n_vars:
                raise ParseError(f"clause {j + 1} mentions variable {abs(l)} outside 1..{formula.n_vars}")
    for v in range(1, formula.n_vars + 1):
        pos = len(formula.occurrences(v, True))
        neg = len(formula.occurrences(v, False))
        if pos != 2 or neg != 2:
            raise OccurrenceCountViolated(f"variable {v} occurs {pos} times positive and {neg} times negative; need 2 and 2")
    return formula


def parse_sat3b2(text: str) -> Sat3B2Formula:
    header = None
    tokens: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad header line {raw!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"bad header line {raw!r}") from None
            continue
        if header is None:
            raise ParseError("clause before the 'p cnf' header")
        try:
            tokens.extend(int(t) for t in line.split())
        except ValueError:
            raise ParseError(f"non-integer token in {raw!r}") from None
    if header is None:
        raise ParseError("missing 'p cnf' header")
    clauses, cur = [], []
    for t in tokens:
        if t == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(t)
    if cur:
        raise ParseError("last clause is not terminated by 0")
    n, m = header
    if len(clauses) != m:
        raise ParseError(f"header announces {m} clauses, found {len(clauses)}")
    return validate_sat3b2(Sat3B2Formula(n, tuple(clauses)))


def _sat_layout(formula: Sat3B2Formula):
    n, m = formula.n_vars, formula.m
    t_vertex = lambda i: 2 * i  # noqa: E731  (0-based variable index)
    f_vertex = lambda i: 2 * i + 1  # noqa: E731
    c_vertex = lambda j: 2 * n + j  # noqa: E731
    delta = (2 * n + m, 2 * n + m + 1, 2 * n + m + 2)
    return t_vertex, f_vertex, c_vertex, delta


def build_sat_orientation_instance(formula: Sat3B2Formula) -> ReductionBundle:
    validate_sat3b2(formula)
    n, m = formula.n_vars, formula.m
    T, F, C, (d1, d2, d3) = _sat_layout(formula)
    edges, values, roles = [], {}, []

    def add(u, v, val, role):
        e = len(edges)
        edges.append((u, v))
        values[(u, e)] = val
        values[(v, e)] = val
        roles.append([role])

    for i in range(n):
        add(T(i), F(i), 2, {"role": "variable", "var": i + 1})
    for j, clause in enumerate(formula.clauses):
        for lit in clause:
            end = T(abs(lit) - 1) if lit > 0 else F(abs(lit) - 1)
            add(C(j), end, 1, {"role": "clause-literal", "clause": j + 1, "literal": lit})
    for a, b in ((d1, d2), (d2, d3), (d1, d3)):
        add(a, b, -1, {"role": "triangle"})
    for i in range(n):
        add(T(i), d1, -1, {"role": "penalty", "var": i + 1, "side": "T"})
        add(F(i), d1, -1, {"role": "penalty", "var": i + 1, "side": "F"})
    for j in range(m):
        add(C(j), d1, -1, {"role": "penalty", "clause": j + 1})
    inst = build_instance(2 * n + m + 3, edges, values)
    params = {"variable_value": 2, "literal_value": 1, "chore_value": -1}
    return ReductionBundle("sat3b2", inst, roles, params, formula)


def _role(bundle: ReductionBundle, e: int) -> dict:
    return bundle.roles[e][0]


def sat_assignment_to_orientation(bundle: ReductionBundle, assignment) -> Orientation:
    """``assignment[i]`` is the truth value of variable i+1."""
    formula = bundle.source
    assignment = [bool(x) for x in assignment]
    if len(assignment) != formula.n_vars:
        raise NotSatisfying(f"expected {formula.n_vars} truth values, got {len(assignment)}")
    if not formula.satisfied_by(assignment):
        raise NotSatisfying("the assignment leaves a clause false")
    inst = bundle.instance
    T, F, C, (d1, d2, d3) = _sat_layout(formula)
    owner = []
    for e in inst.edges:
        r = _role(bundle, e.id)
        kind = r["role"]
        if kind == "variable":
            i = r["var"] - 1
            owner.append(T(i) if assignment[i] else F(i))
        elif kind == "clause-literal":
            lit = r["literal"]
            true_lit = assignment[abs(lit) - 1] == (lit > 0)
            clause_agent = C(r["clause"] - 1)
            owner.append(clause_agent if true_lit else e.other(clause_agent))
        elif kind == "triangle":
            # d1 <- (d1,d2), d2 <- (d2,d3), d3 <- (d1,d3)
            owner.append({(d1, d2): d1, (d2, d3): d2, (d1, d3): d3}[e.endpoints])
        else:
            owner.append(e.other(d1))
    return Orientation.of(inst, owner)


def orientation_to_sat_assignment(bundle: ReductionBundle, orientation) -> list[bool]:
    inst = bundle.instance
    if not passes(inst, orientation, Notion.EFX_PLUSMINUS):
        raise NotEfx("the orientation is not EFX^+_-")
    owner = orientation.owner if hasattr(orientation, "owner") else orientation
    T, _, _, _ = _sat_layout(bundle.source)
    out = [False] * bundle.source.n_vars
    for e in inst.edges:
        r = _role(bundle, e.id)
        if r["role"] == "variable":
            i = r["var"] - 1
            out[i] = owner[e.id] == T(i)
    if not bundle.source.satisfied_by(out):
        raise ReductionError("EFX^+_- orientation decoded to an unsatisfying assignment")
    return out


def build_chore_anchor_gadget() -> Instance:
    """Agent 0 hangs off vertex 1 of the chore triangle 1-2-3 (all -1); in
    every EFX^+_- orientation agent 0 has to take her edge to vertex 1."""
    edges = [(0, 1), (1, 2), (2, 3), (1, 3)]
    values = {}
    for e, (u, v) in enumerate(edges):
        values[(u, e)] = -1
        values[(v, e)] = -1
    return build_instance(4, edges, values)


# --- circuits --------------------------------------------------------------------


GATE_ARITY = {"AND": 2, "OR": 2, "NOT": 1}


@dataclass(frozen=True)
class Gate:
    name: str
    op: str
    args: tuple


@dataclass(frozen=True)
class Circuit:
    inputs: tuple
    gates: tuple  # topological order
    output: str

    def evaluate(self, assignment) -> dict[str, bool]:
        """Truth value of every wire; ``assignment`` maps input names (or is a
        sequence in input order)."""
        if not isinstance(assignment, dict):
            assignment = dict(zip(self.inputs, assignment))
        val = {x: bool(assignment[x]) for x in self.inputs}
        for g in self.gates:
            a = [val[x] for x in g.args]
            val[g.name] = (not a[0]) if g.op == "NOT" else (a[0] or a[1]) if g.op == "OR" else (a[0] and a[1])
        return val

    def output_value(self, assignment) -> bool:
        return self.evaluate(assignment)[self.output]

    def to_text(self) -> str:
        lines = [f"input {x}" for x in self.inputs]
        lines += [f"gate {g.name} = {g.op} {' '.join(g.args)}" for g in self.gates]
        lines.append(f"output {self.output}")
        return "\n".join(lines) + "\n"


def circuit_to_dict(c: Circuit) -> dict:
    return {"inputs": list(c.inputs), "gates": [[g.name, g.op, list(g.args)] for g in c.gates], "output": c.output}


def circuit_from_dict(d: dict) -> Circuit:
    gates = tuple(Gate(n, op, tuple(args)) for n, op, args in d["gates"])
    return validate_circuit(tuple(d["inputs"]), gates, d["output"])


_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.~\-\[\]]*$")


def validate_circuit(inputs, gates, output) -> Circuit:
    drivers: dict[str, str] = {}
    for x in inputs:
        if x in drivers:
            raise MultipleDrivers(f"wire {x!r} is declared twice")
        drivers[x] = "input"
    by_name = {}
    for g in gates:
        if g.name in drivers:
            raise MultipleDrivers(f"wire {g.name!r} has more than one driver")
        drivers[g.name] = g.op
        by_name[g.name] = g
    for g in gates:
        for a in g.args:
            if a not in drivers:
                raise UndrivenWire(f"gate {g.name!r} reads undriven wire {a!r}")
    if output is None:
        raise ParseError("no output declared")
    if output not in drivers:
        raise UndrivenWire(f"output wire {output!r} is undriven")
    # topological order, keeping file order where possible
    order, state = [], {}

    def visit(name, stack):
        if name not in by_name or state.get(name) == 2:
            return
        if state.get(name) == 1:
            raise CycleDetected(f"cycle through wire {name!r}: {' -> '.join(stack + [name])}")
        state[name] = 1
        for a in by_name[name].args:
            visit(a, stack + [name])
        state[name] = 2
        order.append(by_name[name])

    for g in gates:
        visit(g.name, [])
    return Circuit(tuple(inputs), tuple(order), output)


def parse_circuit(text: str) -> Circuit:
    inputs, gates, output = [], [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        if kw == "input" and len(parts) == 2 and _NAME.match(parts[1]):
            inputs.append(parts[1])
        elif kw == "output" and len(parts) == 2 and _NAME.match(parts[1]):
            if output is not None:
                raise ParseError(f"line {lineno}: second output declaration")
            output = parts[1]
        elif kw == "gate" and len(parts) >= 4 and parts[2] == "=":
            name, op, args = parts[1], parts[3].upper(), tuple(parts[4:])
            if op not in GATE_ARITY or len(args) != GATE_ARITY[op]:
                raise ParseError(f"line {lineno}: expected AND/OR with 2 inputs or NOT with 1: {raw!r}")
            if not _NAME.match(name) or not all(_NAME.match(a) for a in args):
                raise ParseError(f"line {lineno}: bad wire name in {raw!r}")
            gates.append(Gate(name, op, args))
        else:
            raise ParseError(f"line {lineno}: cannot parse {raw!r}")
    return validate_circuit(inputs, gates, output)


def eliminate_and(circuit: Circuit) -> Circuit:
    """AND(a, b) = NOT(OR(NOT a, NOT b))."""
    used = set(circuit.inputs) | {g.name for g in circuit.gates}

    def fresh(base):
        k = 0
        while f"{base}~{k}" in used:
            k += 1
        used.add(f"{base}~{k}")
        return f"{base}~{k}"

    out = []
    for g in circuit.gates:
        if g.op != "AND":
            out.append(g)
            continue
        na, nb, o = fresh(g.name), fresh(g.name), fresh(g.name)
        out += [Gate(na, "NOT", (g.args[0],)), Gate(nb, "NOT", (g.args[1],)),
                Gate(o, "OR", (na, nb)), Gate(g.name, "NOT", (o,))]
    return Circuit(circuit.inputs, tuple(out), circuit.output)


# Gadgets are described on local vertex names; a1/a1' (and a2/a2' for OR) are
# input wires, the output wire is a2/a2' (a3/a3' for OR).  "x'" is the lower
# endpoint.  Values: "P" priceless, "e1" = EPS1, "e2" = EPS2.
EPS1, EPS2 = 2, 1

GADGET_EDGES = {
    "NOT": [("a1", "a2", "e1"), ("a1'", "a2'", "e1")],
    "WIRE": [("a1", "a2'", "e1"), ("a1'", "a2", "e1")],
    "TERM": [("a1", "a1'", "P"), ("a1", "a2'", "e1"), ("a1'", "a2'", "e1"), ("a1'", "a2", "e1")],
    "OR": [("b1", "b1'", "P"), ("b2", "b2'", "P"), ("b3", "b3'", "P"),
           ("a1'", "b1'", "e2"), ("b1'", "b2'", "e1"), ("b2'", "b3'", "e1"), ("b3'", "a2'", "e2"),
           ("b2'", "a3", "e2"), ("a1", "a3'", "e1"), ("a2", "a3'", "e1")],
}

# owner of every internal edge (by local endpoints) for each input pattern
_NOT_DONE = {
    (True,): {("a1", "a2"): "a2", ("a1'", "a2'"): "a1'"},
    (False,): {("a1", "a2"): "a1", ("a1'", "a2'"): "a2'"},
}
_WIRE_DONE = {
    (True,): {("a1", "a2'"): "a2'", ("a1'", "a2"): "a1'"},
    (False,): {("a1", "a2'"): "a1", ("a1'", "a2"): "a2"},
}
_TERM_DONE = {
    (True,): {("a1", "a1'"): "a1", ("a1", "a2'"): "a2'", ("a1'", "a2'"): "a1'", ("a1'", "a2"): "a1'"},
}
_OR_DONE = {
    (True, True): {
        ("b1", "b1'"): "b1", ("b2", "b2'"): "b2", ("b3", "b3'"): "b3",
        ("a1'", "b1'"): "a1'", ("b1'", "b2'"): "b1'", ("b2'", "b3'"): "b3'", ("b3'", "a2'"): "a2'",
        ("b2'", "a3"): "b2'", ("a1", "a3'"): "a3'", ("a2", "a3'"): "a3'"},
    (True, False): {
        ("b1", "b1'"): "b1'", ("b2", "b2'"): "b2", ("b3", "b3'"): "b3",
        ("a1'", "b1'"): "a1'", ("b1'", "b2'"): "b2'", ("b2'", "b3'"): "b3'", ("b3'", "a2'"): "b3'",
        ("b2'", "a3"): "b2'", ("a1", "a3'"): "a3'", ("a2", "a3'"): "a2"},
    (False, True): {
        ("b1", "b1'"): "b1", ("b2", "b2'"): "b2", ("b3", "b3'"): "b3'",
        ("a1'", "b1'"): "b1'", ("b1'", "b2'"): "b1'", ("b2'", "b3'"): "b2'", ("b3'", "a2'"): "a2'",
        ("b2'", "a3"): "b2'", ("a1", "a3'"): "a1", ("a2", "a3'"): "a3'"},
    (False, False): {
        ("b1", "b1'"): "b1", ("b2", "b2'"): "b2'", ("b3", "b3'"): "b3",
        ("a1'", "b1'"): "b1'", ("b1'", "b2'"): "b1'", ("b2'", "b3'"): "b3'", ("b3'", "a2'"): "b3'",
        ("b2'", "a3"): "a3", ("a1", "a3'"): "a1", ("a2", "a3'"): "a2"},
}
GADGET_COMPLETIONS = {"NOT": _NOT_DONE, "WIRE": _WIRE_DONE, "TERM": _TERM_DONE, "OR": _OR_DONE}


@dataclass
class _Builder:
    n: int = 0
    edges: list = field(default_factory=list)
    kinds: list = field(default_factory=list)  # "P", "e1", "e2"
    roles: list = field(default_factory=list)
    wires: dict = field(default_factory=dict)  # wire -> (upper, lower, edge id)
    gadgets: list = field(default_factory=list)

    def vertex(self) -> int:
        self.n += 1
        return self.n - 1

    def edge(self, u, v, kind, role) -> int:
        self.edges.append((u, v))
        self.kinds.append(kind)
        self.roles.append([role])
        return len(self.edges) - 1

    def wire(self, name, role) -> tuple[int, int, int]:
        up, low = self.vertex(), self.vertex()
        e = self.edge(up, low, "P", role)
        self.wires[name] = (up, low, e)
        return self.wires[name]

    def gadget(self, kind, gid, local: dict, inputs, output) -> None:
        """Add a gadget's internal edges; ``local`` maps local names to
        vertices (missing ones are created)."""
        # internal priceless pairs first get their vertices
        for u, v, _ in GADGET_EDGES[kind]:
            for x in (u, v):
                if x not in local:
                    local[x] = self.vertex()
        edge_ids = {}
        for u, v, val in GADGET_EDGES[kind]:
            edge_ids[(u, v)] = self.edge(local[u], local[v], val, {"role": "gadget", "gadget": gid, "kind": kind, "local": [u, v]})
        for pos, w in enumerate(inputs):
            self.roles[self.wires[w][2]].append({"role": "gadget-input", "gadget": gid, "kind": kind, "position": pos})
        if output is not None:
            self.roles[self.wires[output][2]].append({"role": "gadget-output", "gadget": gid, "kind": kind})
        self.gadgets.append({"id": gid, "kind": kind, "inputs": list(inputs), "output": output,
                             "local": dict(local), "edges": {f"{u}|{v}": e for (u, v), e in edge_ids.items()}})


def _wire_locals(b: _Builder, w: str, upper: str, lower: str) -> dict:
    up, low, _ = b.wires[w]
    return {upper: up, lower: low}


def build_circuit_allocation_instance(circuit: Circuit) -> ReductionBundle:
    if any(g.op == "AND" for g in circuit.gates):
        raise ContainsAnd("eliminate AND gates first")
    b = _Builder()
    for x in circuit.inputs:
        b.wire(x, {"role": "wire", "wire": x, "input": True})
    copies = 0
    for g in circuit.gates:
        args = list(g.args)
        if g.op == "OR" and args[0] == args[1]:
            # an OR reading one wire twice would need a parallel edge
            copy = f"{g.name}~copy{copies}"
            copies += 1
            b.wire(copy, {"role": "wire", "wire": copy, "input": False})
            local = _wire_locals(b, args[1], "a1", "a1'") | _wire_locals(b, copy, "a2", "a2'")
            b.gadget("WIRE", f"{copy}", local, [args[1]], copy)
            args[1] = copy
        b.wire(g.name, {"role": "wire", "wire": g.name, "input": False})
        if g.op == "NOT":
            local = _wire_locals(b, args[0], "a1", "a1'") | _wire_locals(b, g.name, "a2", "a2'")
        else:
            local = (_wire_locals(b, args[0], "a1", "a1'") | _wire_locals(b, args[1], "a2", "a2'")
                     | _wire_locals(b, g.name, "a3", "a3'"))
        b.gadget(g.op, g.name, local, args, g.name)
    b.gadget("TERM", "terminator", _wire_locals(b, circuit.output, "a2", "a2'"), [circuit.output], None)
    small = {"e1": EPS1, "e2": EPS2}
    bound = 1 + sum(small[k] for k in b.kinds if k != "P")
    values = {}
    for e, ((u, v), k) in enumerate(zip(b.edges, b.kinds)):
        val = bound if k == "P" else small[k]
        values[(u, e)] = val
        values[(v, e)] = val
    inst = build_instance(b.n, b.edges, values)
    params = {"priceless": bound, "eps1": EPS1, "eps2": EPS2,
              "wires": {w: list(t) for w, t in b.wires.items()}, "gadgets": b.gadgets}
    return ReductionBundle("circuit", inst, b.roles, params, circuit)


def priceless_bound(instance: Instance, priceless_edges) -> int:
    """1 + the sum over the other edges of the larger endpoint |value|."""
    skip = set(priceless_edges)
    total = 0
    for e in instance.edges:
        if e.id not in skip:
            total += max(abs(instance.value(a, (e.id,))) for a in e.endpoints)
    return total + 1


def is_priceless(instance: Instance, agent: int, e: int) -> bool:
    """Every bundle containing e beats every bundle without it, for ``agent``."""
    others = sum(abs(instance.value(agent, (f,))) for f in instance.incident[agent] if f != e)
    return instance.value(agent, (e,)) > others


def orientation_suffices(instance: Instance) -> bool:
    """Whether every edge is a good for both endpoints, every agent has
    exactly one priceless incident edge and that edge is priceless to both
    its endpoints.  On such graphs every EFX^0_0 allocation is an
    orientation, so searching orientations is enough."""
    for e in instance.edges:
        if not all(instance.is_good(a, e.id) for a in e.endpoints):
            return False
    for a in range(instance.n):
        mine = [e for e in instance.incident[a] if is_priceless(instance, a, e)]
        if len(mine) != 1:
            return False
        if not is_priceless(instance, instance.edges[mine[0]].other(a), mine[0]):
            return False
    return True


def _wire_values(bundle: ReductionBundle, inputs) -> dict[str, bool]:
    circuit: Circuit = bundle.source
    val = circuit.evaluate(inputs)
    for gd in bundle.params["gadgets"]:
        if gd["kind"] == "WIRE":
            val[gd["output"]] = val[gd["inputs"][0]]
    return val


def circuit_assignment_to_allocation(bundle: ReductionBundle, inputs) -> Allocation:
    """Orient every wire by its value and complete each gadget."""
    circuit: Circuit = bundle.source
    if not isinstance(inputs, dict):
        inputs = list(inputs)
        if len(inputs) != len(circuit.inputs):
            raise ReductionError(f"expected {len(circuit.inputs)} input values, got {len(inputs)}")
    if not circuit.output_value(inputs):
        raise OutputFalse("the assignment makes the output False")
    val = _wire_values(bundle, inputs)
    owner: list = [None] * bundle.instance.m
    for w, (up, low, e) in bundle.params["wires"].items():
        owner[e] = up if val[w] else low
    for gd in bundle.params["gadgets"]:
        key = tuple(val[w] for w in gd["inputs"])
        done = GADGET_COMPLETIONS[gd["kind"]][key]
        for pair, e in gd["edges"].items():
            u, v = pair.split("|")
            owner[e] = gd["local"][done[(u, v)]]
    return Allocation(tuple(owner))


def allocation_to_circuit_assignment(bundle: ReductionBundle, allocation) -> list[bool]:
    inst = bundle.instance
    if not passes(inst, allocation, Notion.EFX_00):
        raise NotEfx("the allocation is not EFX^0_0")
    owner = allocation.owner if hasattr(allocation, "owner") else allocation
    wires = bundle.params["wires"]
    out = []
    for x in bundle.source.inputs:
        up, _, e = wires[x]
        out.append(owner[e] == up)
    return out


def gadget_instance(kind: str) -> tuple[Instance, dict, dict]:
    """A gadget on its own: instance, local-name -> vertex, and
    local-pair -> edge id (wire edges are named by their endpoints too)."""
    b = _Builder()
    ins = {"NOT": 1, "WIRE": 1, "OR": 2, "TERM": 0}[kind]
    names = ["a1", "a2", "a3"]
    local = {}
    wires = []
    for k in range(ins):
        w = f"in{k}"
        b.wire(w, {"role": "wire", "wire": w, "input": True})
        local |= _wire_locals(b, w, names[k], names[k] + "'")
        wires.append(w)
    out_name = names[ins] if kind != "TERM" else "a2"
    b.wire("out", {"role": "wire", "wire": "out", "input": False})
    local |= _wire_locals(b, "out", out_name, out_name + "'")
    b.gadget(kind, kind, local, wires, None if kind == "TERM" else "out")
    small = {"e1": EPS1, "e2": EPS2}
    bound = 1 + sum(small[k] for k in b.kinds if k != "P")
    values = {}
    for e, ((u, v), k) in enumerate(zip(b.edges, b.kinds)):
        val = bound if k == "P" else small[k]
        values[(u, e)] = val
        values[(v, e)] = val
    inst = build_instance(b.n, b.edges, values)
    loc = b.gadgets[-1]["local"]
    edge_of = {}
    for e, (u, v) in enumerate(b.edges):
        inv = {x: name for name, x in loc.items()}
        edge_of[(inv[u], inv[v])] = e
    return inst, loc, edge_of


def priceless_matching_instance(small: int = 1) -> Instance:
    """Four agents, priceless edges (0,1) and (2,3), and a small good on each
    of the four edges between the two pairs.  No allocation is EFX^0_0.

    With fewer connecting edges an EFX^0_0 allocation exists: an agent who
    does not hold her priceless edge may keep a connecting good.
    """
    edges = [(0, 1), (2, 3), (0, 2), (0, 3), (1, 2), (1, 3)]
    bound = 4 * small + 1
    values = {}
    for e, (u, v) in enumerate(edges):
        val = bound if e < 2 else small
        values[(u, e)] = val
        values[(v, e)] = val
    return build_instance(4, edges, values)


def brute_force_sat(formula: Sat3B2Formula):
    """First satisfying assignment in lexicographic order (False first), or None."""
    for bits in itertools.product((False, True), repeat=formula.n_vars):
        if formula.satisfied_by(bits):
            return list(bits)
    return None
