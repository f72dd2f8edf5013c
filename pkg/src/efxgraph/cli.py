"""Command-line interface: check, solve, decide, reduce, certify, oracle, gen.

Exit codes: 0 success / holds / exists, 10 fails / does not exist, 2 usage
error, 3 invalid input, 4 search budget exceeded, 5 a solver output failed
its own re-check.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass, field

from . import generate
from .core import (
    Allocation,
    EfxError,
    Instance,
    InstanceKind,
    Notion,
    allocation_to_dict,
    dumps,
    implied_by,
    instance_from_dict,
    instance_to_dict,
    load_allocation,
    load_instance,
    parse_notion,
)
from .fairness import check, passes
from .goods_chores import (
    chores_ef_allocation,
    chores_efx0_orientation,
    chores_efxminus_orientation,
    goods_efxplus_orientation,
)
from .mixed_allocation import (
    DegenerateAllChores,
    efxplus0_allocation,
    efxplusminus_allocation,
    trace as efx0minus_trace,
)
from .mixed_orientation import (
    NotAPath,
    NotAStar,
    UnsupportedSignPattern,
    is_connected,
    path_efx0minus_decide,
    star_center,
    star_efx00_decide,
    tree_efxplus0_orientation,
)
from .oracle import DEFAULT_BUDGET, BudgetExceeded, DecideResult, Mode, SearchSpec, oracle_count, oracle_exists
from . import reductions as red

EXIT_OK = 0
EXIT_FALSE = 10
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_BUDGET = 4
EXIT_MISMATCH = 5

TRACE_VERSION = 1

NP_NOTICE = ("notice: deciding EFX^0_0 allocations is NP-hard in general; "
             "falling back to exhaustive search within the budget")


class UsageError(EfxError):
    pass


class RecheckFailed(EfxError):
    pass


def parse_mode(text: str) -> Mode:
    key = text.strip().lower()
    if key in ("orientation", "orientations"):
        return Mode.ORIENTATIONS
    if key in ("allocation", "allocations"):
        return Mode.ALLOCATIONS
    raise UsageError(f"unknown mode {text!r}; expected allocation or orientation")


# --- routing -----------------------------------------------------------------


@dataclass
class Outcome:
    """What a route produced: a verdict, a witness, and optional trace steps.

    Every route either constructs, decides exactly, or searches exhaustively,
    so ``exists=False`` is always a proof of non-existence.
    """

    route: str
    exists: bool
    witness: Allocation | None = None
    steps: list = field(default_factory=list)


def _is_tree(instance: Instance) -> bool:
    return instance.m == instance.n - 1 and is_connected(instance)


def _is_star(instance: Instance) -> bool:
    try:
        star_center(instance)
    except NotAStar:
        return False
    return True


def _detect_shape(instance: Instance) -> str:
    if instance.m >= 1 and _is_star(instance):
        return "star"
    if _is_tree(instance):
        if all(len(x) <= 2 for x in instance.incident):
            return "path"
        return "tree"
    return "general"


def _oracle(instance, mode, notion, budget, jobs, route="oracle") -> Outcome:
    res = oracle_exists(instance, SearchSpec(mode, notion, budget, jobs))
    return Outcome(route, res.exists, res.witness)


def _from_decider(route: str, res: DecideResult) -> Outcome:
    return Outcome(route, res.exists, res.witness)


def route_orientation(instance: Instance, notion: Notion, shape: str = "auto", budget: int = DEFAULT_BUDGET,
                      jobs: int = 1) -> Outcome:
    kind = instance.kind()
    detected = _detect_shape(instance)
    if shape != "auto":
        ok = {"star": detected == "star", "path": detected == "path" or (detected == "star" and instance.m <= 2),
              "tree": _is_tree(instance)}[shape]
        if not ok:
            raise UsageError(f"the graph is not a {shape}")
        detected = shape
    if kind is InstanceKind.GOODS and notion in (Notion.EFX_GPLUS, Notion.EFX_PLUSMINUS):
        return Outcome("goods-efx+-orientation", True, goods_efxplus_orientation(instance))
    if kind is InstanceKind.CHORES and notion is Notion.EFX_C0:
        return _from_decider("chores-efx0-orientation", chores_efx0_orientation(instance))
    if kind is InstanceKind.CHORES and notion is Notion.EFX_CMINUS:
        return _from_decider("chores-efx--orientation", chores_efxminus_orientation(instance))
    if notion in (Notion.EFX_00, Notion.EFX_0MINUS):
        if detected == "star":
            return _from_decider("star-decider", star_efx00_decide(instance, notion))
        if detected == "path":
            try:
                return _from_decider("path-decider", path_efx0minus_decide(instance))
            except (NotAPath, UnsupportedSignPattern):
                if shape == "path":
                    raise
    if notion in implied_by(Notion.EFX_PLUS0) and _is_tree(instance):
        return Outcome("tree-efx+0-orientation", True, tree_efxplus0_orientation(instance))
    return _oracle(instance, Mode.ORIENTATIONS, notion, budget, jobs, "oracle-orientations")


def route_allocation(instance: Instance, notion: Notion, budget: int = DEFAULT_BUDGET, jobs: int = 1,
                     notice=None) -> Outcome:
    if notion in implied_by(Notion.EFX_0MINUS) - {Notion.EFX_PLUSMINUS}:
        alloc, steps = efx0minus_trace(instance)
        return Outcome("efx0-allocation", True, alloc, steps)
    if notion in (Notion.EFX_PLUS0, Notion.EFX_C0):
        try:
            return Outcome("efx+0-allocation", True, efxplus0_allocation(instance))
        except DegenerateAllChores:
            return _oracle(instance, Mode.ALLOCATIONS, notion, budget, jobs, "oracle-allocations")
    if notion in (Notion.EFX_PLUSMINUS, Notion.EFX_CMINUS):
        return Outcome("efx+--allocation", True, efxplusminus_allocation(instance))
    if notion is Notion.EF and instance.kind() is InstanceKind.CHORES and (instance.n >= 3 or instance.m == 0):
        return Outcome("chores-ef-allocation", True, chores_ef_allocation(instance))
    if notion is Notion.EFX_00 and notice is not None:
        notice(NP_NOTICE)
    return _oracle(instance, Mode.ALLOCATIONS, notion, budget, jobs, "oracle-allocations")


def route(instance: Instance, notion: Notion, mode: Mode, shape: str = "auto", budget: int = DEFAULT_BUDGET,
          jobs: int = 1, notice=None) -> Outcome:
    if mode is Mode.ORIENTATIONS:
        out = route_orientation(instance, notion, shape, budget, jobs)
    else:
        if shape != "auto":
            raise UsageError("--shape only applies to orientation mode")
        out = route_allocation(instance, notion, budget, jobs, notice)
    if out.exists:
        if not passes(instance, out.witness, notion):
            raise RecheckFailed(f"route {out.route} produced an allocation that fails {notion.value}")
        if mode is Mode.ORIENTATIONS and not out.witness.is_orientation(instance):
            raise RecheckFailed(f"route {out.route} produced a non-orientation")
    return out


def trace_document(instance: Instance, notion: Notion, out: Outcome) -> dict:
    return {
        "version": TRACE_VERSION,
        "notion": notion.value,
        "route": out.route,
        "agents": instance.n,
        "edges": instance.m,
        "steps": [s.to_dict() for s in out.steps],
        "final": allocation_to_dict(out.witness) if out.witness is not None else None,
    }


# --- helpers -----------------------------------------------------------------


def _write(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _read_text(path) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _read_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise red.ParseError(f"{path}: {exc}") from None


def _notion(text: str) -> Notion:
    try:
        return parse_notion(text)
    except EfxError as exc:
        raise UsageError(str(exc)) from None


def _notions(text: str) -> list[Notion]:
    if text.strip().lower() == "all":
        return list(Notion)
    return [_notion(text)]


# --- commands ----------------------------------------------------------------


def cmd_check(args) -> int:
    instance = load_instance(args.instance)
    alloc = load_allocation(args.allocation, instance.m)
    code = EXIT_OK
    reports = []
    for notion in _notions(args.notion):
        report = check(instance, alloc, notion, partial=args.partial)
        reports.append(report.to_dict(notion))
        print(f"{notion.value}: {'PASS' if report.ok else 'FAIL'}")
        for v in report[: args.show]:
            where = "" if v.edge is None else f" (removing edge {v.edge} from the {v.side.value.replace('_', ' ')})"
            print(f"  agent {v.envious} envies agent {v.envied}{where}")
        if not report.ok:
            code = EXIT_FALSE
    if args.out:
        _write(args.out, dumps(reports if len(reports) > 1 else reports[0]))
    return code


def _solve_or_decide(args, writing_allocation: bool) -> int:
    instance = load_instance(args.instance)
    notion = _notion(args.notion)
    mode = parse_mode(args.mode)
    out = route(instance, notion, mode, args.shape, args.budget, args.jobs,
                notice=lambda msg: print(msg, file=sys.stderr))
    if getattr(args, "trace", None):
        _write(args.trace, dumps(trace_document(instance, notion, out)))
    if not out.exists:
        print(f"NOT-EXISTS ({notion.value}, {mode.value}, route {out.route})")
        return EXIT_FALSE
    if writing_allocation:
        # the independent re-check, on what is about to be written
        report = check(instance, out.witness, notion)
        if not report.ok:
            print(f"{notion.value}: FAIL on re-check (route {out.route})", file=sys.stderr)
            return EXIT_MISMATCH
        text = dumps(allocation_to_dict(out.witness))
        _write(args.out, text)
        stream = sys.stdout if args.out else sys.stderr
        print(f"{notion.value}: PASS (route {out.route})", file=stream)
    else:
        print(f"EXISTS ({notion.value}, {mode.value}, route {out.route})")
        if args.out:
            _write(args.out, dumps(allocation_to_dict(out.witness)))
    return EXIT_OK


def cmd_solve(args) -> int:
    return _solve_or_decide(args, True)


def cmd_decide(args) -> int:
    return _solve_or_decide(args, False)


def cmd_oracle(args) -> int:
    instance = load_instance(args.instance)
    notion = _notion(args.notion)
    spec = SearchSpec(parse_mode(args.mode), notion, args.budget, args.jobs)
    if args.count:
        total = oracle_count(instance, spec)
        print(total)
        return EXIT_OK if total else EXIT_FALSE
    res = oracle_exists(instance, spec)
    if not res.exists:
        print("NOT-EXISTS")
        return EXIT_FALSE
    print("EXISTS")
    if args.out:
        _write(args.out, dumps(allocation_to_dict(res.witness)))
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "sat3b2":
        formula = generate.random_sat3b2(args.n, args.seed)
        _write(args.out, formula.to_dimacs())
        return EXIT_OK
    inst = generate.random_instance(args.kind, args.n, args.m, args.seed, args.lo, args.hi)
    _write(args.out, dumps(instance_to_dict(inst)))
    return EXIT_OK


def cmd_reduce(args) -> int:
    text = _read_text(args.input)
    if args.kind == "sat3b2":
        bundle = red.build_sat_orientation_instance(red.parse_sat3b2(text))
    else:
        circuit = red.parse_circuit(text)
        bundle = red.build_circuit_allocation_instance(red.eliminate_and(circuit))
    _write(args.out, dumps(instance_to_dict(bundle.instance)))
    map_path = args.map or (args.out + ".map.json" if args.out and args.out != "-" else None)
    if map_path is None:
        raise UsageError("--map is required when the instance goes to stdout")
    doc = bundle.to_map()
    doc["instance"] = instance_to_dict(bundle.instance)
    _write(map_path, dumps(doc))
    print(f"{bundle.kind}: {bundle.instance.n} agents, {bundle.instance.m} edges; map in {map_path}",
          file=sys.stderr)
    return EXIT_OK


def _parse_assignment(text: str, width: int) -> list:
    """'1,0,?' -> [True, False, None]; missing positions are '?', surplus
    trailing '?' are dropped."""
    tokens = [t.strip() for t in text.replace(" ", ",").split(",") if t.strip()]
    vals: list = []
    for t in tokens:
        low = t.lower()
        if low in ("1", "t", "true"):
            vals.append(True)
        elif low in ("0", "f", "false"):
            vals.append(False)
        elif low == "?":
            vals.append(None)
        else:
            raise UsageError(f"assignment token {t!r} is not 1, 0 or ?")
    while len(vals) > width and vals[-1] is None:
        vals.pop()
    if len(vals) > width:
        raise UsageError(f"assignment has {len(vals)} values for {width} variables")
    return vals + [None] * (width - len(vals))


def _complete(partial: list, accept) -> list | None:
    """First completion of the '?' positions (False before True) accepted by ``accept``."""
    holes = [k for k, v in enumerate(partial) if v is None]
    for bits in itertools.product((False, True), repeat=len(holes)):
        full = list(partial)
        for k, b in zip(holes, bits):
            full[k] = b
        if accept(full):
            return full
    return None


def cmd_certify(args) -> int:
    data = _read_json(args.map)
    if args.instance:
        instance = load_instance(args.instance)
    elif "instance" in data:
        instance = instance_from_dict(data["instance"])
    else:
        raise UsageError("the map carries no instance; pass --instance")
    bundle = red.bundle_from_map(instance, data)
    if bundle.kind == "sat3b2":
        width, accept, notion = bundle.source.n_vars, bundle.source.satisfied_by, Notion.EFX_PLUSMINUS
    else:
        width, accept, notion = len(bundle.source.inputs), bundle.source.output_value, Notion.EFX_00
    if args.allocation:
        alloc = load_allocation(args.allocation, instance.m)
        try:
            if bundle.kind == "sat3b2":
                values = red.orientation_to_sat_assignment(bundle, alloc)
            else:
                values = red.allocation_to_circuit_assignment(bundle, alloc)
        except red.NotEfx as exc:
            print(f"not a certificate: {exc}")
            return EXIT_FALSE
        print(",".join("1" if v else "0" for v in values))
        return EXIT_OK
    if args.assignment is None:
        raise UsageError("pass --assignment or --allocation")
    full = _complete(_parse_assignment(args.assignment, width), accept)
    if full is None:
        print("NOT-EXISTS: no completion of the assignment satisfies the source")
        return EXIT_FALSE
    if bundle.kind == "sat3b2":
        alloc = red.sat_assignment_to_orientation(bundle, full)
    else:
        alloc = red.circuit_assignment_to_allocation(bundle, full)
    if not passes(instance, alloc, notion):
        print(f"{notion.value}: FAIL on re-check", file=sys.stderr)
        return EXIT_MISMATCH
    _write(args.out, dumps(allocation_to_dict(alloc)))
    stream = sys.stdout if args.out else sys.stderr
    print(f"assignment {','.join('1' if v else '0' for v in full)}: {notion.value} PASS", file=stream)
    return EXIT_OK


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="efxgraph", description="EFX allocations and orientations on graphs")
    sub = p.add_subparsers(dest="command", required=True)

    def search_flags(sp):
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="largest search space to enumerate")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for exhaustive search")

    sp = sub.add_parser("check", help="check an allocation against a notion")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--allocation", required=True)
    sp.add_argument("--notion", required=True, help="notion name, or 'all'")
    sp.add_argument("--partial", action="store_true", help="allow unallocated edges")
    sp.add_argument("--show", type=int, default=10, help="violations to print per notion")
    sp.add_argument("--out", help="write the violation report as JSON")
    sp.set_defaults(func=cmd_check)

    for name, func, helptext in (("solve", cmd_solve, "compute an allocation and re-check it"),
                                 ("decide", cmd_decide, "decide existence and write a witness")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--instance", required=True)
        sp.add_argument("--notion", required=True)
        sp.add_argument("--mode", default="allocation", help="allocation or orientation")
        sp.add_argument("--shape", default="auto", choices=("auto", "star", "path", "tree"))
        sp.add_argument("--out")
        sp.add_argument("--trace", help="write the step log as JSON")
        search_flags(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("oracle", help="exhaustive search")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--notion", required=True)
    sp.add_argument("--mode", default="allocation")
    sp.add_argument("--count", action="store_true", help="count solutions instead of finding one")
    sp.add_argument("--out")
    search_flags(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("gen", help="seeded random instance or formula")
    sp.add_argument("--kind", required=True, choices=generate.KINDS + ("sat3b2",))
    sp.add_argument("--n", type=int, required=True, help="agents, or variables for sat3b2")
    sp.add_argument("--m", type=int, default=0, help="edges")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--lo", type=int, default=-5)
    sp.add_argument("--hi", type=int, default=5)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("reduce", help="compile a formula or circuit into an instance")
    sp.add_argument("kind", choices=("sat3b2", "circuit"))
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", help="instance JSON")
    sp.add_argument("--map", help="certificate map (default: <out>.map.json)")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("certify", help="translate certificates through a reduction map")
    sp.add_argument("--map", required=True)
    sp.add_argument("--instance", help="defaults to the copy stored in the map")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--assignment", help="e.g. 1,0,1,? ('?' is filled by search)")
    group.add_argument("--allocation", help="decode an allocation back into an assignment")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_certify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except RecheckFailed as exc:
        print(f"re-check failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (EfxError, OSError, KeyError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
