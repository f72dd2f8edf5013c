from __future__ import annotations

import json

import pytest

from efxgraph.cli import (
    EXIT_BUDGET,
    EXIT_FALSE,
    EXIT_INVALID,
    EXIT_OK,
    EXIT_USAGE,
    TRACE_VERSION,
    _parse_assignment,
    main,
)
from efxgraph.core import Notion, allocation_from_dict, dumps, instance_to_dict, load_allocation, load_instance
from efxgraph.fairness import audit_properties, passes
from efxgraph.reductions import priceless_matching_instance

from helpers import SMALL_FORMULA, chorded_square, good_then_chore_path, sym


@pytest.fixture
def write(tmp_path):
    def _write(name, inst):
        path = tmp_path / name
        path.write_text(dumps(instance_to_dict(inst)))
        return str(path)
    return _write


def test_decide_chorded_square_does_not_exist(write, capsys):
    path = write("chorded_square.json", chorded_square())
    for notion in ("efxc0", "efxc-"):
        assert main(["decide", "--instance", path, "--notion", notion, "--mode", "orientation"]) == EXIT_FALSE
        assert capsys.readouterr().out.startswith("NOT-EXISTS")


def test_decide_star_route(write, capsys):
    path = write("p.json", good_then_chore_path())
    code = main(["decide", "--instance", path, "--notion", "efx00", "--mode", "orientation", "--shape", "star"])
    assert code == EXIT_FALSE
    assert "star-decider" in capsys.readouterr().out


def test_solve_writes_passing_allocation(write, tmp_path):
    inst = priceless_matching_instance()
    path = write("pm.json", inst)
    out = tmp_path / "alloc.json"
    trace_path = tmp_path / "trace.json"
    code = main(["solve", "--instance", path, "--notion", "efx0-", "--out", str(out), "--trace", str(trace_path)])
    assert code == EXIT_OK
    alloc = load_allocation(str(out), inst.m)
    assert passes(inst, alloc, Notion.EFX_0MINUS)
    doc = json.loads(trace_path.read_text())
    assert doc["version"] == TRACE_VERSION and doc["route"] == "efx0-allocation"
    assert doc["steps"][0]["op"] == "initial" and doc["steps"][-1]["op"] == "done"
    for step in doc["steps"]:
        owner = allocation_from_dict(step, inst.m).owner
        assert set(step["claimed"]) <= audit_properties(inst, owner)
    assert doc["final"] == json.loads(out.read_text())


def test_check_all_notions(write, tmp_path, capsys):
    inst = sym(2, [(0, 1)], [1])
    path = write("one.json", inst)
    alloc = tmp_path / "a.json"
    alloc.write_text('{"owner": {"0": 0}}')
    report = tmp_path / "r.json"
    code = main(["check", "--instance", path, "--allocation", str(alloc), "--notion", "all", "--out", str(report)])
    assert code == EXIT_FALSE
    out = capsys.readouterr().out
    assert "ef: FAIL" in out and "efx00: PASS" in out
    assert len(json.loads(report.read_text())) == len(Notion)


def test_check_partial_flag(write, tmp_path):
    path = write("two.json", sym(3, [(0, 1), (1, 2)], [1, 1]))
    alloc = tmp_path / "a.json"
    alloc.write_text('{"owner": {"0": 0}}')
    argv = ["check", "--instance", path, "--allocation", str(alloc), "--notion", "efx00"]
    # an incomplete allocation is malformed unless partial ones are allowed
    assert main(argv) == EXIT_INVALID
    assert main(argv + ["--partial"]) == EXIT_OK


def test_efx00_allocation_priceless_matching_not_exists(write, capsys):
    path = write("pm.json", priceless_matching_instance())
    assert main(["decide", "--instance", path, "--notion", "efx00"]) == EXIT_FALSE
    assert "NP-hard" in capsys.readouterr().err


def test_budget_exceeded(write):
    path = write("c.json", sym(6, [(k, k + 1) for k in range(5)], [1, -1, 1, -1, 1]))
    assert main(["decide", "--instance", path, "--notion", "efx00", "--budget", "10"]) == EXIT_BUDGET


def test_oracle_count(write, capsys):
    path = write("one.json", sym(2, [(0, 1)], [1]))
    assert main(["oracle", "--instance", path, "--notion", "efx00", "--count"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "2"


@pytest.mark.parametrize("argv, code", [
    (["decide", "--instance", "NOFILE", "--notion", "efx00"], EXIT_INVALID),
    (["gen", "--kind", "goods", "--n", "3", "--m", "9"], EXIT_INVALID),
])
def test_invalid_inputs(argv, code):
    assert main(argv) == code


def test_unknown_notion_is_usage_error(write):
    path = write("one.json", sym(2, [(0, 1)], [1]))
    assert main(["decide", "--instance", path, "--notion", "efx99"]) == EXIT_USAGE
    assert main(["decide", "--instance", path, "--notion", "efx00", "--mode", "sideways"]) == EXIT_USAGE


def test_notion_aliases(write):
    path = write("one.json", sym(2, [(0, 1)], [1]))
    assert main(["decide", "--instance", path, "--notion", "EFX0minus"]) == EXIT_OK


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["gen", "--kind", "mixed", "--n", "6", "--m", "8", "--seed", "3", "--out", str(p)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert load_instance(str(a)).m == 8


def test_reduce_and_certify_formula(tmp_path):
    cnf = tmp_path / "f.cnf"
    cnf.write_text(SMALL_FORMULA.to_dimacs())
    inst_path = tmp_path / "g.json"
    assert main(["reduce", "sat3b2", "--in", str(cnf), "--out", str(inst_path)]) == EXIT_OK
    inst = load_instance(str(inst_path))
    assert (inst.n, inst.m) == (13, 28)
    alloc = tmp_path / "o.json"
    code = main(["certify", "--map", str(inst_path) + ".map.json", "--assignment", "1,0,1,?", "--out", str(alloc)])
    assert code == EXIT_OK
    o = load_allocation(str(alloc), inst.m)
    assert o.is_orientation(inst) and passes(inst, o, Notion.EFX_PLUSMINUS)
    assert main(["certify", "--map", str(inst_path) + ".map.json", "--allocation", str(alloc)]) == EXIT_OK


def test_certify_unsatisfying_prefix(tmp_path):
    cnf = tmp_path / "f.cnf"
    cnf.write_text(SMALL_FORMULA.to_dimacs())
    out = tmp_path / "g.json"
    main(["reduce", "sat3b2", "--in", str(cnf), "--out", str(out)])
    # x1 = x2 = true falsifies the third clause unless x3 is false, and x3 = false
    # falsifies the fourth
    assert main(["certify", "--map", str(out) + ".map.json", "--assignment", "1,1"]) == EXIT_FALSE


def test_reduce_and_certify_circuit(tmp_path):
    src = tmp_path / "c.txt"
    src.write_text("input x\ninput y\ngate g = AND x y\noutput g\n")
    out = tmp_path / "c.json"
    assert main(["reduce", "circuit", "--in", str(src), "--out", str(out)]) == EXIT_OK
    mp = str(out) + ".map.json"
    alloc = tmp_path / "a.json"
    assert main(["certify", "--map", mp, "--assignment", "?,?", "--out", str(alloc)]) == EXIT_OK
    inst = load_instance(str(out))
    assert passes(inst, load_allocation(str(alloc), inst.m), Notion.EFX_00)
    assert main(["certify", "--map", mp, "--assignment", "0,?"]) == EXIT_FALSE


@pytest.mark.parametrize("text, width, expected", [
    ("1,0,?", 3, [True, False, None]),
    ("t f", 3, [True, False, None]),
    ("1,?,?,?", 2, [True, None]),
    ("", 2, [None, None]),
])
def test_parse_assignment(text, width, expected):
    assert _parse_assignment(text, width) == expected


@pytest.mark.parametrize("text", ["1,2", "1,0,1"])
def test_parse_assignment_errors(text):
    from efxgraph.cli import UsageError
    with pytest.raises(UsageError):
        _parse_assignment(text, 2)
