"""Seeded random instances and formulas.

Everything here draws from a private ``random.Random(seed)``, so the same
arguments always give the same object.
"""

from __future__ import annotations

import itertools
import random

from .core import EfxError, Instance, build_instance
from .reductions import Sat3B2Formula, validate_sat3b2

KINDS = ("goods", "chores", "mixed")


class GenerationError(EfxError):
    pass


def random_graph(n: int, m: int, rng: random.Random) -> list[tuple[int, int]]:
    """Uniform simple graph with exactly m edges, edges sorted."""
    if n < 1:
        raise GenerationError("need at least one agent")
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise GenerationError(f"a simple graph on {n} vertices has at most {total} edges, asked for {m}")
    if total <= 50_000:
        pairs = list(itertools.combinations(range(n), 2))
        return sorted(rng.sample(pairs, m))
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < m:
        u, v = rng.sample(range(n), 2)
        chosen.add((min(u, v), max(u, v)))
    return sorted(chosen)


def _value_range(kind: str, lo: int, hi: int) -> tuple[int, int]:
    if kind == "goods":
        lo = max(lo, 1)
    elif kind == "chores":
        hi = min(hi, -1)
    if lo > hi:
        raise GenerationError(f"value range [{lo}, {hi}] is empty for {kind} instances")
    return lo, hi


def random_instance(kind: str, n: int, m: int, seed: int, lo: int = -5, hi: int = 5) -> Instance:
    """Random instance with integer values uniform in [lo, hi].

    For ``goods`` the range is clipped to positive values and for ``chores``
    to negative ones, so every incident edge is a good (resp. a chore).
    """
    if kind not in KINDS:
        raise GenerationError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    lo, hi = _value_range(kind, lo, hi)
    rng = random.Random(seed)
    edges = random_graph(n, m, rng)
    values = {}
    for e, (u, v) in enumerate(edges):
        values[(u, e)] = rng.randint(lo, hi)
        values[(v, e)] = rng.randint(lo, hi)
    return build_instance(n, edges, values)


def random_sat3b2(n_vars: int, seed: int, max_tries: int = 10_000) -> Sat3B2Formula:
    """Satisfiable formula where each literal occurs exactly twice.

    A hidden assignment is drawn first; the literal multiset is reshuffled
    until every clause has three distinct literals and one true under it.
    """
    if n_vars < 3 or n_vars % 3:
        raise GenerationError("the number of variables must be a positive multiple of 3")
    rng = random.Random(seed)
    planted = [rng.random() < 0.5 for _ in range(n_vars)]
    lits = [l for x in range(1, n_vars + 1) for l in (x, x, -x, -x)]
    for _ in range(max_tries):
        rng.shuffle(lits)
        clauses = tuple(tuple(lits[k:k + 3]) for k in range(0, len(lits), 3))
        if any(len(set(c)) != 3 for c in clauses):
            continue
        formula = Sat3B2Formula(n_vars, clauses)
        if formula.satisfied_by(planted):
            return validate_sat3b2(formula)
    raise GenerationError(f"no formula found in {max_tries} shuffles")
