from __future__ import annotations

import itertools

from hypothesis import strategies as st

from efxgraph.core import build_instance
from efxgraph.reductions import Sat3B2Formula


def sym(n, edges, vals):
    """Instance where edge k is worth vals[k] to both endpoints."""
    values = {}
    for e, ((u, v), x) in enumerate(zip(edges, vals)):
        values[(u, e)] = x
        values[(v, e)] = x
    return build_instance(n, edges, values)


def two_sided(n, edges, pairs):
    """pairs[k] = (value to u, value to v) for edge k = (u, v)."""
    values = {}
    for e, ((u, v), (xu, xv)) in enumerate(zip(edges, pairs)):
        values[(u, e)] = xu
        values[(v, e)] = xv
    return build_instance(n, edges, values)


def chorded_square():
    """C4 plus a chord, every edge a chore for both endpoints."""
    return sym(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)], [-1] * 5)


def three_vertex_path():
    """a0 - a1 - a2: e01 is a chore for both, e12 a good for both."""
    return sym(3, [(0, 1), (1, 2)], [-1, 1])


def good_then_chore_path():
    """a0 - a1 - a2: e01 is a good for both, e12 a chore for both."""
    return sym(3, [(0, 1), (1, 2)], [1, -1])


SMALL_FORMULA = Sat3B2Formula(3, ((1, 2, 3), (1, 2, -3), (-1, -2, -3), (-1, -2, 3)))


def all_owner_vectors(instance, orientations=False):
    choices = [e.endpoints if orientations else range(instance.n) for e in instance.edges]
    return itertools.product(*choices)


@st.composite
def instances(draw, max_n=6, max_m=9, lo=-3, hi=3, min_n=1):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(max_m, len(pairs)))) if pairs else []
    values = {}
    for e, (u, v) in enumerate(chosen):
        values[(u, e)] = draw(st.integers(lo, hi))
        values[(v, e)] = draw(st.integers(lo, hi))
    return build_instance(n, chosen, values)


@st.composite
def instance_and_owner(draw, orientation=False, partial=False, **kw):
    inst = draw(instances(**kw))
    owner = []
    for e in inst.edges:
        opts = list(e.endpoints) if orientation else list(range(inst.n))
        if partial:
            opts.append(None)
        owner.append(draw(st.sampled_from(opts)))
    return inst, tuple(owner)
