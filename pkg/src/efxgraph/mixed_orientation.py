"""Orientations for mixed instances on trees, stars and paths."""

from __future__ import annotations

from collections import deque

from .core import EfxError, Instance, Notion, Orientation, Sign
from .fairness import passes
from .oracle import DecideResult


class NotATree(EfxError):
    pass


class NotAStar(EfxError):
    pass


class NotAPath(EfxError):
    pass


class UnsupportedSignPattern(EfxError):
    pass


def is_connected(instance: Instance) -> bool:
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in instance.neighbors(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == instance.n


def bfs_layers(instance: Instance, root: int) -> tuple[dict[int, int], dict[int, int]]:
    """Layer number (root = 1) and parent edge of every vertex."""
    layer = {root: 1}
    parent_edge: dict[int, int] = {}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for e in instance.incident[u]:
            v = instance.edges[e].other(u)
            if v not in layer:
                layer[v] = layer[u] + 1
                parent_edge[v] = e
                queue.append(v)
    return layer, parent_edge


def tree_efxplus0_orientation(instance: Instance, root: int = 0) -> Orientation:
    """EFX^+_0 orientation of a tree.

    Walking down the BFS layers, every agent takes the edge to her parent if
    it is still free, plus all free incident edges that are goods for her;
    the root only takes her goods and the deepest layer only the parent edge.
    """
    if instance.m != instance.n - 1 or not is_connected(instance):
        raise NotATree(f"graph with {instance.n} vertices and {instance.m} edges is not a tree")
    if not 0 <= root < instance.n:
        raise NotATree(f"root {root} is not an agent")
    layer, _ = bfs_layers(instance, root)
    depth = max(layer.values())
    by_layer: dict[int, list[int]] = {}
    for a, d in layer.items():
        by_layer.setdefault(d, []).append(a)
    free = set(range(instance.m))
    owner: list = [None] * instance.m

    def take(agent, edges):
        for e in edges:
            if e in free:
                owner[e] = agent
                free.discard(e)

    for d in range(1, depth + 1):
        for a in sorted(by_layer[d]):
            up = [e for e in instance.incident[a] if e in free and layer[instance.edges[e].other(a)] == d - 1]
            assert len(up) <= 1, "a tree vertex has one parent"
            if d == 1:
                take(a, instance.goods[a])
            elif d == depth:
                take(a, [e for e in instance.incident[a] if e in free])
            else:
                take(a, up + list(instance.goods[a]))
    assert not free
    return Orientation.of(instance, owner)


def star_center(instance: Instance) -> int | None:
    if instance.m == 0:
        return None
    if instance.m == 1:
        return instance.edges[0].u
    for a in range(instance.n):
        if len(instance.incident[a]) == instance.m:
            return a
    raise NotAStar("no vertex is incident to every edge")


def star_efx00_decide(instance: Instance, notion: Notion = Notion.EFX_00) -> DecideResult:
    """Decide EFX^0_0 or EFX^0_- orientations on a star.

    A chore for a satellite must go to the center; once the center holds
    something, goods of satellites must stay with them.  Edges the satellite
    does not care about go wherever they help the center most, which leaves a
    single candidate orientation to check.
    """
    if notion not in (Notion.EFX_00, Notion.EFX_0MINUS):
        raise EfxError(f"the star decider handles efx00 and efx0-, not {notion.value}")
    center = star_center(instance)
    if center is None:
        return DecideResult(True, Orientation.of(instance, ()))
    if instance.m == 1:
        return DecideResult(True, Orientation.of(instance, (center,)))
    satellite_chore = any(instance.is_chore(e.other(center), e.id) for e in instance.edges)
    if not satellite_chore:
        owner = [e.other(center) for e in instance.edges]
    else:
        owner = []
        for e in instance.edges:
            sat = e.other(center)
            s = instance.sign(sat, e.id)
            if s is Sign.CHORE or (s is Sign.DUMMY and instance.is_good(center, e.id)):
                owner.append(center)
            else:
                owner.append(sat)
        # A dummy for both endpoints costs the center nothing under EFX^0_-.
        # Under EFX^0_0 it hurts her only while her bundle is non-negative; once
        # it is negative she envies any satellite holding such an edge.
        held = [e.id for e in instance.edges if owner[e.id] == center]
        negative = instance.value(center, held) < 0
        for e in instance.edges:
            sat = e.other(center)
            if (instance.sign(sat, e.id) is Sign.DUMMY and instance.sign(center, e.id) is Sign.DUMMY
                    and (notion is Notion.EFX_0MINUS or negative)):
                owner[e.id] = center
    witness = Orientation.of(instance, owner)
    if passes(instance, witness, notion):
        return DecideResult(True, witness)
    return DecideResult(False)


# --- paths -----------------------------------------------------------------


def _path_order(instance: Instance) -> tuple[list[int], list[int]]:
    """Vertices left to right (starting at the smaller end) and the edges
    between consecutive vertices."""
    n, m = instance.n, instance.m
    if m != n - 1 or not is_connected(instance) or any(len(x) > 2 for x in instance.incident):
        raise NotAPath(f"graph with {n} vertices and {m} edges is not a path")
    if n == 1:
        return [0], []
    start = min(a for a in range(n) if len(instance.incident[a]) == 1)
    verts, edges = [start], []
    prev_edge = None
    while True:
        nxt = [e for e in instance.incident[verts[-1]] if e != prev_edge]
        if not nxt:
            break
        prev_edge = nxt[0]
        edges.append(prev_edge)
        verts.append(instance.edges[prev_edge].other(verts[-1]))
    return verts, edges


def _side_patterns(instance: Instance, verts: list[int], edges: list[int], good: list[bool], k: int) -> tuple[bool, bool]:
    """Whether the chore edges[k] can be taken by its right / left endpoint.

    Right: the right endpoint also takes the next edge (a good that makes her
    bundle non-negative) and the vertex after her takes the edge after that,
    which she must like at least as much.  Left is the mirror image.
    """
    L = len(edges)
    right = left = False
    if k + 2 < L and good[k + 1] and good[k + 2]:
        i1, i2 = verts[k + 1], verts[k + 2]
        right = (instance.value(i1, (edges[k], edges[k + 1])) >= 0
                 and instance.value(i2, (edges[k + 1],)) <= instance.value(i2, (edges[k + 2],)))
    if k - 2 >= 0 and good[k - 1] and good[k - 2]:
        i0, im1 = verts[k], verts[k - 1]
        left = (instance.value(i0, (edges[k], edges[k - 1])) >= 0
                and instance.value(im1, (edges[k - 1],)) <= instance.value(im1, (edges[k - 2],)))
    return right, left


def _solve_segment(instance, verts, edges, good, owner) -> bool:
    """Fill ``owner`` for one segment; False if no EFX^0_- orientation."""
    L = len(edges)
    chores = [k for k in range(L) if not good[k]]
    if not chores:
        for k in range(L):
            owner[edges[k]] = verts[k + 1]
        return True
    patterns = {k: _side_patterns(instance, verts, edges, good, k) for k in chores}
    if any(not r and not l for r, l in patterns.values()):
        return False
    forced = [k for k in chores if patterns[k][0] != patterns[k][1]]
    if not forced:
        for k in range(L):
            owner[edges[k]] = verts[k] if not good[k] else verts[k + 1]
        return True
    k = forced[0]
    if patterns[k][0]:
        # chore and next edge to verts[k+1], the edge after to verts[k+2]
        owner[edges[k]] = owner[edges[k + 1]] = verts[k + 1]
        owner[edges[k + 2]] = verts[k + 2]
        pieces = [(0, k + 1, 0, k), (k + 3, L + 1, k + 3, L)]
    else:
        owner[edges[k]] = owner[edges[k - 1]] = verts[k]
        owner[edges[k - 2]] = verts[k - 1]
        pieces = [(0, k - 1, 0, k - 2), (k + 1, L + 1, k + 1, L)]
    for v0, v1, e0, e1 in pieces:
        if v1 - v0 >= 1 and not _solve_segment(instance, verts[v0:v1], edges[e0:e1], good[e0:e1], owner):
            return False
    return True


def path_efx0minus_decide(instance: Instance) -> DecideResult:
    """Decide EFX^0_- (equivalently EFX^0_0) orientations on a path whose
    edges are each a good for both endpoints or a chore for both."""
    verts, edges = _path_order(instance)
    good = []
    for e in edges:
        u, v = instance.edges[e].endpoints
        su, sv = instance.sign(u, e), instance.sign(v, e)
        if su is not sv or su is Sign.DUMMY:
            raise UnsupportedSignPattern(f"edge {e} must be a good for both endpoints or a chore for both")
        good.append(su is Sign.GOOD)
    owner: list = [None] * instance.m
    L = len(edges)
    if L <= 1 or all(good):
        for k in range(L):
            owner[edges[k]] = verts[k + 1]
        return DecideResult(True, Orientation.of(instance, owner))
    if L == 2:
        return DecideResult(False)
    if not _solve_segment(instance, verts, edges, good, owner):
        return DecideResult(False)
    return DecideResult(True, Orientation.of(instance, owner))
