"""Loops in transducers.

A loop of ``T^h`` is a cycle; reading its labels gives an ``h``-row strip
that can be repeated forever, so a transducer is compatible exactly when
it has a loop.  A *periodic* loop (bottom word = top word) can also be
stacked on itself, giving a doubly periodic tiling.  A *cyclic* loop has
its top word equal to a rotation of the bottom word; stacking its
rotations produces a periodic loop in a higher power.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .core import (
    Edge,
    LazyPower,
    MetaTransducer,
    StateId,
    Tile,
    Word,
    compose,
    path_accepts,
    power,
    restrict,
    trim,
)


@dataclass(frozen=True)
class Loop:
    states: tuple[StateId, ...]
    edges: tuple[Edge, ...]
    height: int

    def __post_init__(self) -> None:
        if not self.edges:
            raise ValueError("a loop needs at least one edge")
        for a, b in zip(self.edges, self.edges[1:] + self.edges[:1]):
            if a.dst != b.src:
                raise ValueError("loop edges do not chain")

    @classmethod
    def from_edges(cls, edges: Sequence[Edge], height: int) -> "Loop":
        edges = tuple(edges)
        return cls(tuple(e.src for e in edges), edges, height)

    @property
    def bottom(self) -> Word:
        return tuple(c for e in self.edges for c in e.bottom)

    @property
    def top(self) -> Word:
        return tuple(c for e in self.edges for c in e.top)

    @property
    def order(self) -> int:
        return len(self.bottom)

    def rotated(self, r: int) -> "Loop":
        """Same cycle, started ``r`` edges later."""
        r %= len(self.edges)
        return Loop.from_edges(self.edges[r:] + self.edges[:r], self.height)

    def key(self) -> tuple:
        return (self.order, self.bottom, self.top, self.states)


class LoopClass(NamedTuple):
    kind: str  # "plain", "cyclic" or "periodic"
    shift: int | None = None

    def __str__(self) -> str:
        return f"cyclic({self.shift})" if self.kind == "cyclic" else self.kind


def rotate(w: Sequence, d: int) -> tuple:
    w = tuple(w)
    if not w:
        return w
    d %= len(w)
    return w[d:] + w[:d]


def classify_loop(loop: Loop) -> LoopClass:
    b, t = loop.bottom, loop.top
    if b == t:
        return LoopClass("periodic", 0)
    if len(b) == len(t):
        for d in range(1, len(b)):
            if rotate(b, d) == t:
                return LoopClass("cyclic", d)
    return LoopClass("plain", None)


def is_cyclic(loop: Loop) -> bool:
    return classify_loop(loop).kind != "plain"


# --------------------------------------------------------------------------
# search


def _weight(e: Edge) -> int:
    return len(e.bottom)


def _min_cycle_order(t: MetaTransducer) -> int | None:
    """Smallest order of a cycle, by Dijkstra from every state with pruning."""
    best: int | None = None
    for s in t.states:
        dist = {s: 0}
        heap = [(0, s)]
        while heap:
            d, q = heapq.heappop(heap)
            if best is not None and d >= best:
                break
            if d > dist.get(q, d):
                continue
            for e in t.out_edges(q):
                nd = d + _weight(e)
                if best is not None and nd >= best + (0 if e.dst == s else 1):
                    continue
                if e.dst == s:
                    best = nd if best is None else min(best, nd)
                    continue
                if nd < dist.get(e.dst, nd + 1):
                    dist[e.dst] = nd
                    heapq.heappush(heap, (nd, e.dst))
    return best


def _cycles_of_order(t: MetaTransducer, order: int, limit: int) -> list[Loop]:
    """Cycles of exactly ``order``, each rooted at its smallest state."""
    found: list[Loop] = []
    for root in t.states:
        stack: list[tuple[StateId, int, list[Edge]]] = [(root, 0, [])]
        while stack and len(found) < limit:
            q, w, path = stack.pop()
            for e in reversed(t.out_edges(q)):
                nw = w + _weight(e)
                if nw > order:
                    continue
                if e.dst == root:
                    if nw == order:
                        found.append(Loop.from_edges(path + [e], t.height))
                    continue
                if e.dst < root or any(x.src == e.dst for x in path):
                    continue
                stack.append((e.dst, nw, path + [e]))
    return found


def _best_rotation(loop: Loop) -> Loop:
    return min((loop.rotated(r) for r in range(len(loop.edges))), key=Loop.key)


def find_loop(t: MetaTransducer, limit: int = 20000) -> Loop | None:
    """A loop of minimum order; ties go to the smallest (bottom, top, states).

    Cycles are compared over all their rotations, so the result is
    independent of how ``t`` was built.
    """
    core = trim(t)
    if not core.edges:
        return None
    order = _min_cycle_order(core)
    assert order is not None
    cycles = _cycles_of_order(core, order, limit)
    return min((_best_rotation(c) for c in cycles), key=Loop.key)


def compatible(t: MetaTransducer) -> bool:
    return bool(trim(t).edges)


def find_periodic_loop(t: MetaTransducer, max_order: int = 64) -> Loop | None:
    """A loop with equal bottom and top words.

    For single-letter transducers this is a cycle of the subgraph of edges
    with ``s = n`` and the search is complete.  For meta-transducers the
    search is bounded by ``max_order`` and may miss longer loops.
    """
    if t.is_plain:
        return find_loop(restrict(t, lambda e: e.bottom == e.top))
    return _bounded_periodic(trim(t), max_order)


def _bounded_periodic(t: MetaTransducer, max_order: int) -> Loop | None:
    # search over (state, surplus) where surplus is the part of one word
    # not yet matched by the other; sign tells which side is ahead
    best: Loop | None = None
    for root in t.states:
        start = (root, 0, ())
        parent: dict[tuple, tuple | None] = {start: None}
        queue = deque([(start, 0)])
        while queue:
            node, length = queue.popleft()
            q, side, surplus = node
            for e in t.out_edges(q):
                nl = length + len(e.bottom)
                if nl > max_order:
                    continue
                # bottom-ahead surplus (side 1) or top-ahead (side -1)
                b = (surplus if side == 1 else ()) + e.bottom
                u = (surplus if side == -1 else ()) + e.top
                k = min(len(b), len(u))
                if b[:k] != u[:k]:
                    continue
                if len(b) > k:
                    nxt = (e.dst, 1, b[k:])
                elif len(u) > k:
                    nxt = (e.dst, -1, u[k:])
                else:
                    nxt = (e.dst, 0, ())
                if nxt == start:
                    path = [e]
                    cur = node
                    while parent[cur] is not None:
                        prev, pe = parent[cur]
                        path.append(pe)
                        cur = prev
                    loop = _best_rotation(Loop.from_edges(path[::-1], t.height))
                    if best is None or loop.key() < best.key():
                        best = loop
                    continue
                if nxt not in parent:
                    parent[nxt] = (node, e)
                    queue.append((nxt, nl))
    return best


# --------------------------------------------------------------------------
# from cyclic loops to periodic ones


class PeriodicConstruction(NamedTuple):
    m: int
    loop: Loop
    sigma: tuple[int, ...]
    orbit: tuple[int, ...] = ()


def loop_permutation(loops: Sequence[Loop]) -> tuple[int, ...]:
    """``sigma`` with ``top(L_i) = bottom(L_sigma(i))``, or ValueError.

    Equal words are matched by a deterministic backtracking search.
    """
    n = len(loops)
    options = [[j for j in range(n) if loops[j].bottom == loops[i].top] for i in range(n)]
    sigma = [-1] * n
    used = [False] * n

    def place(i: int) -> bool:
        if i == n:
            return True
        for j in options[i]:
            if not used[j]:
                used[j] = True
                sigma[i] = j
                if place(i + 1):
                    return True
                used[j] = False
        return False

    if not place(0):
        raise ValueError("not permutation-closed")
    return tuple(sigma)


def _rotation_family(loop: Loop) -> list[Loop]:
    """Rotations of a cyclic loop, one per edge, in order."""
    return [loop.rotated(r) for r in range(len(loop.edges))]


def stack_loops(layers: Sequence[Loop]) -> Loop:
    """Edge-by-edge vertical stacking of loops with single-letter labels."""
    n = len(layers[0].edges)
    if any(len(l.edges) != n for l in layers):
        raise ValueError("stacked loops need the same number of edges")
    for lo, hi in zip(layers, layers[1:]):
        if lo.top != hi.bottom:
            raise ValueError("stacked loops do not match vertically")
    edges = []
    for j in range(n):
        col = [l.edges[j] for l in layers]
        src = tuple(c for e in col for c in e.src)
        dst = tuple(c for e in col for c in e.dst)
        edges.append(Edge(src, dst, col[0].bottom, col[-1].top))
    return Loop.from_edges(edges, sum(l.height for l in layers))


def cyclic_to_periodic(t: MetaTransducer, loops: Iterable[Loop], start: int = 0) -> PeriodicConstruction:
    """Stack loops along the orbit of ``start`` under ``sigma``.

    ``loops`` are loops of a common power ``t^h``.  When the set is not
    closed under ``top -> bottom`` matching, every given cyclic loop is
    replaced by the family of its rotations, which always is.
    """
    loops = list(loops)
    if not loops:
        raise ValueError("no loops given")
    h = loops[0].height
    if any(l.height != h for l in loops):
        raise ValueError("loops of different heights")
    if any(not (len(e.bottom) == len(e.top) == 1) for l in loops for e in l.edges):
        raise ValueError("cyclic_to_periodic needs single-letter loops")
    for l in loops:
        if classify_loop(l).kind == "periodic" and len(loops) == 1:
            _verify_edges(t, [l])
            return PeriodicConstruction(1, l, (0,), (0,))
    try:
        sigma = loop_permutation(loops)
    except ValueError:
        if not all(is_cyclic(l) for l in loops):
            raise
        loops = [r for l in loops for r in _rotation_family(l)]
        sigma = loop_permutation(loops)
    orbit = [start]
    while sigma[orbit[-1]] != start:
        orbit.append(sigma[orbit[-1]])
    layers = [loops[i] for i in orbit]
    stacked = stack_loops(layers)
    assert stacked.bottom == stacked.top
    _verify_edges(t, layers)
    # re-read the stacked cycle through the composed layers
    composed = None
    for l in layers:
        lt = MetaTransducer.make(l.edges, height=h)
        composed = lt if composed is None else compose(composed, lt)
    assert composed is not None
    s0 = stacked.states[0]
    if not path_accepts(composed, s0, s0, stacked.bottom, stacked.top):
        raise AssertionError("stacked loop failed verification")
    return PeriodicConstruction(len(orbit), stacked, sigma, tuple(orbit))


def _verify_edges(t: MetaTransducer, layers: Sequence[Loop]) -> None:
    h = layers[0].height
    if h % t.height:
        raise ValueError("loop height is not a multiple of the transducer height")
    big = LazyPower(t, h) if t.height == 1 and t.is_plain else power(t, h // t.height, do_trim=True)
    for l in layers:
        for e in l.edges:
            if e not in big.out_edges(e.src):
                raise ValueError(f"edge {e} is not an edge of the power {h}")


# --------------------------------------------------------------------------
# strips


@dataclass(frozen=True)
class RectangularPattern:
    """Rows of tiles, bottom row first."""

    rows: tuple[tuple[Tile, ...], ...]

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def is_valid(self, cyclic: bool = False) -> bool:
        for i, row in enumerate(self.rows):
            for j, tile in enumerate(row):
                if j + 1 < len(row) and tile.e != row[j + 1].w:
                    return False
                if i + 1 < len(self.rows) and tile.n != self.rows[i + 1][j].s:
                    return False
            if cyclic and row and row[-1].e != row[0].w:
                return False
        if cyclic and self.rows and any(a.s != b.n for a, b in zip(self.rows[0], self.rows[-1])):
            return False
        return True

    def tile_grid(self, names: dict[Tile, str] | None = None) -> list[list[str]]:
        if names is None:
            names = {}
        return [[names.get(t, "/".join(t)) for t in row] for row in self.rows]


def column_tiles(base: MetaTransducer, edge: Edge) -> list[Tile]:
    """Fill in the vertical colors of a power edge from the base tiles.

    Chooses the smallest consistent column, so the result is deterministic.
    """
    h = len(edge.src)
    if base.height != 1 or not base.is_plain:
        raise ValueError("columns are read against a single-row tileset")
    tiles = [Tile(e.src[0], e.dst[0], e.bottom[0], e.top[0]) for e in base.edges]
    # dp from the top: reachable[i] = letters s at row i completing rows i..h-1
    ok: list[dict[str, Tile]] = [dict() for _ in range(h)]
    for i in range(h - 1, -1, -1):
        for tile in tiles:
            if tile.w != edge.src[i] or tile.e != edge.dst[i]:
                continue
            if i == h - 1 and tile.n != edge.top[0]:
                continue
            if i < h - 1 and tile.n not in ok[i + 1]:
                continue
            if tile.s not in ok[i] or tile < ok[i][tile.s]:
                ok[i][tile.s] = tile
    if edge.bottom[0] not in ok[0]:
        raise ValueError(f"edge {edge} is not realised by the base tiles")
    out = [ok[0][edge.bottom[0]]]
    for i in range(1, h):
        out.append(ok[i][out[-1].n])
    return out


def loop_to_strip(loop: Loop, repetitions: int, base: MetaTransducer) -> RectangularPattern:
    """The ``height x order*repetitions`` rectangle realising a loop."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    cols = [column_tiles(base, e) for e in loop.edges]
    width = len(cols) * repetitions
    rows = tuple(tuple(cols[j % len(cols)][i] for j in range(width)) for i in range(len(cols[0])))
    pattern = RectangularPattern(rows)
    assert pattern.is_valid(), "strip does not satisfy the matching rules"
    return pattern
