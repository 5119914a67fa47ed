"""Wang tilesets as transducers, and the algebra on them.

A tile ``(w, e, s, n)`` is read as an edge ``w -> e`` labelled ``s | n``.
Stacking rows of tiles is composition of transducers; a strip of height
``k`` is a path in the ``k``-th power.  Meta-transducers carry words on
their edges and are used to describe large patterns compactly.

Colors are plain strings.  A state is a column of horizontal colors,
written bottom first, so the states of ``T^k`` are literally ``H^k``.
All values are immutable and every transducer has a canonical form that
does not depend on how it was built.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

Color = str
Word = tuple[Color, ...]
StateId = tuple[Color, ...]


class Tile(NamedTuple):
    w: Color
    e: Color
    s: Color
    n: Color


@dataclass(frozen=True)
class WangTileset:
    name: str
    hcolors: frozenset[Color]
    vcolors: frozenset[Color]
    tiles: tuple[Tile, ...]

    def __post_init__(self) -> None:
        if len(set(self.tiles)) != len(self.tiles):
            raise ValueError(f"tileset {self.name!r}: duplicate tiles")
        for t in self.tiles:
            if t.w not in self.hcolors or t.e not in self.hcolors:
                raise ValueError(f"tileset {self.name!r}: tile {t} uses an undeclared horizontal color")
            if t.s not in self.vcolors or t.n not in self.vcolors:
                raise ValueError(f"tileset {self.name!r}: tile {t} uses an undeclared vertical color")

    @classmethod
    def build(cls, name: str, tiles: Iterable[Sequence[Color]]) -> "WangTileset":
        """Tileset whose alphabets are exactly the colors used by ``tiles``."""
        ts = tuple(sorted({Tile(*t) for t in tiles}))
        return cls(
            name,
            frozenset(c for t in ts for c in (t.w, t.e)),
            frozenset(c for t in ts for c in (t.s, t.n)),
            ts,
        )


class Edge(NamedTuple):
    src: StateId
    dst: StateId
    bottom: Word
    top: Word


def _col(state: StateId | Color) -> StateId:
    return (state,) if isinstance(state, str) else tuple(state)


@dataclass(frozen=True, eq=False)
class MetaTransducer:
    """States, alphabet and an edge set, stored in canonical order.

    Equality and hashing use the canonical form only.
    """

    states: tuple[StateId, ...]
    alphabet: tuple[Color, ...]
    edges: tuple[Edge, ...]
    height: int
    _by_src: dict = field(default=None, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.height < 1:
            raise ValueError("height must be positive")

    @classmethod
    def make(
        cls,
        edges: Iterable[Edge | Sequence],
        height: int = 1,
        states: Iterable[StateId] = (),
        alphabet: Iterable[Color] = (),
    ) -> "MetaTransducer":
        es = set()
        for e in edges:
            src, dst, bottom, top = e
            edge = Edge(_col(src), _col(dst), tuple(bottom), tuple(top))
            if not edge.bottom or not edge.top:
                raise ValueError(f"empty edge label on {edge}")
            es.add(edge)
        st = {_col(s) for s in states}
        al = set(alphabet)
        for e in es:
            st.add(e.src)
            st.add(e.dst)
            al.update(e.bottom)
            al.update(e.top)
        return cls(tuple(sorted(st)), tuple(sorted(al)), tuple(sorted(es)), height)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MetaTransducer):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def canonical(self) -> tuple:
        return (self.height, self.states, self.alphabet, self.edges)

    def out_edges(self, state: StateId) -> tuple[Edge, ...]:
        if self._by_src is None:
            idx: dict[StateId, list[Edge]] = defaultdict(list)
            for e in self.edges:
                idx[e.src].append(e)
            object.__setattr__(self, "_by_src", {k: tuple(v) for k, v in idx.items()})
        return self._by_src.get(state, ())

    @property
    def is_plain(self) -> bool:
        """True when every label is a single letter, i.e. the edges are Wang tiles."""
        return all(len(e.bottom) == 1 and len(e.top) == 1 for e in self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"MetaTransducer(height={self.height}, states={len(self.states)}, edges={len(self.edges)})"


def from_tileset(ts: WangTileset) -> MetaTransducer:
    return MetaTransducer.make(
        ((t.w,), (t.e,), (t.s,), (t.n,)) for t in ts.tiles
    )


def to_tileset(t: MetaTransducer, name: str = "power") -> WangTileset:
    """Read a plain transducer back as a tileset; columns get dot-joined names."""
    if not t.is_plain:
        raise ValueError("only single-letter transducers are Wang tilesets")
    return WangTileset.build(
        name, ((".".join(e.src), ".".join(e.dst), e.bottom[0], e.top[0]) for e in t.edges)
    )


def union(t1: MetaTransducer, t2: MetaTransducer) -> MetaTransducer:
    if t1.edges and t2.edges and t1.height != t2.height:
        raise ValueError("union of transducers of different heights")
    return MetaTransducer.make(
        t1.edges + t2.edges,
        height=max(t1.height, t2.height),
        states=t1.states + t2.states,
        alphabet=t1.alphabet + t2.alphabet,
    )


_THREADS = 1


def set_threads(n: int) -> None:
    """Worker threads used by :func:`compose`; output does not depend on it."""
    global _THREADS
    if n < 1:
        raise ValueError("need at least one thread")
    _THREADS = n


def compose(lower: MetaTransducer, upper: MetaTransducer) -> MetaTransducer:
    """Stack ``upper`` on top of ``lower``; lower tops must equal upper bottoms exactly."""
    if lower.alphabet and upper.alphabet and not set(lower.alphabet) & set(upper.alphabet):
        raise ValueError("incompatible vertical alphabets")
    by_bottom: dict[Word, list[Edge]] = defaultdict(list)
    for e in upper.edges:
        by_bottom[e.bottom].append(e)

    def pairs(chunk: Sequence[Edge]) -> list[Edge]:
        return [Edge(e.src + f.src, e.dst + f.dst, e.bottom, f.top) for e in chunk for f in by_bottom.get(e.top, ())]

    lo = lower.edges
    if _THREADS > 1 and len(lo) >= 4096:
        size = -(-len(lo) // _THREADS)
        with ThreadPoolExecutor(_THREADS) as pool:
            parts = list(pool.map(pairs, [lo[i:i + size] for i in range(0, len(lo), size)]))
        out = [e for part in parts for e in part]
    else:
        out = pairs(lo)
    # canonical ordering in make() makes the result independent of chunking
    return MetaTransducer.make(out, height=lower.height + upper.height)


def trim(t: MetaTransducer) -> MetaTransducer:
    """Keep exactly the edges that lie on some bi-infinite path."""
    indeg: dict[StateId, int] = defaultdict(int)
    outdeg: dict[StateId, int] = defaultdict(int)
    incoming: dict[StateId, list[int]] = defaultdict(list)
    outgoing: dict[StateId, list[int]] = defaultdict(list)
    for i, e in enumerate(t.edges):
        outdeg[e.src] += 1
        indeg[e.dst] += 1
        outgoing[e.src].append(i)
        incoming[e.dst].append(i)
    alive = [True] * len(t.edges)
    dead_states: set[StateId] = set()
    queue = deque(s for s in t.states if indeg[s] == 0 or outdeg[s] == 0)
    while queue:
        s = queue.popleft()
        if s in dead_states:
            continue
        dead_states.add(s)
        for i in outgoing[s] + incoming[s]:
            if not alive[i]:
                continue
            alive[i] = False
            e = t.edges[i]
            outdeg[e.src] -= 1
            indeg[e.dst] -= 1
            for x in (e.src, e.dst):
                if x not in dead_states and (indeg[x] == 0 or outdeg[x] == 0):
                    queue.append(x)
    kept = [e for e, a in zip(t.edges, alive) if a]
    if len(kept) == len(t.edges) and len(t.states) == len({s for e in kept for s in (e.src, e.dst)}):
        return t
    return MetaTransducer.make(kept, height=t.height)


class BudgetExceeded(RuntimeError):
    """Raised by :func:`power` when a size budget is hit; carries the last power reached."""

    def __init__(self, message: str, last: MetaTransducer, k: int):
        super().__init__(message)
        self.last = last
        self.k = k


def powers(t: MetaTransducer, do_trim: bool = False, max_edges: int | None = None) -> Iterator[MetaTransducer]:
    """Yield ``T, T^2, T^3, ...`` forever (trimmed after each step if asked)."""
    base = trim(t) if do_trim else t
    cur = base
    k = 1
    while True:
        yield cur
        nxt = compose(cur, base)
        if do_trim:
            nxt = trim(nxt)
        k += 1
        if max_edges is not None and len(nxt.edges) > max_edges:
            raise BudgetExceeded(f"power {k} has {len(nxt.edges)} edges (> {max_edges})", cur, k - 1)
        cur = nxt


def power(t: MetaTransducer, k: int, do_trim: bool = False, max_edges: int | None = None) -> MetaTransducer:
    if k < 1:
        raise ValueError("power needs k >= 1")
    if k == 1:
        return trim(t) if do_trim else t
    for i, p in enumerate(powers(t, do_trim, max_edges), start=1):
        if i == k:
            return p
    raise AssertionError("unreachable")


def path_accepts(t: MetaTransducer, src: StateId, dst: StateId, bottom: Sequence[Color], top: Sequence[Color]) -> bool:
    """Extended transition relation: is there a path ``src -> dst`` reading ``bottom | top``?"""
    return find_path(t, src, dst, bottom, top) is not None


def find_path(
    t: MetaTransducer, src: StateId, dst: StateId, bottom: Sequence[Color], top: Sequence[Color]
) -> list[Edge] | None:
    src, dst = _col(src), _col(dst)
    bottom, top = tuple(bottom), tuple(top)
    nb, nt = len(bottom), len(top)
    start = (src, 0, 0)
    goal = (dst, nb, nt)
    parent: dict[tuple, tuple | None] = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            path = []
            while parent[node] is not None:
                prev, edge = parent[node]
                path.append(edge)
                node = prev
            return path[::-1]
        q, i, j = node
        for e in t.out_edges(q):
            lb, lt = len(e.bottom), len(e.top)
            if i + lb > nb or j + lt > nt:
                continue
            if bottom[i:i + lb] != e.bottom or top[j:j + lt] != e.top:
                continue
            nxt = (e.dst, i + lb, j + lt)
            if nxt not in parent:
                parent[nxt] = (node, e)
                queue.append(nxt)
    return None


@dataclass(frozen=True)
class Verdict:
    ok: bool
    missing: Edge | None = None
    checked: int = 0

    def __bool__(self) -> bool:
        return self.ok


def submodels(
    big: MetaTransducer, small: MetaTransducer, state_map: dict[StateId, StateId] | None = None
) -> Verdict:
    """``big |= small``: every edge of ``small`` is realised by a path of ``big``.

    ``state_map`` renames the states of ``small`` into states of ``big``
    (identity by default).
    """
    rename = (lambda s: state_map[s]) if state_map else (lambda s: s)
    for n, e in enumerate(small.edges):
        if not path_accepts(big, rename(e.src), rename(e.dst), e.bottom, e.top):
            return Verdict(False, e, n)
    return Verdict(True, None, len(small.edges))


def real_states(t: MetaTransducer) -> list[StateId]:
    """States made only of real colors, i.e. not introduced by ``expand_units``."""
    return [s for s in t.states if not any(c.startswith("~") for c in s)]


def submodels_renamed(big: MetaTransducer, small: MetaTransducer, max_maps: int = 100000) -> Verdict:
    """``big |= small`` under the best renaming of ``small``'s states into real states of ``big``.

    Used when the two sides name states differently (abstract family
    states against composed columns).  Returns the first verdict that
    passes, else the failing verdict that checked the most edges.
    """
    targets = real_states(big)
    if len(targets) ** len(small.states) > max_maps:
        raise ValueError("too many state renamings to search")
    best = Verdict(False, small.edges[0] if small.edges else None, 0)
    for image in itertools.product(targets, repeat=len(small.states)):
        v = submodels(big, small, dict(zip(small.states, image)))
        if v.ok:
            return v
        if v.checked > best.checked:
            best = v
    return best


def expand_units(t: MetaTransducer, tag: str = "") -> MetaTransducer:
    """Split each meta-edge into single-letter steps through fresh states.

    The intermediate states are columns of the marker ``~tag:i:j`` so they
    never collide with real colors, and paths between real states are
    unchanged.  Needed to compose meta-transducers under path semantics.
    """
    if t.is_plain:
        return t
    width = len(t.states[0]) if t.states else 1
    out = []
    for i, e in enumerate(t.edges):
        if len(e.bottom) != len(e.top):
            raise ValueError(f"cannot unit-expand edge with unequal label lengths: {e}")
        chain = [e.src] + [(f"~{tag}{i}:{j}",) * width for j in range(1, len(e.bottom))] + [e.dst]
        for j, (b, u) in enumerate(zip(e.bottom, e.top)):
            out.append(Edge(chain[j], chain[j + 1], (b,), (u,)))
    return MetaTransducer.make(out, height=t.height, states=t.states)


def compose_paths(*layers: MetaTransducer) -> MetaTransducer:
    """Composition of several layers (bottom first) under path semantics.

    Each layer is unit-expanded first, so an edge of the result between real
    columns corresponds to simultaneous paths in every layer whose
    intermediate words agree.
    """
    if not layers:
        raise ValueError("nothing to compose")
    units = [expand_units(layer, tag=f"{k}.") for k, layer in enumerate(layers)]
    out = units[0]
    for u in units[1:]:
        out = compose(out, u)
    return out


def restrict(t: MetaTransducer, keep) -> MetaTransducer:
    """Sub-transducer of the edges satisfying ``keep``."""
    return MetaTransducer.make([e for e in t.edges if keep(e)], height=t.height)


class LazyPower:
    """``t^k`` for a single-row ``t``, with out-edges built on demand.

    Offers ``out_edges`` and ``height`` so path searches can run inside a
    power that is too large to materialise.
    """

    def __init__(self, t: MetaTransducer, k: int):
        if t.height != 1 or not t.is_plain:
            raise ValueError("lazy powers need a single-row Wang transducer")
        if k < 1:
            raise ValueError("power needs k >= 1")
        self.base = t
        self.height = k
        self._memo: dict[StateId, tuple[Edge, ...]] = {}

    def out_edges(self, state: StateId) -> tuple[Edge, ...]:
        state = _col(state)
        if state in self._memo:
            return self._memo[state]
        out: set[Edge] = set()
        if len(state) == self.height:
            # rows bottom to top: (dst prefix, bottom letter, current top letter)
            frontier = {(e.dst, e.bottom, e.top) for e in self.base.out_edges((state[0],))}
            for row in range(1, self.height):
                nxt = set()
                for dst, b, u in frontier:
                    for f in self.base.out_edges((state[row],)):
                        if f.bottom == u:
                            nxt.add((dst + f.dst, b, f.top))
                frontier = nxt
            out = {Edge(state, dst, b, u) for dst, b, u in frontier}
        self._memo[state] = tuple(sorted(out))
        return self._memo[state]

    def has_edge(self, e: Edge) -> bool:
        return e in self.out_edges(e.src)
