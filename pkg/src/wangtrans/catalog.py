"""Tilesets and transducer families used throughout the package.

* ``example1``: four tiles that only tile periodically, with a
  period-5 structure visible in the third power.
* ``robinson``: Robinson's tiles as a 6-state transducer, and the
  meta-transducers ``robinson_H(n)`` describing its level-``n`` supertiles.
* ``jeandel_rao``: the 11 aperiodic Wang tiles, and the two-state word
  families ``jr_T(n)``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .core import Edge, MetaTransducer, WangTileset, from_tileset

# --------------------------------------------------------------------------
# heights


@dataclass(frozen=True)
class HeightSequence:
    """``g(0..k)`` given, then ``g(n+1) = c0 g(n) + ... + ck g(n-k) + c``."""

    base: tuple[int, ...]
    coeffs: tuple[int, ...]
    const: int = 0
    origin: int = 0

    def __post_init__(self) -> None:
        if len(self.base) != len(self.coeffs):
            raise ValueError("need one base value per recurrence coefficient")

    def __call__(self, n: int) -> int:
        i = n - self.origin
        if i < 0:
            raise ValueError(f"height index {n} below origin {self.origin}")
        vals = list(self.base)
        while len(vals) <= i:
            k = len(self.coeffs)
            vals.append(sum(c * vals[-1 - j] for j, c in enumerate(self.coeffs[:k])) + self.const)
        return vals[i]

    def values(self, lo: int, hi: int) -> list[int]:
        return [self(n) for n in range(lo, hi + 1)]


ROBINSON_HEIGHTS = HeightSequence(base=(1,), coeffs=(2,), const=1, origin=1)
JR_HEIGHTS = HeightSequence(base=(1, 2), coeffs=(1, 1), const=0, origin=0)


def g_robinson(n: int) -> int:
    return 2**n - 1


def g_jr(n: int) -> int:
    return JR_HEIGHTS(n)


# --------------------------------------------------------------------------
# the four-tile example


def example1() -> WangTileset:
    return WangTileset.build(
        "example1",
        [("R", "B", "R", "R"), ("B", "V", "R", "V"), ("V", "R", "R", "R"), ("R", "V", "V", "R")],
    )


@dataclass(frozen=True)
class AppendixLoops:
    cube: MetaTransducer  # T^3 of example1
    loops: tuple  # L1..L5 (loops.Loop)
    sigma: tuple[int, ...]  # t_i = b_sigma(i), 0-based
    periodic: object  # loops.Loop in T^15


@lru_cache(maxsize=None)
def appendix_fixtures() -> AppendixLoops:
    """The five order-5 loops along the 5-cycle of ``T^3`` and the period-5 loop of ``T^15``."""
    from . import loops as L
    from .core import power

    t3 = power(from_tileset(example1()), 3)
    cycle = [("R", "V", "V"), ("B", "R", "R"), ("V", "V", "B"), ("R", "R", "V"), ("V", "B", "R")]
    ring = [e for e in t3.edges if e.src in cycle and e.dst in cycle]
    found = []
    for start in cycle:
        seq = []
        state = start
        for _ in range(len(cycle)):
            (e,) = [x for x in ring if x.src == state]
            seq.append(e)
            state = e.dst
        found.append(L.Loop.from_edges(seq, t3.height))
    # numbered as in the appendix (b1 = t4, b2 = t5, ...): L_k starts 3(k-1) steps along the cycle
    found = [found[(3 * k) % len(cycle)] for k in range(len(cycle))]
    sigma = L.loop_permutation(found)
    periodic = L.cyclic_to_periodic(from_tileset(example1()), found).loop
    return AppendixLoops(t3, tuple(found), sigma, periodic)


# --------------------------------------------------------------------------
# Robinson
#
# Each Robinson tile carries one principal arrow crossing two opposite
# sides (arms) or four outgoing arrows (crosses), plus thin side lines
# that draw the edges of the nested squares.  On a vertical side the
# color records the arrow direction (r / l) and whether a side line
# crosses above (t) or below (b) the arrow.  On a horizontal side the
# letter records the direction (u / d) and a side line to the right (r)
# or left (l) of the arrow.
#
# Arm types are described with the principal arrow pointing up; the
# other three orientations are obtained by quarter turns.  Turning by
# ``+90`` means clockwise.

_VEC = {"u": (0, 1), "r": (1, 0), "d": (0, -1), "l": (-1, 0)}
_DIR = {v: k for k, v in _VEC.items()}
_SIDE_OF = {"N": (0, 1), "E": (1, 0), "S": (0, -1), "W": (-1, 0)}
_SIDE_NAME = {v: k for k, v in _SIDE_OF.items()}

# (vertical side line: None/"r"/"l", horizontal side line at the bottom)
ARM_TYPES = {
    "Empty": (None, False),
    "V": ("r", False),
    "Vbis": ("l", False),
    "H": (None, True),
    "Cross": ("r", True),
    "CrossBis": ("l", True),
}


def _cw(v: tuple[int, int]) -> tuple[int, int]:
    return (v[1], -v[0])


def _side_marks(kind: str) -> dict[str, tuple[str, int]]:
    """Arrow direction and side-line offset (-1, 0, +1) per side, unrotated.

    Offsets are measured along the side: towards +x on S/N, towards +y on W/E.
    """
    if kind == "Corner":
        marks = {"N": ("u", 0), "S": ("d", 0), "E": ("r", 0), "W": ("l", 0)}
        marks["E"] = ("r", -1)  # side lines turn in the south-east quadrant
        marks["S"] = ("d", +1)
        return marks
    vline, hline = ARM_TYPES[kind]
    voff = {None: 0, "r": +1, "l": -1}[vline]
    hoff = -1 if hline else 0
    return {"N": ("u", voff), "S": ("u", voff), "W": ("r", hoff), "E": ("l", hoff)}


def _tangent(side: str) -> tuple[int, int]:
    return (1, 0) if side in "NS" else (0, 1)


def _rotate_marks(marks: dict[str, tuple[str, int]], quarter_turns: int) -> dict[str, tuple[str, int]]:
    out = dict(marks)
    for _ in range(quarter_turns % 4):
        nxt = {}
        for side, (d, off) in out.items():
            sv, tv = _SIDE_OF[side], _tangent(side)
            # crossing point, in units where the tile is [-2, 2]^2
            p = _cw((2 * sv[0] + off * tv[0], 2 * sv[1] + off * tv[1]))
            nside = _SIDE_NAME[_cw(sv)]
            nt = _tangent(nside)
            nxt[nside] = (_DIR[_cw(_VEC[d])], p[0] * nt[0] + p[1] * nt[1])
        out = nxt
    return out


def _hcolor(d: str, off: int) -> str:
    return d + {0: "", 1: "t", -1: "b"}[off]


def _vletter(d: str, off: int) -> str:
    return d + {0: "", 1: "r", -1: "l"}[off]


_ROTATIONS = {0: 0, 90: 1, 180: 2, -90: 3}


def robinson_tile(kind: str, rotation: int) -> tuple[str, str, str, str]:
    """``(w, e, s, n)`` of a Robinson tile given by type name and rotation in degrees."""
    m = _rotate_marks(_side_marks(kind), _ROTATIONS[rotation])
    return (_hcolor(*m["W"]), _hcolor(*m["E"]), _vletter(*m["S"]), _vletter(*m["N"]))


def robinson_tiles() -> list[tuple[str, int, tuple[str, str, str, str]]]:
    out = []
    for kind in list(ARM_TYPES) + ["Corner"]:
        for rot in (0, 90, 180, -90):
            out.append((kind, rot, robinson_tile(kind, rot)))
    return out


def robinson_tileset() -> WangTileset:
    return WangTileset.build("robinson", [t for _, _, t in robinson_tiles()])


def robinson_from_model() -> MetaTransducer:
    return from_tileset(robinson_tileset())


def _data(name: str) -> str:
    return resources.files("wangtrans").joinpath("data", name).read_text(encoding="utf-8")


def robinson_figure_edges() -> list[tuple[str, str, str, str, int]]:
    """The hand transcription: (edge name, source, target, tile type, rotation)."""
    rows = []
    for line in _data("robinson_figure.txt").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, src, dst, tile = line.split()
        kind, rot = tile.split("@")
        rows.append((name, src, dst, kind, int(rot)))
    return rows


@lru_cache(maxsize=None)
def robinson() -> MetaTransducer:
    """The Robinson transducer, read from the frozen fixture."""
    from .formats import parse_transducer

    return parse_transducer(_data("robinson.transducer"))


def fixture_checksum(name: str) -> str:
    return hashlib.sha256(_data(name).encode()).hexdigest()


def robinson_H(n: int) -> MetaTransducer:
    """Level-``n`` supertile meta-transducer, height ``2^n - 1``.

    States are the boundary columns of supertiles: a run of plain arrows
    with, for four of them, a side line at the middle row.  The corner
    edges are ``g(n) x g(n)`` supertiles with outgoing arrows on all
    sides, the other edges are one-tile-wide columns separating them.
    """
    if n < 1:
        raise ValueError("robinson_H is defined for n >= 1")
    h = g_robinson(n)
    m = g_robinson(n - 1)

    def mid(a: str, b: str) -> tuple[str, ...]:
        return (a,) * m + (b,) + (a,) * m

    r, l = ("r",) * h, ("l",) * h
    rb, rt, lb, lt = mid("r", "rb"), mid("r", "rt"), mid("l", "lb"), mid("l", "lt")
    up, down = ("u",) * h, ("d",) * h
    edges = []
    # e0: separating columns without horizontal side line
    for x in ("u", "ur", "ul", "d", "dr", "dl"):
        edges.append(Edge(r, l, (x,), (x,)))
    # e2 / e-2: separating columns crossing a horizontal side line
    for x in ("u", "ur", "ul"):
        edges.append(Edge(rb, lb, (x,), (x,)))
    for x in ("d", "dr", "dl"):
        edges.append(Edge(rt, lt, (x,), (x,)))
    # e1, e-1, e3, e-3: the four supertile orientations
    edges.append(Edge(l, rb, mid("d", "dr"), up))
    edges.append(Edge(l, rt, down, mid("u", "ur")))
    edges.append(Edge(lb, r, mid("d", "dl"), up))
    edges.append(Edge(lt, r, down, mid("u", "ul")))
    return MetaTransducer.make(edges, height=h)


ROBINSON_H_EDGE_NAMES = ("e0", "e1", "e-1", "e2", "e-2", "e3", "e-3")


def robinson_H_edge_name(e: Edge) -> str:
    """Name of a ``robinson_H`` edge after the transducer figure."""
    src, dst = e.src, e.dst
    kind = lambda col: col[len(col) // 2]
    table = {
        ("r", "l"): "e0", ("l", "rb"): "e1", ("l", "rt"): "e-1", ("rb", "lb"): "e2",
        ("rt", "lt"): "e-2", ("lb", "r"): "e3", ("lt", "r"): "e-3",
    }
    return table[(kind(src), kind(dst))]


# --------------------------------------------------------------------------
# Jeandel-Rao


def jeandel_rao() -> WangTileset:
    """The 11 Jeandel-Rao tiles, read from the fixture (order w, e, s, n)."""
    from .formats import parse_tileset

    return parse_tileset(_data("jeandel_rao.tileset"))


def _run(letter: str, count: int) -> tuple[str, ...]:
    if count < 0:
        raise ValueError(f"negative run length {count}")
    return (letter,) * count


def _word(*parts) -> tuple[str, ...]:
    out: list[str] = []
    for p in parts:
        out.extend(p if isinstance(p, tuple) else tuple(p))
    return tuple(out)


JR_EDGE_NAMES = {0: ("alpha", "beta", "gamma", "delta", "epsilon", "omega"), 1: ("A", "B", "C", "D", "E", "O")}


def jr_words(n: int) -> dict[str, tuple[str, str, tuple[str, ...], tuple[str, ...]]]:
    """The six labelled edges of ``T_n`` as ``name -> (src, dst, bottom, top)``."""
    if n < 0:
        raise ValueError("jr_T needs n >= 0")
    g = lambda i: g_jr(n + i)
    if n % 2 == 0:
        z, o = "0", "1"
        return {
            "alpha": ("a", "b", _run(z, g(2) - 3), _run(o, g(2) - 3)),
            "beta": ("b", "a", _run(o, g(1) + 3), _word("110", _run(z, g(1)))),
            "gamma": ("b", "a", _run(o, g(3) + 3), _word(_run(z, g(2)), "111", _run(z, g(1)))),
            "delta": ("b", "a", _word(_run(o, g(1)), "000", _run(o, g(2))), _run(z, g(3) + 3)),
            "epsilon": ("b", "a", _word(_run(o, g(1)), "100"), _run(z, g(1) + 3)),
            "omega": ("b", "a", _word(_run(o, g(3)), "100", _run(o, g(1))), _word(_run(z, g(1)), "110", _run(z, g(3)))),
        }
    z, o = "0", "1"
    return {
        "A": ("a", "b", _run(o, g(2) - 3), _run(z, g(2) - 3)),
        "B": ("b", "a", _run(z, g(1) + 3), _word("100", _run(o, g(1)))),
        "C": ("b", "a", _run(z, g(3) + 3), _word(_run(o, g(2)), "000", _run(o, g(1)))),
        "D": ("b", "a", _word(_run(z, g(1)), "111", _run(z, g(2))), _run(o, g(3) + 3)),
        "E": ("b", "a", _word(_run(z, g(1)), "110"), _run(o, g(1) + 3)),
        "O": ("b", "a", _word(_run(z, g(3)), "110", _run(z, g(1))), _word(_run(o, g(1)), "100", _run(o, g(3)))),
    }


def jr_T(n: int, names: tuple[str, ...] | None = None) -> MetaTransducer:
    """Two-state word transducer ``T_n`` of height ``g(n)``.

    For ``n = 0`` the edge ``alpha`` has width ``g(2) - 3 = 0``; an edge
    with two empty labels identifies its endpoints, so ``T_0`` collapses
    to a single state carrying the five other edges as loops.
    ``names`` restricts to a subset of the edges.
    """
    words = jr_words(n)
    if names is not None:
        words = {k: v for k, v in words.items() if k in names}
    empty = {k for k, (_, _, b, t) in words.items() if not b and not t}
    edges = []
    for k, (src, dst, bottom, top) in words.items():
        if k in empty:
            continue
        if empty:
            src = dst = "a"
        edges.append(Edge((src,), (dst,), bottom, top))
    return MetaTransducer.make(edges, height=g_jr(n))


def jr_edge(n: int, name: str) -> Edge:
    src, dst, b, t = jr_words(n)[name]
    return Edge((src,), (dst,), b, t)
