"""Kari tilesets from rational piecewise affine maps.

A row of the tileset reads the balanced representation of a point ``x``
on its bottom side and that of ``f(x)`` on its top side.  Horizontal
colors carry the rational remainder of the affine computation, so the
row closes up exactly when ``f_i(B_k) + C_{k-1} = B_k(f x) + C_k`` holds
at every column.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .core import Edge, MetaTransducer, Tile, WangTileset, compose, from_tileset, path_accepts

Vec = tuple[Fraction, ...]


def vec(x) -> Vec:
    """Coerce a scalar or a sequence into a tuple of Fractions."""
    if isinstance(x, (int, Fraction, str)):
        return (Fraction(x),)
    return tuple(Fraction(c) for c in x)


def _floor(x: Vec) -> tuple[int, ...]:
    return tuple(math.floor(c) for c in x)


def balanced_digit(x, k: int) -> tuple[int, ...]:
    """``floor(k x) - floor((k-1) x)`` per coordinate, floors toward minus infinity."""
    x = vec(x)
    return tuple(math.floor(k * c) - math.floor((k - 1) * c) for c in x)


def balanced_digits(x, start: int, count: int) -> list[tuple[int, ...]]:
    return [balanced_digit(x, k) for k in range(start, start + count)]


def balanced_period(x) -> int:
    x = vec(x)
    p = math.lcm(*(c.denominator for c in x)) if x else 1
    assert all(balanced_digit(x, k) == balanced_digit(x, k + p) for k in range(p)), "period check failed"
    return p


@dataclass(frozen=True)
class RationalAffine:
    M: tuple[tuple[Fraction, ...], ...]
    b: Vec

    @classmethod
    def make(cls, M: Sequence[Sequence], b: Sequence) -> "RationalAffine":
        M = tuple(tuple(Fraction(c) for c in row) for row in M)
        b = vec(b)
        if len(M) != len(b) or any(len(row) != len(b) for row in M):
            raise ValueError("affine map dimensions do not agree")
        return cls(M, b)

    @property
    def dim(self) -> int:
        return len(self.b)

    def linear(self, x: Sequence) -> Vec:
        return tuple(sum((m * c for m, c in zip(row, x)), Fraction(0)) for row in self.M)

    def __call__(self, x: Sequence) -> Vec:
        return tuple(a + c for a, c in zip(self.linear(x), self.b))


@dataclass(frozen=True)
class UnitCube:
    corner: tuple[int, ...]

    def __contains__(self, x: Sequence) -> bool:
        return all(c <= v <= c + 1 for c, v in zip(self.corner, x))


class Piece(NamedTuple):
    cube: UnitCube
    f: RationalAffine


@dataclass(frozen=True)
class PiecewiseAffineMap:
    """Affine pieces on closed unit cubes.

    Cubes may share boundary points; such a point is mapped by the first
    piece in list order.
    """

    pieces: tuple[Piece, ...]
    dim: int

    @classmethod
    def make(cls, pieces: Iterable[tuple], dim: int | None = None) -> "PiecewiseAffineMap":
        ps = []
        for cube, f in pieces:
            cube = cube if isinstance(cube, UnitCube) else UnitCube(tuple(int(c) for c in cube))
            ps.append(Piece(cube, f))
        if dim is None:
            if not ps:
                raise ValueError("dimension of an empty map must be given")
            dim = ps[0].f.dim
        corners = [p.cube.corner for p in ps]
        if len(set(corners)) != len(corners):
            raise ValueError("cubes of a piecewise map must be distinct")
        for p in ps:
            if len(p.cube.corner) != dim or p.f.dim != dim:
                raise ValueError("piece dimension does not match the map")
        return cls(tuple(ps), dim)

    def piece_index(self, x: Sequence) -> int | None:
        for i, p in enumerate(self.pieces):
            if x in p.cube:
                return i
        return None

    def __call__(self, x: Sequence) -> Vec | None:
        i = self.piece_index(x)
        return None if i is None else self.pieces[i].f(x)

    def orbit(self, x, steps: int) -> list[Vec]:
        """``x, f(x), ...`` for as long as the points stay in the domain, at most ``steps`` applications."""
        out = [vec(x)]
        for _ in range(steps):
            y = self(out[-1])
            if y is None:
                break
            out.append(y)
        return out


def kari_example() -> PiecewiseAffineMap:
    """``2x`` on ``[0, 1]`` and ``2x/3`` on ``[1, 2]``; ``[1/2, 2]`` is invariant."""
    return PiecewiseAffineMap.make(
        [((0,), RationalAffine.make([[2]], [0])), ((1,), RationalAffine.make([[Fraction(2, 3)]], [0]))]
    )


# --------------------------------------------------------------------------
# carries and tiles


def carry(f: RationalAffine, x, k: int) -> Vec:
    """``M floor(k x) + k b - floor(k f(x))``."""
    x = vec(x)
    fl = _floor(tuple(k * c for c in x))
    fx = f(x)
    lin = f.linear(fl)
    return tuple(a + k * bb - math.floor(k * c) for a, bb, c in zip(lin, f.b, fx))


class KariTile(NamedTuple):
    piece: int
    bottom: tuple[int, ...]
    top: tuple[int, ...]
    left: Vec
    right: Vec


def relation_holds(f: RationalAffine, t: KariTile) -> bool:
    lhs = tuple(a + c for a, c in zip(f(t.bottom), t.left))
    rhs = tuple(a + c for a, c in zip(t.top, t.right))
    return lhs == rhs


def row_tiles(f: RationalAffine, x, index: int = 0, width: int | None = None) -> list[KariTile]:
    """Tiles of the row for ``x`` at columns ``k = 1..width`` (one joint period by default)."""
    x = vec(x)
    fx = f(x)
    if width is None:
        width = math.lcm(balanced_period(x), balanced_period(fx))
    out = []
    for k in range(1, width + 1):
        t = KariTile(index, balanced_digit(x, k), balanced_digit(fx, k), carry(f, x, k - 1), carry(f, x, k))
        assert relation_holds(f, t), f"carry relation fails at {x}, k={k}"
        out.append(t)
    return out


def rationals_in_cube(cube: UnitCube, bound: int) -> list[Vec]:
    axis = []
    for c in cube.corner:
        vals = sorted({c + Fraction(a, q) for q in range(1, bound + 1) for a in range(q + 1)})
        axis.append(vals)
    return [tuple(p) for p in itertools.product(*axis)]


def tiles_for_piece(piece: Piece, denominator_bound: int, index: int = 0) -> set[KariTile]:
    if denominator_bound < 1:
        raise ValueError("denominator bound must be >= 1")
    out: set[KariTile] = set()
    for x in rationals_in_cube(piece.cube, denominator_bound):
        out.update(row_tiles(piece.f, x, index))
    return out


def _frac(c: Fraction) -> str:
    return str(c)


def hcolor(piece: int, c: Vec) -> str:
    return f"p{piece}:" + ";".join(_frac(v) for v in c)


def vcolor(d: Sequence[int]) -> str:
    return ";".join(str(v) for v in d)


def kari_tile(t: KariTile) -> Tile:
    return Tile(hcolor(t.piece, t.left), hcolor(t.piece, t.right), vcolor(t.bottom), vcolor(t.top))


@lru_cache(maxsize=32)
def kari_tiles(m: PiecewiseAffineMap, denominator_bound: int) -> frozenset[KariTile]:
    out: set[KariTile] = set()
    for i, p in enumerate(m.pieces):
        out |= tiles_for_piece(p, denominator_bound, i)
    return frozenset(out)


def tau_f(m: PiecewiseAffineMap, denominator_bound: int, name: str = "kari") -> WangTileset:
    """The Kari tileset; the piece index in every horizontal color keeps rows single-piece."""
    if not m.pieces:
        raise ValueError("empty map")
    return WangTileset.build(name, sorted({kari_tile(t) for t in kari_tiles(m, denominator_bound)}))


# --------------------------------------------------------------------------
# immortal points and their loops


def rational_orbit_point(m: PiecewiseAffineMap, k: int, denominator_bound: int) -> Vec | None:
    """The first rational (by denominator, then value) whose ``k`` rows stay in the domain.

    A point qualifies when ``x, f(x), ..., f^{k-1}(x)`` all lie in the
    domain, so ``k`` stacked rows of tiles exist above it.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    candidates = set()
    for p in m.pieces:
        candidates.update(rationals_in_cube(p.cube, denominator_bound))
    key = lambda x: (math.lcm(*(c.denominator for c in x)), x)
    for x in sorted(candidates, key=key):
        if len(m.orbit(x, k)) == k + 1:
            return x
    return None


class ImmortalLoop(NamedTuple):
    loop: object  # loops.Loop
    orbit: tuple[Vec, ...]
    p: int  # period of the bottom point
    p_top: int  # period of f^k(x)
    bound: int  # denominator bound under which every row tile exists


def immortal_loop(m: PiecewiseAffineMap, k: int, x=None, denominator_bound: int = 6) -> ImmortalLoop:
    """The loop of ``tau_f^k`` reading the balanced digits of ``x`` and ``f^k(x)``.

    Its length is the joint period of the orbit, which is
    ``lcm(p, p_top)`` whenever the intermediate periods divide it.
    """
    from .loops import Loop

    if x is None:
        x = rational_orbit_point(m, k, denominator_bound)
        if x is None:
            raise ValueError(f"no rational orbit point of length {k} with denominators <= {denominator_bound}")
    orbit = m.orbit(x, k)
    if len(orbit) != k + 1:
        raise ValueError(f"the orbit of {x} leaves the domain before {k} steps")
    width = math.lcm(*(balanced_period(y) for y in orbit))
    bound = max(denominator_bound, *(c.denominator for y in orbit[:-1] for c in y))
    rows = []
    for y in orbit[:-1]:
        i = m.piece_index(y)
        assert i is not None
        rows.append(row_tiles(m.pieces[i].f, y, i, width))
    have = kari_tiles(m, bound)
    if any(t not in have for row in rows for t in row):
        raise AssertionError("row tile missing from the generated tileset")
    edges = []
    for j in range(width):
        col = [kari_tile(row[j]) for row in rows]
        nxt = [kari_tile(row[(j + 1) % width]) for row in rows]
        assert all(a.e == b.w for a, b in zip(col, nxt))
        edges.append(Edge(tuple(t.w for t in col), tuple(t.e for t in col), (col[0].s,), (col[-1].n,)))
    loop = Loop.from_edges(edges, k)
    # check against the stacked single-row sub-tilesets
    composed = None
    for row in rows:
        layer = from_tileset(WangTileset.build("row", {kari_tile(t) for t in row}))
        composed = layer if composed is None else compose(composed, layer)
    s0 = loop.states[0]
    if not path_accepts(composed, s0, s0, loop.bottom, loop.top):
        raise AssertionError("immortal loop failed verification")
    return ImmortalLoop(loop, tuple(orbit), balanced_period(orbit[0]), balanced_period(orbit[-1]), bound)
