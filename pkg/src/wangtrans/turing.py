"""Turing machines and their compilation to piecewise affine maps and tilesets.

A configuration becomes a point of the plane.  The first coordinate holds
the left half of the tape, nearest cell first, in base ``beta``.  The second
holds the state, the scanned symbol and the right half.  Symbols use
digits ``1..|Gamma|`` so encoded points sit strictly inside their cube,
and one map application performs exactly one machine step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .core import WangTileset
from .kari import PiecewiseAffineMap, RationalAffine, Vec, tau_f


@dataclass(frozen=True)
class TuringMachine:
    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    tape_alphabet: tuple[str, ...]
    blank: str
    delta: dict = field(hash=False, compare=True)  # (q, a) -> (q', b, "L"|"R")
    start: str = "q0"
    accept: str = "qa"
    reject: str = "qr"
    name: str = "machine"

    def __post_init__(self) -> None:
        if self.blank not in self.tape_alphabet or self.blank in self.input_alphabet:
            raise ValueError("the blank must be a tape symbol outside the input alphabet")
        if not set(self.input_alphabet) <= set(self.tape_alphabet):
            raise ValueError("input alphabet must be contained in the tape alphabet")
        if self.accept == self.reject:
            raise ValueError("accept and reject states must differ")
        for s in (self.start, self.accept, self.reject):
            if s not in self.states:
                raise ValueError(f"unknown state {s}")
        for (q, a), (r, b, d) in self.delta.items():
            if q not in self.states or r not in self.states:
                raise ValueError(f"rule uses an unknown state: {q} or {r}")
            if a not in self.tape_alphabet or b not in self.tape_alphabet:
                raise ValueError(f"rule uses an unknown symbol: {a} or {b}")
            if d not in ("L", "R"):
                raise ValueError(f"bad move {d}")
            if q in (self.accept, self.reject):
                raise ValueError("halting states cannot have rules")

    def rule(self, q: str, a: str):
        if q in (self.accept, self.reject):
            return None
        return self.delta.get((q, a))


@dataclass(frozen=True)
class Configuration:
    state: str
    tape: tuple[tuple[int, str], ...]  # sorted non-blank cells
    head: int = 0

    @classmethod
    def make(cls, state: str, cells: dict[int, str] | Sequence[str], head: int, blank: str) -> "Configuration":
        if not isinstance(cells, dict):
            cells = dict(enumerate(cells))
        return cls(state, tuple(sorted((i, s) for i, s in cells.items() if s != blank)), head)

    def read(self, i: int, blank: str) -> str:
        for j, s in self.tape:
            if j == i:
                return s
        return blank


def initial(m: TuringMachine, word: Sequence[str] = ()) -> Configuration:
    return Configuration.make(m.start, list(word), 0, m.blank)


def step(c: Configuration, m: TuringMachine) -> Configuration | None:
    r = m.rule(c.state, c.read(c.head, m.blank))
    if r is None:
        return None
    q, b, d = r
    cells = dict(c.tape)
    cells[c.head] = b
    return Configuration.make(q, cells, c.head + (1 if d == "R" else -1), m.blank)


class Halted(NamedTuple):
    steps: int
    config: Configuration


class Running(NamedTuple):
    steps: int
    config: Configuration


def run(m: TuringMachine, word: Sequence[str] = (), budget: int = 1000) -> Halted | Running:
    if budget < 0:
        raise ValueError("budget must be >= 0")
    c = initial(m, word)
    for i in range(budget + 1):
        nxt = step(c, m)
        if nxt is None:
            return Halted(i, c)
        if i == budget:
            break
        c = nxt
    return Running(budget, c)


# --------------------------------------------------------------------------
# encoding


class Encoding(NamedTuple):
    beta: int
    digit: dict[str, int]
    offset: dict[str, int]


def encoding(m: TuringMachine) -> Encoding:
    beta = len(m.tape_alphabet) + 2
    digit = {g: i + 1 for i, g in enumerate(m.tape_alphabet)}
    offset = {q: i * beta for i, q in enumerate(m.states)}
    return Encoding(beta, digit, offset)


def _half(digits: Sequence[int], tail: int, beta: int) -> Fraction:
    """``sum d_i beta^-i`` followed by ``tail`` repeated forever."""
    x = sum((Fraction(d, beta**i) for i, d in enumerate(digits)), Fraction(0))
    n = len(digits)
    return x + Fraction(tail, beta**n) * Fraction(beta, beta - 1)


def encode(c: Configuration, m: TuringMachine) -> Vec:
    enc = encoding(m)
    lo = min([c.head] + [i for i, _ in c.tape])
    hi = max([c.head] + [i for i, _ in c.tape])
    left = [enc.digit[c.read(i, m.blank)] for i in range(c.head - 1, lo - 2, -1)]
    right = [enc.digit[c.read(i, m.blank)] for i in range(c.head, hi + 2)]
    b = enc.digit[m.blank]
    return (_half(left, b, enc.beta), enc.offset[c.state] + _half(right, b, enc.beta))


def tm_to_affine(m: TuringMachine) -> PiecewiseAffineMap:
    """One unit cube per (state, scanned symbol, symbol to the left) with a rule."""
    enc = encoding(m)
    beta = Fraction(enc.beta)
    pieces = []
    for q in m.states:
        for a in m.tape_alphabet:
            r = m.rule(q, a)
            if r is None:
                continue
            q2, w, d = r
            base = enc.offset[q] + enc.digit[a]
            for c in m.tape_alphabet:
                cd = enc.digit[c]
                if d == "R":
                    f = RationalAffine.make(
                        [[1 / beta, 0], [0, beta]], [enc.digit[w], enc.offset[q2] - beta * base]
                    )
                else:
                    f = RationalAffine.make(
                        [[beta, 0], [0, 1 / beta]],
                        [-beta * cd, enc.offset[q2] + cd + enc.digit[w] / beta - base / beta],
                    )
                pieces.append(((cd, base), f))
    return PiecewiseAffineMap.make(pieces, dim=2)


def tm_to_tileset(m: TuringMachine, denominator_bound: int) -> WangTileset:
    """The Kari tileset of the machine's map; a machine without rules gives no tiles."""
    f = tm_to_affine(m)
    if not f.pieces:
        return WangTileset.build(m.name, [])
    return tau_f(f, denominator_bound, name=m.name)


# --------------------------------------------------------------------------
# sample machines


def _machine(name: str, states, rules, tape=("0", "1"), blank="0", inputs=("1",)) -> TuringMachine:
    delta = {(q, a): (r, b, d) for q, a, r, b, d in rules}
    return TuringMachine(tuple(states), tuple(inputs), tuple(tape), blank, delta, "q0", "qa", "qr", name)


def two_step_machine() -> TuringMachine:
    """Two working states; halts within two steps from every configuration."""
    return _machine(
        "two-step",
        ("q0", "q1", "qa", "qr"),
        [
            ("q0", "0", "q1", "1", "R"),
            ("q0", "1", "q1", "1", "L"),
            ("q1", "0", "qa", "1", "L"),
            ("q1", "1", "qa", "0", "R"),
        ],
    )


def busy_beaver2() -> TuringMachine:
    """The two-state busy beaver; halts after 6 steps on the blank tape."""
    return _machine(
        "bb2",
        ("q0", "q1", "qa", "qr"),
        [
            ("q0", "0", "q1", "1", "R"),
            ("q0", "1", "q1", "1", "L"),
            ("q1", "0", "q0", "1", "L"),
            ("q1", "1", "qa", "1", "R"),
        ],
    )


def mover() -> TuringMachine:
    """Moves right forever without changing the tape."""
    return _machine("mover", ("q0", "qa", "qr"), [("q0", g, "q0", g, "R") for g in ("0", "1")])


def idle() -> TuringMachine:
    """No rules: halts at once."""
    return _machine("idle", ("q0", "qa", "qr"), [])


SAMPLE_MACHINES = {"two-step": two_step_machine, "bb2": busy_beaver2, "mover": mover, "idle": idle}
