"""Robustness certificates and the domino semi-decision driver.

A certificate names a family ``T_n`` of transducers with heights ``g(n)``
and a composition pattern ``F`` such that ``F(T_1, T_{n-k}, ..., T_n)``
contains ``T_{n+1}``.  Checking finitely many indices is a bounded
verification, not a proof for every ``n``; reports say so.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

from . import catalog
from .catalog import HeightSequence
from .core import (
    BudgetExceeded,
    Edge,
    LazyPower,
    MetaTransducer,
    WangTileset,
    compose_paths,
    from_tileset,
    power,
    powers,
    submodels,
    submodels_renamed,
    trim,
)
from .loops import (
    Loop,
    classify_loop,
    cyclic_to_periodic,
    find_loop,
    find_periodic_loop,
    stack_loops,
)

# --------------------------------------------------------------------------
# composition patterns


@dataclass(frozen=True)
class Leaf:
    """``T1`` (``fixed``) or ``Tn-lag``."""

    lag: int
    fixed: bool = False

    def __str__(self) -> str:
        if self.fixed:
            return "T1"
        return "Tn" if self.lag == 0 else f"Tn-{self.lag}"


@dataclass(frozen=True)
class Compose:
    """Vertical stacking, listed bottom first."""

    parts: tuple["Leaf | Compose", ...]

    def __str__(self) -> str:
        return "(o " + " ".join(str(p) for p in self.parts) + ")"


Pattern = Leaf | Compose

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_pattern(text: str) -> Pattern:
    tokens = _TOKEN.findall(text)
    pos = 0

    def term() -> Pattern:
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of pattern")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens) or tokens[pos] not in ("o", "∘"):
                raise ValueError("a pattern group must start with 'o'")
            pos += 1
            parts = []
            while pos < len(tokens) and tokens[pos] != ")":
                parts.append(term())
            if pos >= len(tokens):
                raise ValueError("unbalanced parentheses in pattern")
            pos += 1
            if len(parts) < 2:
                raise ValueError("a composition needs two parts")
            return Compose(tuple(parts))
        if tok == "T1":
            return Leaf(0, fixed=True)
        m = re.fullmatch(r"Tn(?:-(\d+))?", tok)
        if not m:
            raise ValueError(f"unknown pattern symbol {tok!r}")
        return Leaf(int(m.group(1) or 0))

    out = term()
    if pos != len(tokens):
        raise ValueError("trailing tokens in pattern")
    return out


def leaves(p: Pattern) -> list[Leaf]:
    if isinstance(p, Leaf):
        return [p]
    return [x for part in p.parts for x in leaves(part)]


def leaf_index(leaf: Leaf, n: int, origin: int) -> int:
    """Family index of a leaf at step ``n``; ``T1`` is the first member."""
    return origin if leaf.fixed else n - leaf.lag


# --------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class Family:
    """``name`` is ``robinson_H``, ``jr_T``, ``stack`` or ``explicit``."""

    name: str
    members: dict = field(default_factory=dict, hash=False)  # explicit members by index
    loop: Loop | None = field(default=None, hash=False)  # for ``stack``

    def member(self, n: int) -> MetaTransducer:
        if self.name == "robinson_H":
            # the level-1 member is the Robinson transducer itself
            return catalog.robinson() if n == 1 else catalog.robinson_H(n)
        if self.name == "jr_T":
            return catalog.jr_T(n)
        if self.name == "stack":
            assert self.loop is not None
            if n < 1:
                raise ValueError("stack family starts at 1")
            return MetaTransducer.make(stack_loops([self.loop] * n).edges, height=n * self.loop.height)
        if n not in self.members:
            raise KeyError(f"explicit family has no member {n}")
        return self.members[n]


@dataclass(frozen=True)
class RobustnessCertificate:
    name: str
    tileset: str  # "builtin:<name>" or a file path
    family: Family
    heights: HeightSequence
    k: int
    pattern: Pattern
    basecases: dict = field(default_factory=dict, hash=False)  # index -> MetaTransducer fixture
    loopwitness: str = "any"  # "any" or "periodic"
    basecase_files: dict = field(default_factory=dict, hash=False, compare=False)


# --------------------------------------------------------------------------
# tileset references


def resolve_tileset(ref: str, base_dir: Path | None = None) -> MetaTransducer:
    from .formats import read_transducer

    if ref.startswith("builtin:"):
        name = ref.split(":", 1)[1]
        if name == "robinson":
            return catalog.robinson()
        if name in ("jeandel-rao", "jr"):
            return from_tileset(catalog.jeandel_rao())
        if name == "example1":
            return from_tileset(catalog.example1())
        raise ValueError(f"unknown builtin tileset {name!r}")
    path = Path(ref)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    return read_transducer(path.read_text())


# --------------------------------------------------------------------------
# verification


class Check(NamedTuple):
    kind: str  # heights, family-heights, basecase, fixture, invariant, loop
    index: int | None
    ok: bool
    detail: str = ""
    missing: Edge | None = None

    def line(self) -> str:
        idx = "" if self.index is None else f" n={self.index}"
        status = "PASS" if self.ok else "FAIL"
        text = f"check {self.kind}{idx} {status}"
        if self.detail:
            text += f" {self.detail}"
        if self.missing is not None:
            from .formats import word

            e = self.missing
            text += f" missing={word(e.src)}>{word(e.dst)}:{word(e.bottom)}|{word(e.top)}"
        return text


@dataclass
class Report:
    certificate: str
    n_max: int
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def lines(self) -> list[str]:
        out = [f"report {self.certificate} n-max={self.n_max}"]
        out += [c.line() for c in self.checks]
        out.append(f"result {'PASS' if self.ok else 'FAIL'} bounded to n<={self.n_max}; not a proof for all n")
        return out

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


def heights_consistent(cert: RobustnessCertificate) -> tuple[bool, str]:
    """Leaf heights of ``F`` at ``n`` sum to ``g(n+1)`` for every ``n``.

    ``E(n) = g(n+1) - sum of leaf heights`` is a fixed linear combination of
    shifts of ``g``, so it satisfies the recurrence of ``g`` made
    homogeneous (order one more).  Vanishing on that many consecutive
    indices therefore gives ``E = 0`` everywhere.
    """
    g = cert.heights
    ls = leaves(cert.pattern)
    lag = max([l.lag for l in ls if not l.fixed] + [0])
    start = g.origin + lag
    span = len(g.coeffs) + 2
    for n in range(start, start + span):
        total = sum(g(leaf_index(l, n, g.origin)) for l in ls)
        if total != g(n + 1):
            return False, f"leaf heights at n={n} sum to {total}, g(n+1)={g(n + 1)}"
    return True, f"leaf sum equals g(n+1) on {span} consecutive indices"


def pattern_value(cert: RobustnessCertificate, n: int) -> MetaTransducer:
    origin = cert.heights.origin
    layers = [cert.family.member(leaf_index(l, n, origin)) for l in leaves(cert.pattern)]
    return compose_paths(*layers)


def _loop_ok(t: MetaTransducer, rule: str) -> bool:
    if rule == "periodic":
        return find_periodic_loop(t) is not None
    return find_loop(t) is not None


def verify_certificate(cert: RobustnessCertificate, n_max: int, tileset: MetaTransducer | None = None) -> Report:
    g = cert.heights
    origin = g.origin
    first = origin  # index of T1
    if n_max < first + cert.k:
        raise ValueError(f"n_max must be at least {first + cert.k}")
    ok, detail = heights_consistent(cert)
    if not ok:
        raise ValueError(f"malformed pattern: {detail}")
    checks = [Check("heights", None, True, detail)]
    if origin != 1 or g(1) != 1:
        checks.append(Check("normalisation", None, True, f"origin={origin} g(1)={g(1)}; index shifted from the g(1)=1 convention"))
    tau = tileset if tileset is not None else resolve_tileset(cert.tileset)
    # family heights
    bad = [n for n in range(first, n_max + 2) if cert.family.member(n).height != g(n)]
    checks.append(Check("family-heights", None, not bad, "" if not bad else f"height mismatch at n={bad[0]}"))
    # base cases
    for i in range(first, first + cert.k + 1):
        member = cert.family.member(i)
        if i in cert.basecases:
            fixture = cert.basecases[i]
            missing = next((e for e in member.edges if e not in set(fixture.edges)), None)
            extra = next((e for e in fixture.edges if e not in set(member.edges)), None)
            if missing is not None or extra is not None:
                checks.append(Check("fixture", i, False, "fixture differs from the family", missing or extra))
            member = fixture
        if not tau.is_plain or tau.height != 1:
            checks.append(Check("basecase", i, False, "tileset is not a single-row transducer"))
            continue
        small = member
        if not _states_are_columns(small, tau):
            checks.append(Check("basecase", i, False, "family states are not columns of tileset colors; needs a tiling equivalence"))
            continue
        v = submodels(LazyPower(tau, g(i)), small)
        checks.append(Check("basecase", i, v.ok, f"power={g(i)} edges={v.checked}", v.missing))
    # invariant
    lag = max([l.lag for l in leaves(cert.pattern) if not l.fixed] + [0])
    for n in range(max(first, origin + lag), n_max + 1):
        big = pattern_value(cert, n)
        target = cert.family.member(n + 1)
        if set(target.states) <= set(big.states):
            v, how = submodels(big, target), ""
        else:
            v, how = submodels_renamed(big, target), " renamed"
        checks.append(Check("invariant", n, v.ok, f"target=T{n + 1}{how} edges={v.checked}/{len(target.edges)}", v.missing))
    # loops
    for n in range(first, n_max + 2):
        checks.append(Check("loop", n, _loop_ok(cert.family.member(n), cert.loopwitness)))
    return Report(cert.name, n_max, checks)


def _states_are_columns(t: MetaTransducer, tau: MetaTransducer) -> bool:
    colors = set(c for s in tau.states for c in s)
    letters = set(tau.alphabet)
    return all(
        len(s) == t.height and set(s) <= colors for s in t.states
    ) and set(t.alphabet) <= letters


# --------------------------------------------------------------------------
# builtin certificates


def robinson_certificate() -> RobustnessCertificate:
    return RobustnessCertificate(
        "robinson",
        "builtin:robinson",
        Family("robinson_H"),
        catalog.ROBINSON_HEIGHTS,
        1,
        parse_pattern("(o Tn T1 Tn)"),
    )


def jr_certificate() -> RobustnessCertificate:
    # T_{m-1} o T_{m-2} o T_{m-1} |= T_{m+1}, i.e. the n -> n+3 relation shifted by two
    return RobustnessCertificate(
        "jeandel-rao",
        "builtin:jeandel-rao",
        Family("jr_T"),
        catalog.JR_HEIGHTS,
        2,
        parse_pattern("(o Tn-1 Tn-2 Tn-1)"),
    )


def periodic_certificate(tileset_ref: str, loop: Loop) -> RobustnessCertificate:
    """``T_n`` is ``n`` stacked copies of a periodic loop of height ``h``; ``g(n) = n h``."""
    if classify_loop(loop).kind != "periodic":
        raise ValueError("periodic certificate needs a periodic loop")
    h = loop.height
    return RobustnessCertificate(
        "periodic",
        tileset_ref,
        Family("stack", loop=loop),
        HeightSequence(base=(h,), coeffs=(1,), const=h, origin=1),
        0,
        parse_pattern("(o T1 Tn)"),
        loopwitness="periodic",
    )


def builtin_certificates() -> dict[str, RobustnessCertificate]:
    out = {"robinson": robinson_certificate(), "jr": jr_certificate()}
    out["periodic-example1"] = periodic_certificate("builtin:example1", example1_periodic_loop())
    return out


def example1_periodic_loop() -> Loop:
    return catalog.appendix_fixtures().periodic


def builtin_certificate(name: str) -> RobustnessCertificate:
    certs = builtin_certificates()
    if name in ("jeandel-rao",):
        name = "jr"
    if name not in certs:
        raise ValueError(f"unknown builtin certificate {name!r}")
    return certs[name]


# --------------------------------------------------------------------------
# the domino driver


@dataclass(frozen=True)
class StepBudget:
    max_height: int = 30
    max_edges: int = 10**6  # size cap for any single power
    max_order: int = 8  # cycle length cap for cyclic-loop search
    max_cycles: int = 5000
    cert_n_max: int = 3
    order_offset: int = 2  # cyclic search at height h looks at cycles up to h + offset

    def order_at(self, h: int) -> int:
        return min(self.max_order, h + self.order_offset)


@dataclass(frozen=True)
class NoTiling:
    n: int
    evidence: MetaTransducer  # the trimmed, edgeless power

    kind = "NoTiling"

    def line(self) -> str:
        return f"verdict NoTiling n={self.n}"


@dataclass(frozen=True)
class PeriodicTiling:
    loop: Loop
    m: int
    found_at: int
    sigma: tuple[int, ...] = ()
    seed: Loop | None = None

    kind = "PeriodicTiling"

    def line(self) -> str:
        from .formats import word

        return (
            f"verdict PeriodicTiling height={self.loop.height} m={self.m} found-at={self.found_at} "
            f"order={self.loop.order} cycle={len(self.loop.edges)} word={word(self.loop.bottom)}"
        )


@dataclass(frozen=True)
class CertificateVerified:
    n_max: int
    report: Report

    kind = "CertificateVerified"

    def line(self) -> str:
        return f"verdict CertificateVerified n-max={self.n_max} certificate={self.report.certificate}"


@dataclass(frozen=True)
class Unknown:
    budget: StepBudget
    reason: str

    kind = "Unknown"

    def line(self) -> str:
        return f"verdict Unknown reason={self.reason}"


DominoVerdict = NoTiling | PeriodicTiling | CertificateVerified | Unknown


def find_cyclic_loop(t: MetaTransducer, max_order: int, limit: int) -> Loop | None:
    """Smallest cyclic, non-periodic cycle of order at most ``max_order``.

    Enumerates simple cycles rooted at their smallest state, so it is
    complete for simple cycles up to the bound and deterministic.
    """
    from .loops import _best_rotation

    best = None
    count = 0
    core = trim(t)
    for root in core.states:
        stack = [(root, [])]
        while stack:
            q, path = stack.pop()
            for e in reversed(core.out_edges(q)):
                if e.dst == root:
                    loop = Loop.from_edges(path + [e], core.height)
                    count += 1
                    if classify_loop(loop).kind == "cyclic":
                        cand = _best_rotation(loop)
                        if best is None or cand.key() < best.key():
                            best = cand
                    if count >= limit:
                        return best
                    continue
                if e.dst < root or len(path) + 1 >= max_order or any(x.dst == e.dst for x in path):
                    continue
                stack.append((e.dst, path + [e]))
    return best


def _revalidate_periodic(base: MetaTransducer, loop: Loop) -> bool:
    from .core import path_accepts

    if loop.bottom != loop.top:
        return False
    s = loop.states[0]
    return path_accepts(LazyPower(base, loop.height), s, s, loop.bottom, loop.top)


def domino_driver(
    ts: WangTileset | MetaTransducer,
    budget: StepBudget = StepBudget(),
    cert: RobustnessCertificate | None = None,
    log: Callable[[str], None] | None = None,
) -> DominoVerdict:
    """Round-robin over loop-freeness, periodic-loop search and certificate checking."""
    base = from_tileset(ts) if isinstance(ts, WangTileset) else ts
    say = log or (lambda s: None)
    if cert is not None:
        report = verify_certificate(cert, budget.cert_n_max, tileset=base)
        say(f"round 0 certificate {'PASS' if report.ok else 'FAIL'}")
        if report.ok:
            return CertificateVerified(budget.cert_n_max, report)
    gen = powers(base, do_trim=True, max_edges=budget.max_edges)
    try:
        for h in range(1, budget.max_height + 1):
            cur = next(gen)
            say(f"round {h} power edges={len(cur.edges)} states={len(cur.states)}")
            if not cur.edges:
                assert not trim(cur).edges
                return NoTiling(h, cur)
            p = find_periodic_loop(cur)
            if p is not None:
                assert _revalidate_periodic(base, p)
                return PeriodicTiling(p, 1, h, (0,), p)
            c = find_cyclic_loop(cur, budget.order_at(h), budget.max_cycles)
            if c is not None:
                res = cyclic_to_periodic(base, [c])
                assert _revalidate_periodic(base, res.loop)
                return PeriodicTiling(res.loop, res.m, h, res.sigma, c)
    except BudgetExceeded as exc:
        return Unknown(budget, f"power {exc.k + 1} exceeds {budget.max_edges} edges")
    return Unknown(budget, f"no verdict up to height {budget.max_height}")
