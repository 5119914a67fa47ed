"""Line-based text formats.

Every file starts with ``format-version 1``; ``#`` starts a comment.
Words and state columns are written as dot-joined letters (``r.v``),
so symbols may not contain whitespace, dots, commas or ``#``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterator

from .core import Edge, MetaTransducer, WangTileset

FORMAT_VERSION = "1"
_BAD = re.compile(r"[\s.,#=]")


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body.split()


def _body(text: str) -> list[tuple[int, list[str]]]:
    """Lines after the version header."""
    lines = list(_lines(text))
    if not lines:
        raise ParseError("empty input", 1)
    no, head = lines[0]
    if head != ["format-version", FORMAT_VERSION]:
        raise ParseError(f"expected 'format-version {FORMAT_VERSION}'", no)
    return lines[1:]


def _header() -> list[str]:
    return [f"format-version {FORMAT_VERSION}"]


def _sym(s: str) -> str:
    if not s or _BAD.search(s):
        raise ValueError(f"symbol {s!r} cannot be serialized")
    return s


def word(w) -> str:
    return ".".join(_sym(c) for c in w)


def unword(s: str, no: int | None = None) -> tuple[str, ...]:
    parts = tuple(s.split("."))
    if any(not p for p in parts):
        raise ParseError(f"bad word {s!r}", no)
    return parts


def _kv(tokens: list[str], no: int) -> dict[str, str]:
    out = {}
    for t in tokens:
        if "=" not in t:
            raise ParseError(f"expected key=value, got {t!r}", no)
        k, v = t.split("=", 1)
        out[k] = v
    return out


def kind_of(text: str) -> str:
    """First keyword after the header: tileset, transducer, loop, map, machine or certificate."""
    body = _body(text)
    if not body:
        raise ParseError("no content after header", 2)
    first = body[0][1][0]
    return {"dim": "map"}.get(first, first)


# --------------------------------------------------------------------------
# tilesets


def serialize_tileset(ts: WangTileset) -> str:
    out = _header()
    out.append(f"tileset {_sym(ts.name)}")
    out.append("hcolors " + " ".join(_sym(c) for c in sorted(ts.hcolors)))
    out.append("vcolors " + " ".join(_sym(c) for c in sorted(ts.vcolors)))
    for t in ts.tiles:
        out.append("tile " + " ".join(_sym(c) for c in t))
    return "\n".join(out) + "\n"


def parse_tileset(text: str) -> WangTileset:
    name, hc, vc, tiles = None, None, None, []
    for no, tok in _body(text):
        key, rest = tok[0], tok[1:]
        if key == "tileset":
            if len(rest) != 1:
                raise ParseError("tileset takes one name", no)
            name = rest[0]
        elif key == "hcolors":
            hc = set(rest)
        elif key == "vcolors":
            vc = set(rest)
        elif key == "tile":
            if len(rest) != 4:
                raise ParseError("tile needs w e s n", no)
            if hc is not None and (rest[0] not in hc or rest[1] not in hc):
                raise ParseError(f"undeclared horizontal color in {rest}", no)
            if vc is not None and (rest[2] not in vc or rest[3] not in vc):
                raise ParseError(f"undeclared vertical color in {rest}", no)
            tiles.append(tuple(rest))
        else:
            raise ParseError(f"unknown keyword {key!r}", no)
    if name is None:
        raise ParseError("missing 'tileset NAME'")
    ts = WangTileset.build(name, tiles)
    return WangTileset(ts.name, frozenset(hc or ts.hcolors), frozenset(vc or ts.vcolors), ts.tiles)


# --------------------------------------------------------------------------
# transducers


def _edge_line(e: Edge) -> str:
    return f"edge {word(e.src)} {word(e.dst)} {word(e.bottom)} {word(e.top)}"


def serialize_transducer(t: MetaTransducer) -> str:
    out = _header()
    out.append(f"transducer height={t.height}")
    out.append("alphabet " + " ".join(_sym(c) for c in t.alphabet))
    out.extend(f"state {word(s)}" for s in t.states)
    out.extend(_edge_line(e) for e in t.edges)
    return "\n".join(out) + "\n"


def _parse_edge(rest: list[str], no: int) -> Edge:
    if len(rest) != 4:
        raise ParseError("edge needs from to bottom top", no)
    return Edge(*(unword(r, no) for r in rest))


def parse_transducer(text: str) -> MetaTransducer:
    height, states, alphabet, edges = None, [], [], []
    for no, tok in _body(text):
        key, rest = tok[0], tok[1:]
        if key == "transducer":
            kv = _kv(rest, no)
            try:
                height = int(kv["height"])
            except (KeyError, ValueError):
                raise ParseError("expected 'transducer height=<int>'", no) from None
        elif key == "alphabet":
            alphabet.extend(rest)
        elif key == "state":
            if len(rest) != 1:
                raise ParseError("state takes one column", no)
            states.append(unword(rest[0], no))
        elif key == "edge":
            edges.append(_parse_edge(rest, no))
        else:
            raise ParseError(f"unknown keyword {key!r}", no)
    if height is None:
        raise ParseError("missing 'transducer height=<int>'")
    try:
        return MetaTransducer.make(edges, height=height, states=states, alphabet=alphabet)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_transducer(text: str) -> MetaTransducer:
    """Accept either a tileset or a transducer file."""
    from .core import from_tileset

    if kind_of(text) == "tileset":
        return from_tileset(parse_tileset(text))
    return parse_transducer(text)


# --------------------------------------------------------------------------
# loops


def serialize_loop(loop) -> str:
    out = _header()
    states = ",".join(word(s) for s in loop.states)
    out.append(f"loop h={loop.height} order={loop.order} states={states} bottom={word(loop.bottom)} top={word(loop.top)}")
    out.extend(_edge_line(e) for e in loop.edges)
    return "\n".join(out) + "\n"


def parse_loop(text: str):
    from .loops import Loop

    head, edges, head_no = None, [], None
    for no, tok in _body(text):
        if tok[0] == "loop":
            head, head_no = _kv(tok[1:], no), no
        elif tok[0] == "edge":
            edges.append(_parse_edge(tok[1:], no))
        else:
            raise ParseError(f"unknown keyword {tok[0]!r}", no)
    if head is None:
        raise ParseError("missing 'loop' line")
    try:
        h = int(head["h"])
        loop = Loop.from_edges(edges, h)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad loop: {exc}", head_no) from None
    if "bottom" in head and loop.bottom != unword(head["bottom"], head_no):
        raise ParseError("bottom word does not match the edges", head_no)
    if "top" in head and loop.top != unword(head["top"], head_no):
        raise ParseError("top word does not match the edges", head_no)
    if "order" in head and int(head["order"]) != loop.order:
        raise ParseError("order does not match the edges", head_no)
    return loop


# --------------------------------------------------------------------------
# piecewise affine maps


def _fracs(s: str, no: int) -> list[Fraction]:
    try:
        return [Fraction(x) for x in s.split(",")]
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rationals {s!r}", no) from None


def serialize_map(m) -> str:
    out = _header()
    out.append(f"dim {m.dim}")
    for p in m.pieces:
        corner = ",".join(str(c) for c in p.cube.corner)
        M = ",".join(str(c) for row in p.f.M for c in row)
        b = ",".join(str(c) for c in p.f.b)
        out.append(f"piece corner={corner} M={M} b={b}")
    return "\n".join(out) + "\n"


def parse_map(text: str):
    from .kari import PiecewiseAffineMap, RationalAffine

    dim, pieces = None, []
    for no, tok in _body(text):
        if tok[0] == "dim":
            if len(tok) != 2 or not tok[1].isdigit() or int(tok[1]) < 1:
                raise ParseError("expected 'dim <positive int>'", no)
            dim = int(tok[1])
        elif tok[0] == "piece":
            if dim is None:
                raise ParseError("'dim' must come before pieces", no)
            kv = _kv(tok[1:], no)
            try:
                corner = [int(c) for c in kv["corner"].split(",")]
                M = _fracs(kv["M"], no)
                b = _fracs(kv["b"], no)
            except (KeyError, ValueError):
                raise ParseError("piece needs corner=, M= and b=", no) from None
            if len(corner) != dim or len(b) != dim or len(M) != dim * dim:
                raise ParseError("piece dimensions do not match 'dim'", no)
            rows = [M[i * dim : (i + 1) * dim] for i in range(dim)]
            pieces.append((tuple(corner), RationalAffine.make(rows, b)))
        else:
            raise ParseError(f"unknown keyword {tok[0]!r}", no)
    if dim is None:
        raise ParseError("missing 'dim'")
    try:
        return PiecewiseAffineMap.make(pieces, dim=dim)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


# --------------------------------------------------------------------------
# Turing machines


def serialize_machine(m) -> str:
    out = _header()
    out.append(f"machine {_sym(m.name)}")
    out.append("states " + " ".join(m.states))
    out.append("input " + " ".join(m.input_alphabet))
    out.append("tape " + " ".join(m.tape_alphabet))
    out.append(f"blank {m.blank}")
    out.append(f"start {m.start}")
    out.append(f"accept {m.accept}")
    out.append(f"reject {m.reject}")
    for (q, a), (r, b, d) in sorted(m.delta.items()):
        out.append(f"rule {q} {a} -> {r} {b} {d}")
    return "\n".join(out) + "\n"


def parse_machine(text: str):
    from .turing import TuringMachine

    fields: dict[str, list[str]] = {}
    delta = {}
    name = "machine"
    for no, tok in _body(text):
        key, rest = tok[0], tok[1:]
        if key == "machine":
            name = rest[0] if rest else name
        elif key in ("states", "input", "tape"):
            fields[key] = rest
        elif key in ("blank", "start", "accept", "reject"):
            if len(rest) != 1:
                raise ParseError(f"{key} takes one symbol", no)
            fields[key] = rest
        elif key == "rule":
            if len(rest) != 6 or rest[2] != "->" or rest[5] not in ("L", "R"):
                raise ParseError("expected 'rule q a -> q2 b L|R'", no)
            if (rest[0], rest[1]) in delta:
                raise ParseError(f"duplicate rule for {rest[0]} {rest[1]}", no)
            delta[(rest[0], rest[1])] = (rest[3], rest[4], rest[5])
        else:
            raise ParseError(f"unknown keyword {key!r}", no)
    missing = [k for k in ("states", "tape", "blank", "start", "accept", "reject") if k not in fields]
    if missing:
        raise ParseError("missing " + ", ".join(missing))
    try:
        return TuringMachine(
            tuple(fields["states"]),
            tuple(fields.get("input", ())),
            tuple(fields["tape"]),
            fields["blank"][0],
            delta,
            fields["start"][0],
            fields["accept"][0],
            fields["reject"][0],
            name,
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


# --------------------------------------------------------------------------
# certificates


def serialize_certificate(cert) -> str:
    out = _header()
    out.append(f"certificate {_sym(cert.name)}")
    out.append(f"tileset {cert.tileset}")
    out.append(f"family {cert.family.name}")
    g = cert.heights
    base = ",".join(str(v) for v in g.base)
    rec = ",".join(str(c) for c in g.coeffs) + f";{g.const}"
    out.append(f"heights base={base} rec={rec} origin={g.origin}")
    out.append(f"k {cert.k}")
    out.append(f"pattern {cert.pattern}")
    out.append(f"loopwitness {cert.loopwitness}")
    if cert.family.name == "stack":
        loop = cert.family.loop
        out.append(f"stackheight {loop.height}")
        out.extend("stack" + _edge_line(e) for e in loop.edges)
    for i in sorted(cert.basecases):
        ref = cert.basecase_files.get(i)
        if ref is None:
            raise ValueError("basecase fixtures need a file reference to be serialized")
        out.append(f"basecase {i} {ref}")
    return "\n".join(out) + "\n"


def parse_certificate(text: str, base_dir=None):
    from pathlib import Path

    from .catalog import HeightSequence
    from .certify import Family, RobustnessCertificate, parse_pattern
    from .loops import Loop

    f: dict = {}
    basecases, files, stack_edges, stack_h = {}, {}, [], None
    for no, tok in _body(text):
        key, rest = tok[0], tok[1:]
        if key in ("certificate", "tileset", "family", "k", "loopwitness"):
            if len(rest) != 1:
                raise ParseError(f"{key} takes one value", no)
            f[key] = rest[0]
        elif key == "heights":
            kv = _kv(rest, no)
            try:
                base = tuple(int(v) for v in kv["base"].split(","))
                coeffs, const = kv["rec"].split(";")
                coeffs = tuple(int(v) for v in coeffs.split(","))
                f["heights"] = HeightSequence(base, coeffs, int(const), int(kv.get("origin", 1)))
            except (KeyError, ValueError) as exc:
                raise ParseError(f"bad heights: {exc}", no) from None
        elif key == "pattern":
            try:
                f["pattern"] = parse_pattern(" ".join(rest))
            except ValueError as exc:
                raise ParseError(str(exc), no) from None
        elif key == "basecase":
            if len(rest) != 2 or not rest[0].lstrip("-").isdigit():
                raise ParseError("expected 'basecase <i> <transducer-file>'", no)
            path = Path(rest[1])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            try:
                basecases[int(rest[0])] = parse_transducer(path.read_text())
            except OSError as exc:
                raise ParseError(f"cannot read {rest[1]}: {exc}", no) from None
            files[int(rest[0])] = rest[1]
        elif key == "stackheight":
            stack_h = int(rest[0])
        elif key == "stackedge":
            stack_edges.append(_parse_edge(rest, no))
        else:
            raise ParseError(f"unknown keyword {key!r}", no)
    missing = [k for k in ("certificate", "tileset", "family", "heights", "k", "pattern") if k not in f]
    if missing:
        raise ParseError("missing " + ", ".join(missing))
    loop = None
    if f["family"] == "stack":
        if stack_h is None or not stack_edges:
            raise ParseError("stack family needs stackheight and stackedge lines")
        loop = Loop.from_edges(stack_edges, stack_h)
    elif f["family"] not in ("robinson_H", "jr_T", "explicit"):
        raise ParseError(f"unknown family {f['family']!r}")
    family = Family(f["family"], members=dict(basecases) if f["family"] == "explicit" else {}, loop=loop)
    return RobustnessCertificate(
        f["certificate"], f["tileset"], family, f["heights"], int(f["k"]), f["pattern"],
        basecases, f.get("loopwitness", "any"), files,
    )
