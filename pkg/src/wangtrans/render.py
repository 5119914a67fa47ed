"""Drawing rectangular patterns and benchmark tables.

Text output is a grid of tile ids, top row first.  SVG draws each tile as
a unit square split into four triangles, one per side color.
"""

from __future__ import annotations

import colorsys
import hashlib
from pathlib import Path
from typing import Sequence

from .core import Tile
from .loops import RectangularPattern

_NAMED = {
    "R": "#d62728", "B": "#1f77b4", "V": "#2ca02c", "W": "#f0f0f0",
    "r": "#d62728", "b": "#1f77b4", "v": "#2ca02c",
    "0": "#f0f0f0", "1": "#d62728", "2": "#2ca02c", "3": "#1f77b4", "4": "#ff7f0e",
}


def color_hex(c: str) -> str:
    """Stable color for a symbol: a small named palette, else a hash-derived hue."""
    if c in _NAMED:
        return _NAMED[c]
    h = int(hashlib.sha256(c.encode()).hexdigest()[:8], 16)
    r, g, b = colorsys.hls_to_rgb((h % 360) / 360, 0.55, 0.6)
    return "#{:02x}{:02x}{:02x}".format(int(r * 255), int(g * 255), int(b * 255))


def tile_ids(tiles: Sequence[Tile]) -> dict[Tile, str]:
    return {t: f"t{i}" for i, t in enumerate(sorted(set(tiles)))}


def render_text(p: RectangularPattern, ids: dict[Tile, str] | None = None) -> str:
    if ids is None:
        ids = tile_ids([t for row in p.rows for t in row])
    width = max((len(v) for v in ids.values()), default=1)
    lines = [" ".join(ids[t].rjust(width) for t in row) for row in reversed(p.rows)]
    return "\n".join(lines) + "\n"


def render_svg(p: RectangularPattern, scale: int = 40) -> str:
    h, w = p.height, p.width
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * scale}" height="{h * scale}" '
        f'viewBox="0 0 {w * scale} {h * scale}">'
    ]
    for i, row in enumerate(p.rows):
        y0 = (h - 1 - i) * scale
        for j, t in enumerate(row):
            x0 = j * scale
            x1, y1 = x0 + scale, y0 + scale
            cx, cy = x0 + scale / 2, y0 + scale / 2
            tris = {
                "n": ((x0, y0), (x1, y0)),
                "e": ((x1, y0), (x1, y1)),
                "s": ((x1, y1), (x0, y1)),
                "w": ((x0, y1), (x0, y0)),
            }
            for side, (a, b) in tris.items():
                pts = f"{a[0]},{a[1]} {b[0]},{b[1]} {cx:g},{cy:g}"
                out.append(f'<polygon points="{pts}" fill="{color_hex(getattr(t, side))}" stroke="black" stroke-width="0.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_pattern(p: RectangularPattern, fmt: str = "text") -> bytes:
    if fmt == "text":
        return render_text(p).encode()
    if fmt == "svg":
        return render_svg(p).encode()
    raise ValueError(f"unknown render format {fmt!r}")


def pattern_figure(p: RectangularPattern, path: Path) -> None:
    """PNG drawing of a pattern with matplotlib."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Polygon

    fig, ax = plt.subplots(figsize=(max(2, p.width * 0.6), max(2, p.height * 0.6)))
    for i, row in enumerate(p.rows):
        for j, t in enumerate(row):
            x0, y0, x1, y1 = j, i, j + 1, i + 1
            c = (j + 0.5, i + 0.5)
            sides = {"n": ((x0, y1), (x1, y1)), "e": ((x1, y1), (x1, y0)), "s": ((x1, y0), (x0, y0)), "w": ((x0, y0), (x0, y1))}
            for side, (a, b) in sides.items():
                ax.add_patch(Polygon([a, b, c], facecolor=color_hex(getattr(t, side)), edgecolor="black", lw=0.5))
    ax.set_xlim(0, p.width)
    ax.set_ylim(0, p.height)
    ax.set_aspect("equal")
    ax.axis("off")
    fig.savefig(path, dpi=100, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)


def bench_figure(records: Sequence, path: Path, title: str = "") -> None:
    """Edge and state counts of trimmed powers against ``k``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ks = [r.k for r in records]
    ax.plot(ks, [r.edges for r in records], marker="o", label="edges")
    ax.plot(ks, [r.states for r in records], marker="s", label="states")
    ax.set_xlabel("k")
    ax.set_ylabel("size of trimmed power")
    ax.set_yscale("symlog")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
