"""Growth of trimmed powers."""

from __future__ import annotations

import random
import time
from typing import Iterator, NamedTuple

from .core import BudgetExceeded, MetaTransducer, WangTileset, powers


class BenchRecord(NamedTuple):
    tileset: str
    k: int
    states: int
    edges: int
    seconds: float
    status: str = "ok"  # ok, empty or budget

    def row(self, timing: bool = False) -> str:
        cells = [self.tileset, str(self.k), str(self.states), str(self.edges), self.status]
        if timing:
            cells.append(f"{self.seconds:.3f}")
        return ",".join(cells)


HEADER = "tileset,k,states,edges,status"


def bench_iter(name: str, t: MetaTransducer, k_max: int, max_edges: int = 2_000_000) -> Iterator[BenchRecord]:
    start = time.perf_counter()
    gen = powers(t, do_trim=True, max_edges=max_edges)
    k = 0
    try:
        for k, p in enumerate(gen, start=1):
            status = "empty" if not p.edges else "ok"
            yield BenchRecord(name, k, len(p.states), len(p.edges), time.perf_counter() - start, status)
            if not p.edges or k >= k_max:
                return
    except BudgetExceeded as exc:
        yield BenchRecord(name, exc.k + 1, -1, -1, time.perf_counter() - start, "budget")


def bench(name: str, t: MetaTransducer, k_max: int, max_edges: int = 2_000_000) -> list[BenchRecord]:
    return list(bench_iter(name, t, k_max, max_edges))


def random_tileset(n_tiles: int, h_colors: int, v_colors: int, seed: int) -> WangTileset:
    rnd = random.Random(seed)
    hs = [f"h{i}" for i in range(h_colors)]
    vs = [f"v{i}" for i in range(v_colors)]
    tiles = set()
    while len(tiles) < n_tiles:
        tiles.add((rnd.choice(hs), rnd.choice(hs), rnd.choice(vs), rnd.choice(vs)))
    return WangTileset.build(f"random-{seed}", sorted(tiles))
