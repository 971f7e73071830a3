"""Exact PATS / MBPATS oracles for desk-size patterns.

The search walks the pattern row-major. A cell's inputs are fixed by its
neighbors (or chosen for seed edges), so it either reuses the tile with those
inputs or creates a new tile of the cell's color. Outputs of new tiles and
seed glues range over the glues seen so far plus one fresh glue; numbering
fresh glues in order of introduction removes the renaming symmetry.
"""
from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from tilepats.core import Color, Pattern, Seed, TileError, TileSet, TileType, verify_stream

DEFAULT_MAX_CELLS = 64


class Status(enum.Enum):
    FOUND = "found"
    INFEASIBLE = "infeasible"
    BUDGET_EXCEEDED = "budget_exceeded"


class BudgetExceeded(TileError):
    def __init__(self, message: str, nodes: int = 0):
        self.nodes = nodes
        super().__init__(message)


@dataclass(frozen=True)
class SearchBudget:
    max_total_tiles: int | None = None
    per_color_bounds: Mapping[Color, int] | None = None
    node_limit: int | None = None
    time_limit: float | None = None
    max_cells: int = DEFAULT_MAX_CELLS

    def __post_init__(self):
        if self.max_total_tiles is None and self.per_color_bounds is None:
            raise ValueError("a search budget needs a total or a per-color bound")


@dataclass(frozen=True)
class SearchResult:
    status: Status
    nodes_explored: int
    tileset: TileSet | None = field(default=None, repr=False)

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND


class _Stop(Exception):
    pass


class _Search:
    def __init__(self, p: Pattern, budget: SearchBudget):
        self.w, self.h = p.dims
        rows = [p.row(y) for y in range(1, self.h + 1)]
        self.colors = list(dict.fromkeys(c for row in rows for c in row))
        index = {c: i for i, c in enumerate(self.colors)}
        self.code = [index[c] for row in rows for c in row]
        per = budget.per_color_bounds or {}
        inf = len(self.code)
        self.bound = [min(per.get(c, inf), inf) for c in self.colors]
        self.total = budget.max_total_tiles if budget.max_total_tiles is not None else inf
        self.node_limit = budget.node_limit
        self.deadline = None if budget.time_limit is None else time.monotonic() + budget.time_limit
        self.nodes = 0
        self.count = [0] * len(self.colors)
        self.missing = len(self.colors)  # colors without a tile yet
        self.tiles: dict[tuple[int, int], tuple[int, int, int]] = {}
        self.order: list[tuple[int, int]] = []
        self.north = [-1] * self.w
        self.seed_n = [-1] * self.w
        self.seed_e = [-1] * self.h
        self.nh = self.nv = 0

    def run(self) -> bool:
        if any(b < 1 for b in self.bound) or self.total < len(self.colors):
            return False
        return self._step(0, -1)

    def _tick(self):
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise _Stop
        if self.deadline is not None and self.nodes % 4096 == 0 and time.monotonic() > self.deadline:
            raise _Stop

    def _step(self, pos: int, west: int) -> bool:
        if pos == len(self.code):
            return True
        y, x = divmod(pos, self.w)
        if y > 0:
            return self._step_west(pos, self.north[x], west)
        for g in range(self.nh + 1):
            fresh = g == self.nh
            self.nh += fresh
            self.seed_n[x] = g
            ok = self._step_west(pos, g, west)
            self.nh -= fresh
            if ok:
                return True
        return False

    def _step_west(self, pos: int, s: int, west: int) -> bool:
        y, x = divmod(pos, self.w)
        if x > 0:
            return self._place(pos, s, west)
        for g in range(self.nv + 1):
            fresh = g == self.nv
            self.nv += fresh
            self.seed_e[y] = g
            ok = self._place(pos, s, g)
            self.nv -= fresh
            if ok:
                return True
        return False

    def _advance(self, pos: int, n: int, e: int) -> bool:
        x = pos % self.w
        old = self.north[x]
        self.north[x] = n
        ok = self._step(pos + 1, e)
        self.north[x] = old
        return ok

    def _place(self, pos: int, s: int, w: int) -> bool:
        self._tick()
        c = self.code[pos]
        tile = self.tiles.get((s, w))
        if tile is not None:
            return tile[0] == c and self._advance(pos, tile[1], tile[2])
        first = self.count[c] == 0
        if self.count[c] >= self.bound[c] or len(self.tiles) + 1 + self.missing - first > self.total:
            return False
        self.count[c] += 1
        self.missing -= first
        self.order.append((s, w))
        nh, nv = self.nh, self.nv
        for n in range(nh + 1):
            self.nh = nh + (n == nh)
            for e in range(nv + 1):
                self.nv = nv + (e == nv)
                self.tiles[(s, w)] = (c, n, e)
                if self._advance(pos, n, e):
                    return True
        self.nh, self.nv = nh, nv
        del self.tiles[(s, w)]
        self.order.pop()
        self.count[c] -= 1
        self.missing += first
        return False

    def tileset(self) -> TileSet:
        tiles = tuple(TileType(self.colors[c], f"h{n}", f"v{e}", f"h{s}", f"v{w}")
                      for (s, w), (c, n, e) in ((k, self.tiles[k]) for k in self.order))
        seed = Seed(tuple(f"h{g}" for g in self.seed_n), tuple(f"v{g}" for g in self.seed_e))
        return TileSet(tiles, seed)


def solve_exact(p: Pattern, budget: SearchBudget) -> SearchResult:
    """Decide whether a directed tile set within ``budget`` assembles ``p``."""
    if p.size > budget.max_cells:
        return SearchResult(Status.BUDGET_EXCEEDED, 0)
    search = _Search(p, budget)
    try:
        ok = search.run()
    except _Stop:
        return SearchResult(Status.BUDGET_EXCEEDED, search.nodes)
    if not ok:
        return SearchResult(Status.INFEASIBLE, search.nodes)
    ts = search.tileset()
    verify_stream(ts, p)
    return SearchResult(Status.FOUND, search.nodes, ts)


def solve_mbpats(p: Pattern, per_color_bounds: Mapping[Color, int], **limits) -> SearchResult:
    return solve_exact(p, SearchBudget(per_color_bounds=per_color_bounds, **limits))


def minimize(p: Pattern, cap: int, **limits) -> tuple[int, TileSet]:
    """Smallest tile count up to ``cap``; raises BudgetExceeded otherwise."""
    nodes = 0
    for m in range(len(set(itertools.chain.from_iterable(p.rows()))), cap + 1):
        r = solve_exact(p, SearchBudget(max_total_tiles=m, **limits))
        nodes += r.nodes_explored
        if r.status is Status.FOUND:
            return m, r.tileset
        if r.status is Status.BUDGET_EXCEEDED:
            raise BudgetExceeded(f"search limit hit while trying {m} tile types", nodes)
    raise BudgetExceeded(f"no tile set with at most {cap} tile types", nodes)


# ---------------------------------------------------------------- reference oracle


def _set_partitions(items: list[int]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first], *part]
        for i in range(len(part)):
            yield [*part[:i], [first, *part[i]], *part[i + 1:]]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        self.parent[self.find(a)] = self.find(b)


def feasible_profiles(p: Pattern) -> set[tuple[int, ...]]:
    """Per-color tile counts of every tile-type partition that some directed tile set realizes.

    Brute force independent of :func:`solve_exact`: a tile set corresponds to a
    partition of the cells into single-colored classes (one per tile type).
    Glue equalities forced by sharing a tile are merged with union-find; the
    partition is realizable iff no two classes end up with the same inputs.
    Counts are listed in first-appearance color order.
    """
    w, h = p.dims
    cells = [(x, y) for y in range(1, h + 1) for x in range(1, w + 1)]
    color = {cell: p.cell(*cell) for cell in cells}
    order = list(dict.fromkeys(color[c] for c in cells))

    def hedge(x, y):  # edge above (x, y); y = 0 is the seed
        return y * w + (x - 1)

    def vedge(x, y):  # edge right of (x, y); x = 0 is the seed
        return (w + 1) * (h + 1) + (y - 1) * (w + 1) + x

    profiles = set()
    for part in _set_partitions(list(range(len(cells)))):
        blocks = [[cells[i] for i in b] for b in part]
        if any(len({color[c] for c in b}) > 1 for b in blocks):
            continue
        uf = _UnionFind(2 * (w + 1) * (h + 1))
        for b in blocks:
            x0, y0 = b[0]
            for x, y in b[1:]:
                uf.union(hedge(x, y), hedge(x0, y0))
                uf.union(hedge(x, y - 1), hedge(x0, y0 - 1))
                uf.union(vedge(x, y), vedge(x0, y0))
                uf.union(vedge(x - 1, y), vedge(x0 - 1, y0))
        inputs = [(uf.find(hedge(x, y - 1)), uf.find(vedge(x - 1, y))) for x, y in (b[0] for b in blocks)]
        if len(set(inputs)) == len(inputs):
            counts = np.zeros(len(order), dtype=int)
            for b in blocks:
                counts[order.index(color[b[0]])] += 1
            profiles.add(tuple(int(c) for c in counts))
    return profiles


def reference_feasible(p: Pattern, budget: SearchBudget) -> bool:
    order = list(dict.fromkeys(itertools.chain.from_iterable(p.rows())))
    per = budget.per_color_bounds or {}
    total = budget.max_total_tiles
    return any(
        (total is None or sum(prof) <= total) and all(n <= per.get(c, n) for c, n in zip(order, prof))
        for prof in feasible_profiles(p)
    )
