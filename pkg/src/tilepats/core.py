"""Colored Wang tiles, patterns and deterministic rectilinear assembly.

Coordinates are 1-based with (1, 1) at the bottom left. A tile's inputs are
its south and west glues, its outputs the north and east glues. Glues on
horizontal edges (N/S) and on vertical edges (E/W) live in separate
namespaces: they are only ever compared within their own namespace, so a
horizontal and a vertical glue sharing a token are unrelated.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from tilepats import _engine

Color = str
Glue = str


class TileError(Exception):
    """Base class for domain errors raised by this package."""


class NotDirected(TileError):
    def __init__(self, first: "TileType", second: "TileType"):
        self.first, self.second = first, second
        super().__init__(f"tile types {first} and {second} share inputs {first.inputs}")


class AssemblyError(TileError):
    pass


class VerifyError(TileError):
    pass


class NoTileFits(AssemblyError, VerifyError):
    def __init__(self, position: tuple[int, int], s_glue: Glue, w_glue: Glue):
        self.position, self.s_glue, self.w_glue = position, s_glue, w_glue
        super().__init__(f"no tile type with inputs S={s_glue!r} W={w_glue!r} at {position}")


class ColorMismatch(VerifyError):
    def __init__(self, position: tuple[int, int], expected: Color, got: Color):
        self.position, self.expected, self.got = position, expected, got
        super().__init__(f"color mismatch at {position}: pattern has {expected!r}, tile has {got!r}")


@dataclass(frozen=True, order=True)
class TileType:
    color: Color
    n: Glue
    e: Glue
    s: Glue
    w: Glue

    @property
    def inputs(self) -> tuple[Glue, Glue]:
        return (self.s, self.w)

    @property
    def outputs(self) -> tuple[Glue, Glue]:
        return (self.n, self.e)

    def renamed(self, horizontal: Callable[[Glue], Glue], vertical: Callable[[Glue], Glue]) -> "TileType":
        return TileType(self.color, horizontal(self.n), vertical(self.e), horizontal(self.s), vertical(self.w))


@dataclass(frozen=True)
class Seed:
    """L-shaped seed: ``north`` feeds row 1 left to right, ``east`` feeds column 1 bottom to top."""

    north: tuple[Glue, ...]
    east: tuple[Glue, ...]

    def __post_init__(self):
        object.__setattr__(self, "north", tuple(self.north))
        object.__setattr__(self, "east", tuple(self.east))


@dataclass(frozen=True)
class TileSet:
    tiles: tuple[TileType, ...]
    seed: Seed

    def __post_init__(self):
        # set semantics, first occurrence order kept for reproducible ids
        object.__setattr__(self, "tiles", tuple(dict.fromkeys(self.tiles)))

    def __len__(self) -> int:
        return len(self.tiles)

    @property
    def width(self) -> int:
        return len(self.seed.north)

    @property
    def height(self) -> int:
        return len(self.seed.east)

    def is_directed(self) -> bool:
        return is_directed(self)

    def colors(self) -> set[Color]:
        return {t.color for t in self.tiles}

    def by_color(self) -> dict[Color, list[TileType]]:
        groups: dict[Color, list[TileType]] = defaultdict(list)
        for t in self.tiles:
            groups[t.color].append(t)
        return dict(groups)

    def with_color(self, color: Color) -> list[TileType]:
        return [t for t in self.tiles if t.color == color]

    def renamed(self, horizontal: Mapping[Glue, Glue] | Callable[[Glue], Glue],
                vertical: Mapping[Glue, Glue] | Callable[[Glue], Glue]) -> "TileSet":
        h = horizontal.__getitem__ if isinstance(horizontal, Mapping) else horizontal
        v = vertical.__getitem__ if isinstance(vertical, Mapping) else vertical
        seed = Seed(tuple(h(g) for g in self.seed.north), tuple(v(g) for g in self.seed.east))
        return TileSet(tuple(t.renamed(h, v) for t in self.tiles), seed)

    def horizontal_glues(self) -> set[Glue]:
        return {g for t in self.tiles for g in (t.n, t.s)} | set(self.seed.north)

    def vertical_glues(self) -> set[Glue]:
        return {g for t in self.tiles for g in (t.e, t.w)} | set(self.seed.east)


# ---------------------------------------------------------------- patterns


class Pattern:
    """A width x height grid of colors.

    Subclasses provide ``palette`` (sequence of colors) and ``row_codes(y)``,
    an integer array of palette indices for row ``y``. Everything that scans a
    pattern goes through ``row_codes`` in increasing ``y`` so procedural
    patterns never have to be materialized.
    """

    width: int
    height: int

    @property
    def palette(self) -> Sequence[Color]:
        raise NotImplementedError

    def row_codes(self, y: int) -> np.ndarray:
        raise NotImplementedError

    def cell(self, x: int, y: int) -> Color:
        self._check(x, y)
        return self.palette[int(self.row_codes(y)[x - 1])]

    def row(self, y: int) -> list[Color]:
        pal = self.palette
        return [pal[int(c)] for c in self.row_codes(y)]

    def rows(self) -> Iterator[list[Color]]:
        for y in range(1, self.height + 1):
            yield self.row(y)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.width, self.height)

    @property
    def size(self) -> int:
        return self.width * self.height

    def _check(self, x: int, y: int) -> None:
        if not (1 <= x <= self.width and 1 <= y <= self.height):
            raise IndexError(f"position {(x, y)} outside {self.width}x{self.height} pattern")

    def to_dense(self) -> "DensePattern":
        return DensePattern.from_rows(list(self.rows()))

    def __eq__(self, other):
        if not isinstance(other, Pattern):
            return NotImplemented
        if self.dims != other.dims:
            return False
        return all(self.row(y) == other.row(y) for y in range(1, self.height + 1))

    __hash__ = None

    def __repr__(self):
        return f"<{type(self).__name__} {self.width}x{self.height}>"


class DensePattern(Pattern):
    def __init__(self, codes: np.ndarray, palette: Sequence[Color]):
        codes = np.asarray(codes, dtype=np.int32)
        if codes.ndim != 2 or codes.size == 0:
            raise ValueError("pattern needs a non-empty 2-d code grid")
        self.codes = codes
        self.codes.setflags(write=False)
        self.height, self.width = codes.shape
        self._palette = tuple(palette)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Color]]) -> "DensePattern":
        """Build from ``rows[y-1][x-1]``, i.e. bottom row first."""
        palette: dict[Color, int] = {}
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise ValueError("ragged pattern rows")
        codes = [[palette.setdefault(c, len(palette)) for c in r] for r in rows]
        return cls(np.array(codes, dtype=np.int32), list(palette))

    @classmethod
    def from_top_rows(cls, rows: Sequence[Sequence[Color]]) -> "DensePattern":
        return cls.from_rows(list(reversed(rows)))

    @classmethod
    def from_function(cls, width: int, height: int, fn: Callable[[int, int], Color]) -> "DensePattern":
        return cls.from_rows([[fn(x, y) for x in range(1, width + 1)] for y in range(1, height + 1)])

    @classmethod
    def uniform(cls, width: int, height: int, color: Color) -> "DensePattern":
        return cls(np.zeros((height, width), dtype=np.int32), [color])

    @property
    def palette(self) -> Sequence[Color]:
        return self._palette

    def row_codes(self, y: int) -> np.ndarray:
        return self.codes[y - 1]

    def cell(self, x: int, y: int) -> Color:
        self._check(x, y)
        return self._palette[int(self.codes[y - 1, x - 1])]

    def recolored(self, x: int, y: int, color: Color) -> "DensePattern":
        rows = [list(r) for r in self.rows()]
        rows[y - 1][x - 1] = color
        return DensePattern.from_rows(rows)


class ProceduralPattern(Pattern):
    """Pattern backed by a pure function of the position.

    ``row_fn(y)``, when given, returns the palette codes of a whole row and is
    used for streaming; otherwise rows are built from ``fn`` cell by cell.
    """

    def __init__(self, width: int, height: int, fn: Callable[[int, int], Color],
                 palette: Sequence[Color], row_fn: Callable[[int], np.ndarray] | None = None):
        if width < 1 or height < 1:
            raise ValueError("pattern dimensions must be positive")
        self.width, self.height = width, height
        self._fn = fn
        self._palette = tuple(palette)
        self._index = {c: i for i, c in enumerate(self._palette)}
        self._row_fn = row_fn

    @property
    def palette(self) -> Sequence[Color]:
        return self._palette

    def cell(self, x: int, y: int) -> Color:
        self._check(x, y)
        return self._fn(x, y)

    def row_codes(self, y: int) -> np.ndarray:
        if self._row_fn is not None:
            return self._row_fn(y)
        return np.array([self._index[self._fn(x, y)] for x in range(1, self.width + 1)], dtype=np.int32)


# ---------------------------------------------------------------- assignments


@dataclass(frozen=True)
class Assignment:
    """Tile assignment: ``grid[y-1, x-1]`` indexes ``tileset.tiles``."""

    tileset: TileSet
    grid: np.ndarray = field(repr=False)

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    def at(self, x: int, y: int) -> TileType:
        if not (1 <= x <= self.width and 1 <= y <= self.height):
            raise IndexError((x, y))
        return self.tileset.tiles[int(self.grid[y - 1, x - 1])]

    def matching_violations(self) -> list[tuple[tuple[int, int], str]]:
        """Every cell whose inputs differ from its neighbors' (or the seed's) outputs."""
        bad = []
        seed = self.tileset.seed
        for y in range(1, self.height + 1):
            for x in range(1, self.width + 1):
                t = self.at(x, y)
                west = seed.east[y - 1] if x == 1 else self.at(x - 1, y).e
                south = seed.north[x - 1] if y == 1 else self.at(x, y - 1).n
                if t.w != west:
                    bad.append(((x, y), "W"))
                if t.s != south:
                    bad.append(((x, y), "S"))
        return bad

    def used_tiles(self) -> list[TileType]:
        return [self.tileset.tiles[i] for i in np.unique(self.grid)]


# ---------------------------------------------------------------- operations


def is_directed(ts: TileSet) -> bool:
    seen: set[tuple[Glue, Glue]] = set()
    for t in ts.tiles:
        if t.inputs in seen:
            return False
        seen.add(t.inputs)
    return True


def _require_directed(ts: TileSet) -> None:
    seen: dict[tuple[Glue, Glue], TileType] = {}
    for t in ts.tiles:
        if t.inputs in seen:
            raise NotDirected(seen[t.inputs], t)
        seen[t.inputs] = t


def _check_dims(ts: TileSet, width: int, height: int) -> None:
    if ts.width != width or ts.height != height:
        raise ValueError(f"seed is {ts.width}x{ts.height}, target is {width}x{height}")


def stream_assembly(ts: TileSet, width: int, height: int,
                    pattern: Pattern | None = None) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(y, tile_indices)`` row by row, bottom to top.

    Only the current row of north glues is kept, so memory is O(width). When
    ``pattern`` is given every placed tile's color is checked against it.
    The yielded array is reused between rows; copy it to keep it.
    """
    _require_directed(ts)
    _check_dims(ts, width, height)
    if pattern is not None and pattern.dims != (width, height):
        raise ValueError(f"pattern is {pattern.width}x{pattern.height}, target is {width}x{height}")
    compiled = _engine.CompiledTileSet(ts, pattern.palette if pattern is not None else None)
    try:
        for y, row in compiled.rows(width, height, pattern):
            yield y, row
    except _engine.RowFailure as f:
        _raise_failure(ts, f, pattern)


def _raise_failure(ts: TileSet, failure: _engine.RowFailure, pattern: Pattern | None):
    pos = failure.position
    if failure.kind == "nofit":
        raise NoTileFits(pos, failure.s_glue, failure.w_glue)
    assert pattern is not None
    raise ColorMismatch(pos, pattern.cell(*pos), ts.tiles[failure.tile].color)


def assemble(ts: TileSet, width: int, height: int) -> Assignment:
    grid = np.empty((height, width), dtype=np.int32)
    for y, row in stream_assembly(ts, width, height):
        grid[y - 1] = row
    return Assignment(ts, grid)


def verify_stream(ts: TileSet, p: Pattern) -> bool:
    """True when ``ts`` assembles exactly ``p``; raises the first failure otherwise."""
    for _ in stream_assembly(ts, p.width, p.height, p):
        pass
    return True


def pattern_of(a: Assignment) -> DensePattern:
    tiles = a.tileset.tiles
    palette: dict[Color, int] = {}
    tile_code = np.array([palette.setdefault(t.color, len(palette)) for t in tiles], dtype=np.int32)
    return DensePattern(tile_code[a.grid], list(palette))


@dataclass(frozen=True)
class Census:
    counts: dict[Color, int]

    @property
    def unique_colors(self) -> frozenset[Color]:
        return frozenset(c for c, n in self.counts.items() if n == 1)

    @property
    def colors(self) -> frozenset[Color]:
        return frozenset(self.counts)

    def __len__(self) -> int:
        return len(self.counts)


def color_census(p: Pattern) -> Census:
    pal = p.palette
    totals = np.zeros(len(pal), dtype=np.int64)
    for y in range(1, p.height + 1):
        totals += np.bincount(np.asarray(p.row_codes(y), dtype=np.int64), minlength=len(pal))
    return Census({pal[i]: int(n) for i, n in enumerate(totals) if n})


# ---------------------------------------------------------------- isomorphism


def _glue_profiles(ts: TileSet, include_seeds: bool) -> tuple[dict, dict]:
    h: dict[Glue, Counter] = defaultdict(Counter)
    v: dict[Glue, Counter] = defaultdict(Counter)
    for t in ts.tiles:
        h[t.n][(t.color, "N")] += 1
        h[t.s][(t.color, "S")] += 1
        v[t.e][(t.color, "E")] += 1
        v[t.w][(t.color, "W")] += 1
    if include_seeds:
        for i, g in enumerate(ts.seed.north):
            h[g][("#seed", i)] += 1
        for i, g in enumerate(ts.seed.east):
            v[g][("#seed", i)] += 1
    freeze = lambda d: {g: frozenset(c.items()) for g, c in d.items()}
    return freeze(h), freeze(v)


def glue_isomorphic(a: TileSet, b: TileSet, include_seeds: bool = False) -> bool:
    """Whether one bijection on horizontal glues and one on vertical glues map ``a`` onto ``b``.

    Tiles of ``a`` are matched in an order where each tile shares a glue with
    an earlier one whenever possible, so candidates come from an index on
    already-bound glues; unbound glues may only map to glues with the same
    occurrence profile.
    """
    if len(a.tiles) != len(b.tiles):
        return False
    if Counter(t.color for t in a.tiles) != Counter(t.color for t in b.tiles):
        return False
    if include_seeds and (a.width, a.height) != (b.width, b.height):
        return False
    ha, va = _glue_profiles(a, include_seeds)
    hb, vb = _glue_profiles(b, include_seeds)
    if Counter(ha.values()) != Counter(hb.values()) or Counter(va.values()) != Counter(vb.values()):
        return False

    def signature(t: TileType, h: dict, v: dict) -> tuple:
        return (t.color, h[t.n], v[t.e], h[t.s], v[t.w])

    groups: dict[tuple, set[int]] = defaultdict(set)
    index: dict[tuple, set[int]] = defaultdict(set)
    for j, t in enumerate(b.tiles):
        groups[signature(t, hb, vb)].add(j)
        for side, g in zip("NESW", (t.n, t.e, t.s, t.w)):
            index[(side, g)].add(j)
    sig_a = [signature(t, ha, va) for t in a.tiles]
    if Counter(sig_a) != Counter({k: len(v) for k, v in groups.items()}):
        return False

    fwd = {"h": {}, "v": {}}
    inv = {"h": {}, "v": {}}
    trail: list[tuple[str, Glue]] = []

    def bind(ns: str, x: Glue, y: Glue) -> bool:
        f, i = fwd[ns], inv[ns]
        if x in f:
            return f[x] == y
        if y in i:
            return False
        f[x], i[y] = y, x
        trail.append((ns, x))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            ns, x = trail.pop()
            del inv[ns][fwd[ns].pop(x)]

    if include_seeds:
        for x, y in zip(a.seed.north, b.seed.north):
            if ha[x] != hb[y] or not bind("h", x, y):
                return False
        for x, y in zip(a.seed.east, b.seed.east):
            if va[x] != vb[y] or not bind("v", x, y):
                return False

    order = _connected_order(a, sig_a, groups)
    used: set[int] = set()

    def candidates(i: int) -> list[int]:
        s = a.tiles[i]
        pool = groups[sig_a[i]]
        for side, ns, g in (("N", "h", s.n), ("E", "v", s.e), ("S", "h", s.s), ("W", "v", s.w)):
            if g in fwd[ns]:
                hit = index.get((side, fwd[ns][g]), set())
                pool = pool & hit if len(hit) < len(pool) else {j for j in pool if j in hit}
        return sorted(pool - used)

    def bind_tile(s: TileType, t: TileType) -> bool:
        return (bind("h", s.n, t.n) and bind("h", s.s, t.s)
                and bind("v", s.e, t.e) and bind("v", s.w, t.w))

    # explicit stack of [candidates, next position, trail mark, chosen]
    stack: list[list] = []
    depth = 0
    fresh = True
    while depth < len(order):
        if fresh:
            stack.append([candidates(order[depth]), 0, len(trail), None])
        frame = stack[-1]
        undo(frame[2])
        if frame[3] is not None:
            used.discard(frame[3])
            frame[3] = None
        s = a.tiles[order[depth]]
        while frame[1] < len(frame[0]):
            j = frame[0][frame[1]]
            frame[1] += 1
            if bind_tile(s, b.tiles[j]):
                frame[3] = j
                used.add(j)
                break
            undo(frame[2])
        if frame[3] is not None:
            depth += 1
            fresh = True
        else:
            stack.pop()
            depth -= 1
            fresh = False
            if depth < 0:
                return False
    return True


def _connected_order(ts: TileSet, sigs: list, groups: dict) -> list[int]:
    """Tile indices so that each tile shares a glue with an earlier one when possible."""
    by_glue: dict[tuple, list[int]] = defaultdict(list)
    for i, t in enumerate(ts.tiles):
        for key in (("h", t.n), ("h", t.s), ("v", t.e), ("v", t.w)):
            by_glue[key].append(i)
    roots = sorted(range(len(ts.tiles)), key=lambda i: len(groups[sigs[i]]))
    seen: set[int] = set()
    order: list[int] = []
    for r in roots:
        if r in seen:
            continue
        seen.add(r)
        queue = [r]
        while queue:
            i = queue.pop(0)
            order.append(i)
            t = ts.tiles[i]
            for key in (("h", t.n), ("h", t.s), ("v", t.e), ("v", t.w)):
                for j in by_glue[key]:
                    if j not in seen:
                        seen.add(j)
                        queue.append(j)
    return order
