"""PATS pattern -> black/white/gray pattern Q built from supertiles.

Every cell of the source pattern P becomes an ell x ell block (ell = 5k+8)
that "portrays" its color index through two gray counters. Blocks in P's
bottom row lose their bottom row and blocks in P's left column lose their
left column; three gadget rows on top and three gadget columns on the right
pin down the counter tiles.

Local coordinates ``(i, j)`` inside a block always refer to the untrimmed
ell x ell supertile with (1, 1) at the bottom left.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np

from tilepats.core import (
    Color,
    DensePattern,
    Glue,
    Pattern,
    TileError,
    TileSet,
    TileType,
    Seed,
    assemble,
    color_census,
    stream_assembly,
    verify_stream,
)
from tilepats.sat import Cnf3

BLACK, WHITE, GRAY = "black", "white", "gray"
Q_PALETTE = (BLACK, WHITE, GRAY)
_B, _W, _G = 0, 1, 2

DOT, DIA = "dot", "dia"
OR = "or"

WHITE_ROLES = ("A", "B1", "B2", "C1", "C2", "D1", "D2")


class PreconditionError(TileError):
    pass


class StructureError(TileError):
    pass


class MalformedSupertile(TileError):
    pass


def counter(i: int) -> Glue:
    return f"#{i}"


def pair(glue: Glue, c: int) -> Glue:
    return f"pair({glue},{c})"


def ell_for(k: int) -> int:
    return 5 * k + 8


# ---------------------------------------------------------------- geometry


@numba.njit(cache=True)
def _local_code(i, j, c, ell):
    if j == 1 or i == 1:
        return _W
    if i == ell:
        return _W if j == c + 2 else _G
    if j == ell:
        return _W if i == c + 2 else _G
    return _B


@numba.njit(cache=True)
def _q_code(X, Y, ell, wp, hp, k, cidx):
    gw = ell * wp
    gh = ell * hp
    if X >= gw and Y >= gh:
        return _G if (X == gw + 1 or Y == gh + 1) else _B
    if Y >= gh:
        if Y - gh != 1:
            return _G if (X + 1) % ell == 0 else _B
        return _W if X == k + 1 else _G
    if X >= gw:
        if X - gw != 1:
            return _G if (Y + 1) % ell == 0 else _B
        return _W if Y == k + 1 else _G
    x = X // ell
    y = Y // ell
    return _local_code(X - x * ell + 1, Y - y * ell + 1, cidx[y, x], ell)


@numba.njit(cache=True)
def _q_row(Y, width, ell, wp, hp, k, cidx, out):
    for X in range(1, width + 1):
        out[X - 1] = _q_code(X, Y, ell, wp, hp, k, cidx)


def block_of(X: int, ell: int) -> tuple[int, int]:
    """(block index, local coordinate) of a Q column or row inside the supertile area."""
    b = X // ell + 1
    return b, X - (b - 1) * ell + 1


def local_role(i: int, j: int, c: int, ell: int) -> str:
    if j == 1:
        return "A" if i == 1 else "C1" if i == ell else "B1"
    if i == 1:
        return "C2" if j == ell else "B2"
    if i == ell:
        if j == ell:
            return "G"
        return "Vctr" if j <= c + 1 else "D1" if j == c + 2 else "F1"
    if j == ell:
        return "Hctr" if i <= c + 1 else "D2" if i == c + 2 else "F2"
    return "E"


class QPattern(Pattern):
    """Procedural Q: a pure function of the position, rows generated in compiled code."""

    def __init__(self, ell: int, cidx: np.ndarray):
        self.cidx = np.ascontiguousarray(cidx, dtype=np.int32)
        self.hp, self.wp = self.cidx.shape
        self.ell = ell
        self.k = int(self.cidx.max())
        self.width = ell * self.wp + 2
        self.height = ell * self.hp + 2
        self._buf = np.empty(self.width, dtype=np.int32)

    @property
    def palette(self):
        return Q_PALETTE

    def code(self, x: int, y: int) -> int:
        return int(_q_code(x, y, self.ell, self.wp, self.hp, self.k, self.cidx))

    def cell(self, x: int, y: int) -> Color:
        self._check(x, y)
        return Q_PALETTE[self.code(x, y)]

    def row_codes(self, y: int) -> np.ndarray:
        if not 1 <= y <= self.height:
            raise IndexError(y)
        _q_row(y, self.width, self.ell, self.wp, self.hp, self.k, self.cidx, self._buf)
        return self._buf


# ---------------------------------------------------------------- instances


def color_index(p: Pattern) -> dict[Color, int]:
    """Colors numbered 1..k in first-appearance order, row-major from (1, 1)."""
    index: dict[Color, int] = {}
    for row in p.rows():
        for c in row:
            index.setdefault(c, len(index) + 1)
    return index


def _m_w(k: int, w: int, h: int) -> int:
    return 5 * k - 3 * (w + h) + 14


def validate_source(p: Pattern, formula: Cnf3 | None = None) -> None:
    """Raise PreconditionError unless ``p`` is a valid input for the blowup.

    With ``formula`` the pattern must also equal the pattern built from it.
    """
    census = color_census(p)
    unique = census.unique_colors
    w, h = p.dims
    border = set(p.row(1)) | set(p.row(h)) | {p.cell(1, y) for y in range(1, h + 1)} \
        | {p.cell(w, y) for y in range(1, h + 1)}
    shared = sorted(border - unique)
    if shared:
        raise PreconditionError(f"border colors not unique in the pattern: {shared[:5]}")
    if _m_w(len(census), w, h) <= 0:
        raise PreconditionError("white tile bound 5k-3(w+h)+14 is not positive")
    if formula is not None:
        from tilepats.satreduce import build_pattern

        if build_pattern(formula).pattern != p:
            raise PreconditionError("pattern differs from the one built from the formula")


@dataclass(frozen=True)
class MbpatsInstance:
    q: QPattern
    m_b: int
    m_w: int
    m_g: int
    ell: int
    source_dims: tuple[int, int]
    color_index: dict[Color, int] = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.color_index)

    @property
    def colors(self) -> list[Color]:
        """Source colors ordered by index (``colors[i-1]`` has index i)."""
        return sorted(self.color_index, key=self.color_index.__getitem__)

    @property
    def bounds(self) -> dict[Color, int]:
        return {BLACK: self.m_b, WHITE: self.m_w, GRAY: self.m_g}


def _instance(cidx: np.ndarray, index: dict[Color, int]) -> MbpatsInstance:
    k = len(index)
    h, w = cidx.shape
    ell = ell_for(k)
    return MbpatsInstance(QPattern(ell, cidx), 1, _m_w(k, w, h), 2 * k + 3, ell, (w, h), index)


def build_q(p: Pattern, formula: Cnf3 | None = None) -> MbpatsInstance:
    validate_source(p, formula)
    index = color_index(p)
    cidx = np.array([[index[c] for c in row] for row in p.rows()], dtype=np.int32)
    return _instance(cidx, index)


def bounds(p: Pattern) -> tuple[int, int, int, int]:
    validate_source(p)
    k = len(color_census(p))
    return 1, _m_w(k, p.width, p.height), 2 * k + 3, ell_for(k)


def supertile_pattern(c: int, k: int, has_bottom_row: bool = True, has_left_column: bool = True) -> DensePattern:
    if not 1 <= c <= k:
        raise ValueError(f"color index {c} outside 1..{k}")
    ell = ell_for(k)
    j0 = 1 if has_bottom_row else 2
    i0 = 1 if has_left_column else 2
    codes = [[_local_code(i, j, c, ell) for i in range(i0, ell + 1)] for j in range(j0, ell + 1)]
    return DensePattern(np.array(codes, dtype=np.int32), Q_PALETTE)


def q_role(inst: MbpatsInstance, X: int, Y: int) -> tuple[int, int, str]:
    """(block x, block y, role) of a Q cell; gadget cells get block (0, 0)."""
    q = inst.q
    ell = inst.ell
    if X >= ell * q.wp or Y >= ell * q.hp:
        return 0, 0, "gadget"
    x, i = block_of(X, ell)
    y, j = block_of(Y, ell)
    return x, y, local_role(i, j, int(q.cidx[y - 1, x - 1]), ell)


# ---------------------------------------------------------------- qdesc


def dump_qdesc(inst: MbpatsInstance) -> str:
    from tilepats.textio import escape

    w, h = inst.source_dims
    out = [f"qdesc {inst.ell} {w} {h}"]
    out += [f"color {i} {escape(c)}" for i, c in enumerate(inst.colors, start=1)]
    for y in range(h, 0, -1):
        out.append(" ".join(str(int(v)) for v in inst.q.cidx[y - 1]))
    return "\n".join(out) + "\n"


def parse_qdesc(text: str) -> MbpatsInstance:
    from tilepats.textio import FormatError, unescape

    lines = [(n, l.split()) for n, l in enumerate(text.splitlines(), start=1)
             if l.strip() and not l.lstrip().startswith("#")]
    if not lines or lines[0][1][0] != "qdesc" or len(lines[0][1]) != 4:
        raise FormatError("expected 'qdesc <ell> <wP> <hP>'", lines[0][0] if lines else 1)
    try:
        ell, w, h = map(int, lines[0][1][1:])
    except ValueError:
        raise FormatError("non-integer qdesc header", lines[0][0]) from None
    index: dict[Color, int] = {}
    rest = lines[1:]
    while rest and rest[0][1][0] == "color":
        n, parts = rest.pop(0)
        if len(parts) != 3 or not parts[1].isdigit() or int(parts[1]) != len(index) + 1:
            raise FormatError("expected 'color <i> <token>' in order", n)
        index[unescape(parts[2])] = int(parts[1])
    if len(rest) != h:
        raise FormatError(f"expected {h} index rows, found {len(rest)}", rest[-1][0] if rest else lines[0][0])
    rows = []
    for n, parts in rest:
        try:
            row = [int(v) for v in parts]
        except ValueError:
            raise FormatError("non-integer color index", n) from None
        if len(row) != w or min(row) < 1:
            raise FormatError(f"row needs {w} positive indices", n)
        rows.append(row)
    cidx = np.array(rows[::-1], dtype=np.int32)
    k = int(cidx.max())
    if not index:
        index = {str(i): i for i in range(1, k + 1)}
    if len(index) != k or ell != ell_for(k):
        raise FormatError(f"ell {ell} and {len(index)} colors do not match k={k}", lines[0][0])
    return _instance(cidx, index)


# ---------------------------------------------------------------- witness


def _gray_black_tiles(k: int) -> list[TileType]:
    tiles = [TileType(BLACK, DOT, DOT, DOT, DOT)]
    for i in range(1, k + 1):
        tiles.append(TileType(GRAY, counter(i - 1), DOT, counter(i), DOT))
    for i in range(1, k + 1):
        tiles.append(TileType(GRAY, DOT, counter(i - 1), DOT, counter(i)))
    tiles += [
        TileType(GRAY, DIA, DOT, DIA, DOT),  # F1
        TileType(GRAY, DOT, DIA, DOT, DIA),  # F2
        TileType(GRAY, DIA, DIA, DIA, DIA),  # G
        TileType(WHITE, DIA, DOT, counter(0), DOT),  # D1
        TileType(WHITE, DOT, DIA, DOT, counter(0)),  # D2
    ]
    return tiles


def _check_structure(ts: TileSet, p: Pattern) -> None:
    per_color = ts.by_color()
    for color in color_index(p):
        n = len(per_color.get(color, ()))
        want = 4 if color == OR else 1
        if n != want:
            raise StructureError(f"color {color!r} has {n} tile types, expected {want}")


def witness_theta(ts: TileSet, p: Pattern) -> TileSet:
    """The three-color tile set assembling Q, built from a tile set for P."""
    inst = build_q(p)
    _check_structure(ts, p)
    verify_stream(ts, p)
    a = assemble(ts, p.width, p.height)
    index = inst.color_index
    w, h = p.dims
    ell, k = inst.ell, inst.k

    def g(glue: Glue) -> Glue:
        return "t:" + glue

    tiles = _gray_black_tiles(k)
    for y in range(1, h + 1):
        for x in range(1, w + 1):
            t = a.at(x, y)
            c = index[t.color]
            n = DOT if y == h else g(t.n)
            e = DOT if x == w else g(t.e)
            if x > 1 and y > 1:
                tiles.append(TileType(WHITE, pair(n, c), pair(e, c), g(t.s), g(t.w)))
            if y > 1:
                tiles.append(TileType(WHITE, DOT, pair(e, c), DOT, pair(e, c)))
                tiles.append(TileType(WHITE, counter(c), e, DIA, pair(e, c)))
            if x > 1:
                tiles.append(TileType(WHITE, pair(n, c), DOT, pair(n, c), DOT))
                tiles.append(TileType(WHITE, n, counter(c), pair(n, c), DIA))

    def edge(first_index: Callable[[int], int], t_glue: Callable[[TileType], Glue], size: int) -> list[Glue]:
        out = []
        for b in range(1, ell * size):
            blk, i = block_of(b, ell)
            t = first_index(blk)
            c = index[t.color]
            out.append(pair(t_glue(t), c) if i == 1 else counter(c) if i == ell else DOT)
        return out + [DOT, counter(k), DOT]

    north = edge(lambda x: a.at(x, 1), lambda t: DOT if h == 1 else g(t.n), w)
    east = edge(lambda y: a.at(1, y), lambda t: DOT if w == 1 else g(t.e), h)
    return TileSet(tuple(tiles), Seed(tuple(north), tuple(east)))


def theta_census(theta: TileSet) -> dict[Color, int]:
    return {c: len(theta.with_color(c)) for c in Q_PALETTE}


# ---------------------------------------------------------------- decoding


@dataclass(frozen=True)
class SupertileView:
    """One block of Q (or a standalone supertile) read through local coordinates."""

    ell: int
    has_bottom_row: bool
    has_left_column: bool
    lookup: Callable[[int, int], Color] = field(repr=False)
    x: int = 0
    y: int = 0

    @classmethod
    def of_q(cls, inst: MbpatsInstance, x: int, y: int) -> "SupertileView":
        ell, q = inst.ell, inst.q
        return cls(ell, y > 1, x > 1, lambda i, j: q.cell((x - 1) * ell + i - 1, (y - 1) * ell + j - 1), x, y)

    @classmethod
    def of_pattern(cls, p: Pattern, has_bottom_row: bool = True, has_left_column: bool = True) -> "SupertileView":
        di, dj = int(not has_left_column), int(not has_bottom_row)
        if p.width + di != p.height + dj:
            raise MalformedSupertile(f"{p.width}x{p.height} is not a (trimmed) square supertile")
        return cls(p.width + di, has_bottom_row, has_left_column, lambda i, j: p.cell(i - di, j - dj))

    def cell(self, i: int, j: int) -> Color | None:
        if (j == 1 and not self.has_bottom_row) or (i == 1 and not self.has_left_column):
            return None
        return self.lookup(i, j)


def _counter_value(cells: list[Color]) -> int:
    whites = [n for n, c in enumerate(cells) if c == WHITE]
    if len(whites) != 1 or any(c not in (GRAY, WHITE) for c in cells):
        raise MalformedSupertile("counter run must be gray with exactly one white cell")
    return whites[0]


def portrayed_color(view: SupertileView) -> int:
    ell = view.ell
    top = _counter_value([view.cell(i, ell) for i in range(2, ell)])
    right = _counter_value([view.cell(ell, j) for j in range(2, ell)])
    if top != right:
        raise MalformedSupertile(f"top counter says {top}, right counter says {right}")
    if not 1 <= top <= (ell - 8) // 5:
        raise MalformedSupertile(f"counter value {top} out of range")
    return top


def _interfaces(theta: TileSet, inst: MbpatsInstance):
    """Stream Q once and collect the glues crossing block boundaries."""
    ell, q = inst.ell, inst.q
    w, h = inst.source_dims
    tn = [t.n for t in theta.tiles]
    te = [t.e for t in theta.tiles]
    hedge: dict[tuple[int, int], Glue] = {}
    vedge: dict[tuple[int, int], Glue] = {}
    a_in: dict[tuple[int, int], tuple[Glue, Glue]] = {}
    for Y, row in stream_assembly(theta, q.width, q.height, q):
        if Y >= ell * h:
            continue
        y, j = block_of(Y, ell)
        if j == ell and y < h:
            for x in range(2, w + 1):
                hedge[(x, y)] = tn[row[(x - 1) * ell - 1]]
        if j == 1:
            for x in range(1, w):
                vedge[(x, y)] = te[row[x * ell - 2]]
            for x in range(2, w + 1):
                a_in[(x, y)] = theta.tiles[row[(x - 1) * ell - 1]].inputs
    return hedge, vedge, a_in


def decode_supertiles(theta: TileSet, inst: MbpatsInstance) -> TileSet:
    """Tile set for the source pattern read off a tile set that assembles Q.

    Each block yields one tile: its color is the portrayed color, its inputs
    are the glues entering the block's A position and its outputs leave at
    C2 (north) and C1 (east). Sides that do not exist in trimmed blocks, and
    outputs leaving P, get fresh glues ``h@x_y`` / ``v@x_y``.
    """
    hedge, vedge, a_in = _interfaces(theta, inst)
    w, h = inst.source_dims
    colors = inst.colors
    tiles = []
    for y in range(1, h + 1):
        for x in range(1, w + 1):
            c = portrayed_color(SupertileView.of_q(inst, x, y))
            s = hedge.get((x, y - 1), f"h@{x}_{y - 1}")
            wv = vedge.get((x - 1, y), f"v@{x - 1}_{y}")
            if (x, y) in a_in and a_in[(x, y)] != (s, wv):
                raise StructureError(f"block {(x, y)} inputs {a_in[(x, y)]} disagree with its neighbors")
            tiles.append(TileType(colors[c - 1], hedge.get((x, y), f"h@{x}_{y}"),
                                  vedge.get((x, y), f"v@{x}_{y}"), s, wv))
    seed = Seed(tuple(f"h@{x}_0" for x in range(1, w + 1)), tuple(f"v@0_{y}" for y in range(1, h + 1)))
    return TileSet(tuple(tiles), seed)


# ---------------------------------------------------------------- structure scans


def role_usage(theta: TileSet, inst: MbpatsInstance) -> dict[tuple[int, int], dict[str, set[int]]]:
    """For each block, the tile indices used at each role.

    Materializes the assignment of Q, so it is meant for toy instances.
    """
    a = assemble(theta, inst.q.width, inst.q.height)
    ell = inst.ell
    w, h = inst.source_dims
    out: dict[tuple[int, int], dict[str, set[int]]] = {}
    for Y in range(1, ell * h):
        y, j = block_of(Y, ell)
        for X in range(1, ell * w):
            x, i = block_of(X, ell)
            role = local_role(i, j, int(inst.q.cidx[y - 1, x - 1]), ell)
            out.setdefault((x, y), {}).setdefault(role, set()).add(int(a.grid[Y - 1, X - 1]))
    return out


def check_determinism(theta: TileSet, inst: MbpatsInstance) -> int:
    """Re-assemble every complete block in isolation from its A inputs.

    The glues entering a block anywhere but at A must be the same for all
    blocks; given them, the block's tiles have to match the ones in Q.
    Returns the number of blocks checked.
    """
    a = assemble(theta, inst.q.width, inst.q.height)
    ell = inst.ell
    w, h = inst.source_dims
    tiles = theta.tiles
    checked = 0
    reference: tuple | None = None
    for y in range(2, h + 1):
        for x in range(2, w + 1):
            X0, Y0 = (x - 1) * ell - 1, (y - 1) * ell - 1  # zero-based grid origin of (1, 1)
            below = [tiles[a.grid[Y0 - 1, X0 + d]].n for d in range(ell)]
            left = [tiles[a.grid[Y0 + d, X0 - 1]].e for d in range(ell)]
            rest = (tuple(below[1:]), tuple(left[1:]))
            if reference is None:
                reference = rest
            elif rest != reference:
                raise StructureError(f"block {(x, y)} receives non-A inputs different from other blocks")
            sub = TileSet(tiles, Seed(tuple([below[0], *reference[0]]), tuple([left[0], *reference[1]])))
            iso = assemble(sub, ell, ell)
            if not np.array_equal(iso.grid, a.grid[Y0:Y0 + ell, X0:X0 + ell]):
                raise StructureError(f"block {(x, y)} is not determined by its A inputs")
            checked += 1
    return checked


def toy_source(width: int, height: int, rng, distinct: bool = False) -> tuple[TileSet, DensePattern]:
    """Random directed tile set and the pattern it assembles, valid for the blowup.

    Border cells get their own colors and pass coordinate glues to border
    neighbors; interior glues come from {0, 1} (or coordinates when
    ``distinct``), and interior tiles are created on first use.
    """
    def border(x: int, y: int) -> bool:
        return x in (1, width) or y in (1, height)

    def out(kind: str, x: int, y: int, to_border: bool) -> Glue:
        if to_border or distinct:
            return f"{kind}@{x}_{y}"
        return str(int(rng.integers(2)))

    by_input: dict[tuple[Glue, Glue], TileType] = {}
    north = [f"h@{x}_0" for x in range(1, width + 1)]
    rows = []
    for y in range(1, height + 1):
        west = f"v@0_{y}"
        row = []
        for x in range(1, width + 1):
            t = by_input.get((north[x - 1], west))
            if t is None:
                n = out("h", x, y, y == height or border(x, y + 1))
                e = out("v", x, y, x == width or border(x + 1, y))
                t = TileType(f"c{len(by_input) + 1}", n, e, north[x - 1], west)
                by_input[t.inputs] = t
            row.append(t.color)
            north[x - 1], west = t.n, t.e
        rows.append(row)
    seed = Seed(tuple(f"h@{x}_0" for x in range(1, width + 1)), tuple(f"v@0_{y}" for y in range(1, height + 1)))
    return TileSet(tuple(by_input.values()), seed), DensePattern.from_rows(rows)
