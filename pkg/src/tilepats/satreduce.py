"""3-CNF formula -> PATS pattern whose tile budget is its color count plus three.

The pattern is a 6-row strip of small gadgets separated by columns of
unique colors. Satisfying assignments become tile sets via
:func:`witness_tileset`, and any conforming tile set yields an assignment via
:func:`extract_assignment`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from tilepats.core import (
    Assignment,
    Color,
    DensePattern,
    Glue,
    Seed,
    TileError,
    TileSet,
    TileType,
)
from tilepats.sat import Cnf3, Literal, evaluate

HEIGHT = 6
SUB_BOTTOM = 2  # pattern row of every gadget's bottom row

OR = "or"
DOT, DIA, STAR, TRI = "dot", "dia", "star", "tri"

# or-gate tiles keyed by (south, west) input
OR_TILES = {
    ("0", "0"): TileType(OR, "A", "0", "0", "0"),
    ("1", "0"): TileType(OR, "B", "1", "1", "0"),
    ("0", "1"): TileType(OR, "C", "1", "0", "1"),
    ("1", "1"): TileType(OR, "D", "1", "1", "1"),
}

_ = None  # blank edge on the outside of a gadget

# (N, E, S, W) of every fixed-color tile that does not depend on the formula
FIXED_TILES: dict[Color, tuple] = {
    "X1": ("0", "0", _, _), "X2": ("0", "0", _, "0"),
    "X3": ("0", "1", _, "1"), "X4": ("0", "1", _, "1"),
    "X5": ("1", "0", _, "1"), "X6": ("1", "0", _, "0"),
    "X7": ("1", "1", _, "1"), "X8": ("1", "1", _, "1"),
    "Y1": (_, "0", "A", "0"), "Y2": (_, "0", "B", "0"),
    "Y3": (_, "0", "C", "0"), "Y4": (_, "0", "D", "0"),
    "Y5": (_, "0", "A", "1"), "Y6": (_, "0", "B", "1"),
    "Y7": (_, "0", "C", "1"), "Y8": (_, _, "D", "1"),
    "->0_dark": (DOT, "0", DOT, "0"), "->0_white": (DIA, "0", DIA, "0"),
    "->1_dark": (DOT, "1", DOT, "1"), "->1_white": (DIA, "1", DIA, "1"),
    "^0_dark": ("0", DOT, "0", DOT), "^0_white": ("0", DIA, "0", DIA),
    "^1_dark": ("1", DOT, "1", DOT), "^1_white": ("1", DIA, "1", DIA),
    "a": (DIA, DIA, DIA, DIA),
    "b_dark": (STAR, _, _, DOT), "b_gray": (STAR, _, STAR, DIA),
    "c_dark": (_, STAR, DOT, _), "c_gray": (_, STAR, DIA, STAR),
    "d": (_, _, STAR, STAR),
    "+": (STAR, _, STAR, "1"), "-": (STAR, _, STAR, "0"),
    "A": (_, STAR, "A", STAR), "B": (_, STAR, "B", STAR),
    "C": (_, STAR, "C", STAR), "D": (_, STAR, "D", STAR),
    "Z1": (DOT, DOT, _, _), "Z2": (DIA, DOT, _, DOT),
    "Z3": (DOT, DIA, DOT, _), "Z4": (TRI, DIA, _, _),
}

# (w, s, sign, letter) for q1..q4
_Q_PARAMS = [("0", "0", "-", "A"), ("0", "1", "+", "B"), ("1", "0", "+", "C"), ("1", "1", "+", "D")]


class UnsatisfyingAssignment(TileError):
    pass


class AmbiguousColor(TileError):
    def __init__(self, color: Color, count: int):
        self.color, self.count = color, count
        super().__init__(f"color {color!r} has {count} tile types, expected exactly 1")


def var_glue(v: str, negated: bool = False) -> Glue:
    return f"var:{'~' if negated else ''}{v}"


def var_colors(v: str) -> dict[str, Color]:
    return {
        "v_white": f"{v}.white",
        "negv_white": f"~{v}.white",
        "v_gray": f"{v}.gray",
        "v_dark": f"{v}.dark",
        "vtilde_dark": f"{v}~.dark",
    }


def literal_color(lit: Literal) -> Color:
    return f"{'~' if lit.negated else ''}{lit.var}.white"


def unique_color(x: int, y: int) -> Color:
    return f"u@{x}_{y}"


def h_glue(x: int, y: int) -> Glue:
    """Glue of the horizontal edge above cell (x, y)."""
    return f"h@{x}_{y}"


def v_glue(x: int, y: int) -> Glue:
    """Glue of the vertical edge right of cell (x, y)."""
    return f"v@{x}_{y}"


# ---------------------------------------------------------------- gadgets


def gen_subpattern(kind: str, index: int | None = None, arg=None) -> DensePattern:
    """Color grid of one gadget.

    ``gen_subpattern("p")``, ``gen_subpattern("q", i)`` for i in 1..5,
    ``gen_subpattern("r", j, v)`` for j in 1..3 and a variable name, and
    ``gen_subpattern("s", clause=...)`` / ``gen_subpattern("s", None, clause)``.
    """
    return DensePattern.from_rows(_subpattern_rows(kind, index, arg))


def _subpattern_rows(kind: str, index=None, arg=None) -> list[list[Color]]:
    if kind == "p":
        if index is not None:
            raise ValueError("subpattern p takes no index")
        bottom, top = [], []
        for i in range(1, 9):
            bottom += [f"X{i}", OR]
            top += [OR, f"Y{i}"]
        return [bottom, top]
    if kind == "q":
        if index not in (1, 2, 3, 4, 5):
            raise ValueError(f"q index must be 1..5, got {index!r}")
        if index == 5:
            return [
                ["a", "^0_white", "^1_white", "^0_white", "^1_white", "b_gray"],
                ["->0_white", OR, OR, OR, OR, "+"],
                ["c_gray", "A", "B", "C", "D", "d"],
            ]
        w, s, sign, letter = _Q_PARAMS[index - 1]
        return [
            ["Z1", "Z2", f"^{s}_dark", "b_dark"],
            ["Z3", "a", f"^{s}_white", "b_gray"],
            [f"->{w}_dark", f"->{w}_white", OR, sign],
            ["c_dark", "c_gray", letter, "d"],
        ]
    if kind == "r":
        if index not in (1, 2, 3) or not isinstance(arg, str) or not arg:
            raise ValueError("r needs index 1..3 and a variable name")
        c = var_colors(arg)
        if index == 1:
            return [["Z4", c["v_white"]], [c["v_gray"], c["v_dark"]]]
        if index == 2:
            return [["Z4", c["negv_white"]], [c["v_gray"], c["vtilde_dark"]]]
        return [["a", c["v_white"], c["negv_white"], "b_gray"], ["->0_white", OR, OR, "+"]]
    if kind == "s":
        clause = arg if arg is not None else index
        if clause is None or len(clause) != 3:
            raise ValueError("s needs a three-literal clause")
        lits = [literal_color(Literal(*l)) for l in clause]
        return [["a", *lits, "b_gray"], ["->0_white", OR, OR, OR, "+"]]
    raise ValueError(f"unknown subpattern kind {kind!r}")


# inputs that or-cells receive from neighboring unique cells, keyed by
# (gadget, local x, local y, side)
_OR_BORDER_INPUTS = {
    **{("p", 2 * i, 1, "S"): str((i - 1) % 2) for i in range(1, 9)},
    ("p", 1, 2, "W"): "0",
}


@dataclass(frozen=True)
class Placement:
    label: str
    kind: str
    x0: int
    y0: int
    width: int
    height: int
    rows: tuple[tuple[Color, ...], ...] = field(repr=False)

    def contains(self, x: int, y: int) -> bool:
        return self.x0 <= x < self.x0 + self.width and self.y0 <= y < self.y0 + self.height


def _layout(f: Cnf3) -> tuple[int, list[Placement]]:
    gadgets: list[tuple[str, str, list[list[Color]]]] = [("p", "p", _subpattern_rows("p"))]
    gadgets += [(f"q{i}", "q", _subpattern_rows("q", i)) for i in range(1, 6)]
    for v in f.variables:
        gadgets += [(f"r{j}({v})", "r", _subpattern_rows("r", j, v)) for j in (1, 2, 3)]
    gadgets += [(f"s{i}", "s", _subpattern_rows("s", None, c)) for i, c in enumerate(f.clauses, start=1)]
    x = 1
    placed = []
    for label, kind, rows in gadgets:
        x += 1  # separating unique column
        placed.append(Placement(label, kind, x, SUB_BOTTOM, len(rows[0]), len(rows), tuple(map(tuple, rows))))
        x += len(rows[0])
    return x, placed  # x is the trailing unique column


# ---------------------------------------------------------------- pattern


@dataclass(frozen=True)
class PatsInstance:
    pattern: DensePattern
    m: int
    formula: Cnf3
    color_atlas: dict[str, Color]
    placements: tuple[Placement, ...] = field(repr=False, default=())

    def atlas_text(self) -> str:
        return "".join(f"{role} -> {tok}\n" for role, tok in self.color_atlas.items())


def expected_width(num_vars: int, num_clauses: int) -> int:
    return 45 + 11 * num_vars + 6 * num_clauses


def build_pattern(f: Cnf3) -> PatsInstance:
    width, placed = _layout(f)
    grid: list[list[Color | None]] = [[None] * width for _ in range(HEIGHT)]
    for pl in placed:
        for ly, row in enumerate(pl.rows):
            for lx, color in enumerate(row):
                grid[pl.y0 + ly - 1][pl.x0 + lx - 1] = color
    atlas: dict[str, Color] = {}
    for row in grid:
        for c in row:
            if c is not None and not c.endswith((".white", ".gray", ".dark")):
                atlas.setdefault(c, c)
    for v in f.variables:
        for role, tok in var_colors(v).items():
            atlas[f"{role}({v})"] = tok
    for y in range(1, HEIGHT + 1):
        for x in range(1, width + 1):
            if grid[y - 1][x - 1] is None:
                grid[y - 1][x - 1] = unique_color(x, y)
                atlas[f"unique@({x},{y})"] = unique_color(x, y)
    pattern = DensePattern.from_rows(grid)
    m = len(pattern.palette) + 3
    return PatsInstance(pattern, m, f, atlas, tuple(placed))


# ---------------------------------------------------------------- witness


def _formula_tiles(f: Cnf3, values: Mapping[str, int]) -> dict[Color, tuple]:
    tiles = dict(FIXED_TILES)
    for v in f.variables:
        c = var_colors(v)
        plus, minus = str(values[v]), str(1 - values[v])
        tiles[c["v_white"]] = (plus, DIA, var_glue(v), DIA)
        tiles[c["negv_white"]] = (minus, DIA, var_glue(v, True), DIA)
        tiles[c["v_gray"]] = (_, var_glue(v), TRI, _)
        tiles[c["v_dark"]] = (_, _, plus, var_glue(v))
        tiles[c["vtilde_dark"]] = (_, _, minus, var_glue(v))
    return tiles


def _cell_map(inst: PatsInstance) -> dict[tuple[int, int], tuple[Placement, int, int]]:
    cells = {}
    for pl in inst.placements:
        for ly in range(pl.height):
            for lx in range(pl.width):
                cells[(pl.x0 + lx, pl.y0 + ly)] = (pl, lx + 1, ly + 1)
    return cells


def witness_assignment(f: Cnf3, values: Mapping[str, int], inst: PatsInstance | None = None) -> Assignment:
    """Tile assignment of the pattern built from a satisfying assignment."""
    if not evaluate(f, values):
        raise UnsatisfyingAssignment(f"assignment {dict(values)} does not satisfy {f}")
    inst = inst if inst is not None else build_pattern(f)
    p = inst.pattern
    width = p.width
    templates = _formula_tiles(f, values)
    cells = _cell_map(inst)

    # blank gadget edges are named after the first occurrence of their color
    first_seen: dict[Color, tuple[int, int]] = {}
    for y in range(1, HEIGHT + 1):
        for x in range(1, width + 1):
            if (x, y) in cells:
                first_seen.setdefault(p.cell(x, y), (x, y))

    def resolved(color: Color) -> TileType:
        n, e, s, w = templates[color]
        x, y = first_seen[color]
        return TileType(color, n if n is not None else h_glue(x, y), e if e is not None else v_glue(x, y),
                        s if s is not None else h_glue(x, y - 1), w if w is not None else v_glue(x - 1, y))

    fixed = {c: resolved(c) for c in first_seen if c != OR}

    def required_input(x: int, y: int, side: str) -> Glue | None:
        """Input the gadget cell at (x, y) needs on ``side``, None for unique cells."""
        if (x, y) not in cells:
            return None
        color = p.cell(x, y)
        if color == OR:
            pl, lx, ly = cells[(x, y)]
            return _OR_BORDER_INPUTS[(pl.kind, lx, ly, side)]
        t = fixed[color]
        return t.s if side == "S" else t.w

    tiles: list[TileType] = []
    index: dict[TileType, int] = {}
    grid = [[0] * width for _ in range(HEIGHT)]
    north = [h_glue(x, 0) for x in range(1, width + 1)]
    east_seed = [v_glue(0, y) for y in range(1, HEIGHT + 1)]
    for y in range(1, HEIGHT + 1):
        west = east_seed[y - 1]
        for x in range(1, width + 1):
            south = north[x - 1]
            color = p.cell(x, y)
            if (x, y) not in cells:
                n = required_input(x, y + 1, "S") if y < HEIGHT else None
                e = required_input(x + 1, y, "W") if x < width else None
                t = TileType(color, n or h_glue(x, y), e or v_glue(x, y), south, west)
            elif color == OR:
                t = OR_TILES[(south, west)]
            else:
                t = fixed[color]
                if t.inputs != (south, west):
                    raise AssertionError(f"gadget tile {color} at {(x, y)} expects {t.inputs}, gets {(south, west)}")
            grid[y - 1][x - 1] = index.setdefault(t, len(index))
            if len(tiles) < len(index):
                tiles.append(t)
            north[x - 1] = t.n
            west = t.e
    seed = Seed(tuple(h_glue(x, 0) for x in range(1, width + 1)), tuple(east_seed))
    return Assignment(TileSet(tuple(tiles), seed), np.array(grid, dtype=np.int32))


def witness_tileset(f: Cnf3, values: Mapping[str, int], inst: PatsInstance | None = None) -> TileSet:
    return witness_assignment(f, values, inst).tileset


# ---------------------------------------------------------------- decoding


def _single(ts: TileSet, color: Color) -> TileType:
    found = ts.with_color(color)
    if len(found) != 1:
        raise AmbiguousColor(color, len(found))
    return found[0]


def extract_assignment(ts: TileSet, inst: PatsInstance) -> dict[str, int]:
    """Read the variable assignment off a tile set that assembles the pattern.

    The north glue of the up-arrow-1 tile plays the role of "true"; a variable
    is true exactly when its positive literal tile carries that glue.
    """
    one = _single(ts, "^1_white").n
    out = {}
    for v in inst.formula.variables:
        c = var_colors(v)
        _single(ts, c["negv_white"])
        out[v] = int(_single(ts, c["v_white"]).n == one)
    return out


def or_gate_identification(ts: TileSet) -> tuple[dict[Glue, int], dict[Glue, int]]:
    """Horizontal and vertical glue -> bit maps fixed by the arrow tiles."""
    horizontal = {_single(ts, "^0_white").n: 0, _single(ts, "^1_white").n: 1}
    vertical = {_single(ts, "->0_white").e: 0, _single(ts, "->1_white").e: 1}
    return horizontal, vertical


def or_gate_violations(a: Assignment) -> list[tuple[int, int]]:
    """Positions of or-colored cells whose east output is not west OR south."""
    hbit, vbit = or_gate_identification(a.tileset)
    bad = []
    for y in range(1, a.height + 1):
        for x in range(1, a.width + 1):
            t = a.at(x, y)
            if t.color != OR:
                continue
            try:
                ok = vbit[t.e] == (vbit[t.w] | hbit[t.s])
            except KeyError:
                ok = False
            if not ok:
                bad.append((x, y))
    return bad


def census_formula(num_vars: int, num_clauses: int) -> int:
    """Closed-form color count of the built pattern."""
    return 197 + 55 * num_vars + 26 * num_clauses
