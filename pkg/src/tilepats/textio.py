"""Plain-text pattern and tile set files.

Pattern::

    pattern <width> <height>
    <top row tokens>
    ...
    <bottom row tokens>

Tile set::

    tileset
    tile <color> N=<glue> E=<glue> S=<glue> W=<glue>
    ...
    seed north <g1> ... <gw>
    seed east <g1> ... <gh>        (bottom to top)

Tokens escape ``%``, ``=`` and ASCII whitespace as ``%xx``.
"""
from __future__ import annotations

import re

from tilepats.core import DensePattern, Pattern, Seed, TileSet, TileType


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


_ESCAPE = re.compile(r"[%=\s]")
_UNESCAPE = re.compile(r"%([0-9A-Fa-f]{2})")


def escape(token: str) -> str:
    if not token:
        raise ValueError("empty token")
    return _ESCAPE.sub(lambda m: "%{:02X}".format(ord(m.group())), token)


def unescape(token: str) -> str:
    return _UNESCAPE.sub(lambda m: chr(int(m.group(1), 16)), token)


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield i, line.split()


def dump_pattern(p: Pattern) -> str:
    out = [f"pattern {p.width} {p.height}"]
    for y in range(p.height, 0, -1):
        out.append(" ".join(escape(c) for c in p.row(y)))
    return "\n".join(out) + "\n"


def parse_pattern(text: str) -> DensePattern:
    lines = list(_lines(text))
    if not lines or lines[0][1][0] != "pattern" or len(lines[0][1]) != 3:
        raise FormatError("expected header 'pattern <width> <height>'", lines[0][0] if lines else 1)
    lineno, head = lines[0]
    try:
        width, height = int(head[1]), int(head[2])
    except ValueError:
        raise FormatError("non-integer dimensions", lineno) from None
    if width < 1 or height < 1:
        raise FormatError("dimensions must be positive", lineno)
    body = lines[1:]
    if len(body) != height:
        raise FormatError(f"expected {height} rows, found {len(body)}", lineno)
    rows = []
    for i, toks in body:
        if len(toks) != width:
            raise FormatError(f"expected {width} tokens, found {len(toks)}", i)
        rows.append([unescape(t) for t in toks])
    return DensePattern.from_top_rows(rows)


def dump_tileset(ts: TileSet) -> str:
    out = ["tileset"]
    for t in ts.tiles:
        out.append(f"tile {escape(t.color)} N={escape(t.n)} E={escape(t.e)} S={escape(t.s)} W={escape(t.w)}")
    out.append(" ".join(["seed", "north", *map(escape, ts.seed.north)]))
    out.append(" ".join(["seed", "east", *map(escape, ts.seed.east)]))
    return "\n".join(out) + "\n"


def parse_tileset(text: str) -> TileSet:
    lines = list(_lines(text))
    if not lines or lines[0][1] != ["tileset"]:
        raise FormatError("expected header 'tileset'", lines[0][0] if lines else 1)
    tiles, north, east = [], None, None
    for i, toks in lines[1:]:
        if toks[0] == "tile":
            if len(toks) != 6:
                raise FormatError("tile line needs a color and four glues", i)
            glues = {}
            for tok in toks[2:]:
                side, eq, g = tok.partition("=")
                if not eq or side not in "NESW" or len(side) != 1 or side in glues:
                    raise FormatError(f"bad glue field {tok!r}", i)
                glues[side] = unescape(g)
            tiles.append(TileType(unescape(toks[1]), glues["N"], glues["E"], glues["S"], glues["W"]))
        elif toks[0] == "seed" and len(toks) >= 2 and toks[1] in ("north", "east"):
            vals = tuple(unescape(t) for t in toks[2:])
            if toks[1] == "north":
                north = vals
            else:
                east = vals
        else:
            raise FormatError(f"unexpected line starting with {toks[0]!r}", i)
    if north is None or east is None:
        raise FormatError("missing seed north/east lines")
    return TileSet(tuple(tiles), Seed(north, east))
