"""Row-at-a-time assembly kernel.

Glues are interned to integers per namespace and tiles are looked up by
their (south, west) input pair in an open-addressing hash table, so one
compiled kernel serves tile sets of any size. State between rows is a single
int32 array of north glues.
"""
from __future__ import annotations

from typing import Iterator, Sequence

import numba
import numpy as np


class RowFailure(Exception):
    def __init__(self, kind: str, position: tuple[int, int], s_glue=None, w_glue=None, tile: int = -1):
        self.kind, self.position = kind, position
        self.s_glue, self.w_glue, self.tile = s_glue, w_glue, tile
        super().__init__(kind, position)


@numba.njit(cache=True)
def _slot(key, bits):
    return np.int64((np.uint64(key) * np.uint64(0x9E3779B97F4A7C15)) >> np.uint64(64 - bits))


@numba.njit(cache=True)
def _build_table(keys, bits):
    size = 1 << bits
    tkeys = np.full(size, -1, dtype=np.int64)
    tvals = np.full(size, -1, dtype=np.int32)
    mask = size - 1
    for i in range(keys.shape[0]):
        j = _slot(keys[i], bits)
        while tkeys[j] != -1:
            j = (j + 1) & mask
        tkeys[j] = keys[i]
        tvals[j] = i
    return tkeys, tvals


@numba.njit(cache=True)
def _row(south, west, colors, check, tkeys, tvals, bits, nv, tile_n, tile_e, tile_color, out):
    """Fill one row. Returns (-1, 0, 0) or (x, kind, extra) on failure.

    kind 1: no tile fits, extra = west glue id; kind 2: color mismatch,
    extra = tile index. ``south`` is updated in place to the row's north glues.
    """
    mask = (1 << bits) - 1
    w = west
    for x in range(south.shape[0]):
        key = np.int64(south[x]) * nv + w
        j = _slot(key, bits)
        t = -1
        while tkeys[j] != -1:
            if tkeys[j] == key:
                t = tvals[j]
                break
            j = (j + 1) & mask
        if t < 0:
            return x, 1, w
        if check and tile_color[t] != colors[x]:
            return x, 2, t
        out[x] = t
        south[x] = tile_n[t]
        w = tile_e[t]
    return -1, 0, 0


class CompiledTileSet:
    """Integer form of a directed tile set for streaming assembly."""

    def __init__(self, ts, palette: Sequence[str] | None = None):
        self.ts = ts
        self.hid: dict[str, int] = {}
        self.vid: dict[str, int] = {}
        h, v = self.hid, self.vid
        for t in ts.tiles:
            for g in (t.n, t.s):
                h.setdefault(g, len(h))
            for g in (t.e, t.w):
                v.setdefault(g, len(v))
        for g in ts.seed.north:
            h.setdefault(g, len(h))
        for g in ts.seed.east:
            v.setdefault(g, len(v))
        self.nv = max(len(v), 1)
        self.tile_n = np.array([h[t.n] for t in ts.tiles], dtype=np.int32)
        self.tile_e = np.array([v[t.e] for t in ts.tiles], dtype=np.int32)
        keys = np.array([h[t.s] * self.nv + v[t.w] for t in ts.tiles], dtype=np.int64)
        self.bits = max(4, int(2 * max(len(keys), 1) - 1).bit_length())
        self.tkeys, self.tvals = _build_table(keys, self.bits)
        if palette is None:
            self.tile_color = np.zeros(len(ts.tiles), dtype=np.int32)
        else:
            index = {c: i for i, c in enumerate(palette)}
            self.tile_color = np.array([index.get(t.color, -2) for t in ts.tiles], dtype=np.int32)

    def _hname(self, i: int) -> str:
        return next(g for g, j in self.hid.items() if j == i)

    def _vname(self, i: int) -> str:
        return next(g for g, j in self.vid.items() if j == i)

    def rows(self, width: int, height: int, pattern=None) -> Iterator[tuple[int, np.ndarray]]:
        south = np.array([self.hid[g] for g in self.ts.seed.north], dtype=np.int32)
        east = [self.vid[g] for g in self.ts.seed.east]
        out = np.empty(width, dtype=np.int32)
        dummy = np.zeros(width, dtype=np.int32)
        check = pattern is not None
        for y in range(1, height + 1):
            colors = np.ascontiguousarray(pattern.row_codes(y), dtype=np.int32) if check else dummy
            x, kind, extra = _row(south, east[y - 1], colors, check, self.tkeys, self.tvals,
                                  self.bits, self.nv, self.tile_n, self.tile_e, self.tile_color, out)
            if kind == 1:
                raise RowFailure("nofit", (x + 1, y), self._hname(int(south[x])), self._vname(int(extra)))
            if kind == 2:
                raise RowFailure("color", (x + 1, y), tile=int(extra))
            yield y, out
