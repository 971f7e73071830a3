"""Static renders of patterns: binary PPM, SVG and (through matplotlib) PNG."""
from __future__ import annotations

import colorsys
import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from tilepats.core import Color, Pattern

FIXED = {"black": (0, 0, 0), "white": (255, 255, 255), "gray": (0xAA, 0xAA, 0xAA)}
DEFAULT_MAX_PIXELS = 50_000_000


class RenderTooLarge(ValueError):
    pass


def _hashed_rgb(token: str, salt: int) -> tuple[int, int, int]:
    digest = hashlib.sha256(f"{salt}:{token}".encode()).digest()
    hue = int.from_bytes(digest[:4], "big") / 2**32
    sat = 0.45 + 0.5 * digest[4] / 255
    val = 0.55 + 0.4 * digest[5] / 255
    return tuple(int(round(255 * v)) for v in colorsys.hsv_to_rgb(hue, sat, val))


def default_palette(colors: Iterable[Color], overrides: Mapping[Color, tuple[int, int, int]] | None = None
                    ) -> dict[Color, tuple[int, int, int]]:
    """Fixed RGB for black/white/gray, hashed hues for the rest, injective on ``colors``."""
    out: dict[Color, tuple[int, int, int]] = {}
    taken: set[tuple[int, int, int]] = set()
    given = {**FIXED, **(overrides or {})}
    colors = list(dict.fromkeys(colors))
    for c in colors:
        if c in given:
            out[c] = tuple(given[c])
            taken.add(out[c])
    for c in colors:
        if c in out:
            continue
        salt = 0
        rgb = _hashed_rgb(c, salt)
        while rgb in taken:
            salt += 1
            rgb = _hashed_rgb(c, salt)
        out[c] = rgb
        taken.add(rgb)
    return out


@dataclass(frozen=True)
class RenderSpec:
    format: str = "ppm"
    palette: Mapping[Color, tuple[int, int, int]] = field(default_factory=dict)
    cell_size: int = 1
    max_pixels: int = DEFAULT_MAX_PIXELS

    def __post_init__(self):
        if self.format not in ("ppm", "svg", "png"):
            raise ValueError(f"unknown render format {self.format!r}")
        if self.cell_size < 1:
            raise ValueError("cell size must be positive")


def _lut(p: Pattern, spec: RenderSpec) -> np.ndarray:
    pal = default_palette(p.palette, spec.palette)
    if len(set(pal[c] for c in p.palette)) != len(p.palette):
        raise ValueError("palette maps two colors to the same RGB value")
    return np.array([pal[c] for c in p.palette], dtype=np.uint8)


def _guard(p: Pattern, spec: RenderSpec) -> None:
    pixels = p.size * spec.cell_size ** 2
    if pixels > spec.max_pixels:
        raise RenderTooLarge(f"{pixels} pixels exceed the limit of {spec.max_pixels}")


def rgb_rows(p: Pattern, spec: RenderSpec) -> Iterable[np.ndarray]:
    """Pixel rows top to bottom, each of shape (width * cell, 3)."""
    lut = _lut(p, spec)
    for y in range(p.height, 0, -1):
        row = np.repeat(lut[np.asarray(p.row_codes(y))], spec.cell_size, axis=0)
        for _ in range(spec.cell_size):
            yield row


def render_ppm(p: Pattern, spec: RenderSpec = RenderSpec()) -> bytes:
    _guard(p, spec)
    header = f"P6\n{p.width * spec.cell_size} {p.height * spec.cell_size}\n255\n".encode()
    return header + b"".join(r.tobytes() for r in rgb_rows(p, spec))


def render_svg(p: Pattern, spec: RenderSpec = RenderSpec(format="svg")) -> str:
    _guard(p, spec)
    lut = _lut(p, spec)
    s = spec.cell_size
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{p.width * s}" height="{p.height * s}" '
           f'shape-rendering="crispEdges">']
    for y in range(p.height, 0, -1):
        codes = np.asarray(p.row_codes(y))
        top = (p.height - y) * s
        start = 0
        for x in range(1, len(codes) + 1):
            if x == len(codes) or codes[x] != codes[start]:
                r, g, b = lut[codes[start]]
                out.append(f'<rect x="{start * s}" y="{top}" width="{(x - start) * s}" height="{s}" '
                           f'fill="#{r:02x}{g:02x}{b:02x}"/>')
                start = x
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_png(p: Pattern, path, spec: RenderSpec = RenderSpec(format="png"), title: str | None = None) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    _guard(p, spec)
    img = np.stack(list(rgb_rows(p, RenderSpec("ppm", spec.palette, 1, spec.max_pixels))))
    scale = max(1, spec.cell_size)
    fig, ax = plt.subplots(figsize=(max(2.0, p.width * scale / 100), max(2.0, p.height * scale / 100) + 0.4))
    ax.imshow(img, interpolation="nearest")
    ax.set_axis_off()
    if title:
        ax.set_title(title, fontsize=8)
    fig.savefig(path, dpi=100, bbox_inches="tight")
    plt.close(fig)


def write_render(p: Pattern, path, spec: RenderSpec) -> None:
    if spec.format == "ppm":
        data = render_ppm(p, spec)
        with open(path, "wb") as fh:
            fh.write(data)
    elif spec.format == "svg":
        text = render_svg(p, spec)
        with open(path, "w") as fh:
            fh.write(text)
    else:
        render_png(p, path, spec)
