import numpy as np
import pytest

from support import stripes_pattern
from tilepats.core import DensePattern
from tilepats.render import (
    FIXED,
    RenderSpec,
    RenderTooLarge,
    default_palette,
    render_png,
    render_ppm,
    render_svg,
)
from tilepats.superreduce import build_q, toy_source


def test_palette_fixed_and_injective():
    colors = ["black", "white", "gray"] + [f"c{i}" for i in range(300)]
    pal = default_palette(colors)
    assert pal["black"] == (0, 0, 0) and pal["white"] == (255, 255, 255) and pal["gray"] == FIXED["gray"]
    assert len(set(pal.values())) == len(colors)


def test_palette_override_collision_rejected():
    spec = RenderSpec(palette={"1": (1, 2, 3), "2": (1, 2, 3)})
    with pytest.raises(ValueError):
        render_ppm(stripes_pattern(), spec)


def test_ppm_pixels():
    p = DensePattern.from_rows([["black", "white"], ["gray", "black"]])  # bottom row first
    data = render_ppm(p, RenderSpec(cell_size=2))
    header = b"P6\n4 4\n255\n"
    assert data.startswith(header)
    px = np.frombuffer(data[len(header):], dtype=np.uint8).reshape(4, 4, 3)
    assert tuple(px[0, 0]) == FIXED["gray"] and tuple(px[0, 3]) == (0, 0, 0)
    assert tuple(px[3, 0]) == (0, 0, 0) and tuple(px[3, 3]) == (255, 255, 255)


def test_ppm_deterministic():
    assert render_ppm(stripes_pattern()) == render_ppm(stripes_pattern())


def test_svg_runs():
    p = DensePattern.uniform(5, 2, "white")
    svg = render_svg(p, RenderSpec("svg", cell_size=3))
    assert svg.count("<rect") == 2
    assert 'width="15"' in svg


def test_procedural_q_render(rng):
    _, p = toy_source(2, 2, rng)
    q = build_q(p).q
    data = render_ppm(q)
    assert len(data) == len(f"P6\n{q.width} {q.height}\n255\n") + 3 * q.size


def test_guard():
    with pytest.raises(RenderTooLarge):
        render_ppm(stripes_pattern(), RenderSpec(max_pixels=14))


def test_png(tmp_path):
    out = tmp_path / "f.png"
    render_png(stripes_pattern(), out, RenderSpec("png", cell_size=4), title="three colors")
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_bad_spec():
    with pytest.raises(ValueError):
        RenderSpec("gif")
    with pytest.raises(ValueError):
        RenderSpec(cell_size=0)
