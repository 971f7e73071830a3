import pytest

from reference_assignments import REFERENCE
from support import random_formula, random_satisfiable, xxx
from tilepats.core import Assignment, Seed, TileSet, TileType, color_census, glue_isomorphic, is_directed, verify_stream
from tilepats.sat import Cnf3, Literal
from tilepats.satreduce import (
    OR,
    AmbiguousColor,
    UnsatisfyingAssignment,
    build_pattern,
    census_formula,
    expected_width,
    extract_assignment,
    gen_subpattern,
    or_gate_identification,
    or_gate_violations,
    var_colors,
    witness_assignment,
    witness_tileset,
)

REFERENCE_F = Cnf3(("u", "v", "w"), ((Literal("u"), Literal("v"), Literal("w", True)),))
REFERENCE_VALUES = {"u": 0, "v": 1, "w": 1}


# ---------------------------------------------------------------- gadgets


def test_subpattern_p():
    p = gen_subpattern("p")
    c = color_census(p)
    assert p.dims == (16, 2)
    assert c.counts[OR] == 16
    assert sum(1 for k in c.counts if k.startswith("X")) == 8
    assert sum(1 for k in c.counts if k.startswith("Y")) == 8


def test_subpattern_q5():
    q5 = gen_subpattern("q", 5)
    assert q5.dims == (6, 3)
    assert q5.row(2).count(OR) == 4


@pytest.mark.parametrize("i,letter,sign", [(1, "A", "-"), (2, "B", "+"), (3, "C", "+"), (4, "D", "+")])
def test_subpattern_q_small(i, letter, sign):
    q = gen_subpattern("q", i)
    assert q.dims == (4, 4)
    assert q.cell(3, 4) == letter and q.cell(4, 3) == sign and q.cell(3, 3) == OR


def test_subpattern_s_repeated_literal():
    s = gen_subpattern("s", None, xxx().clauses[0])
    assert s.row(1)[1:4] == ["x.white"] * 3


def test_subpattern_r():
    c = var_colors("y")
    assert gen_subpattern("r", 1, "y").row(1) == ["Z4", c["v_white"]]
    assert gen_subpattern("r", 3, "y").row(1)[1:3] == [c["v_white"], c["negv_white"]]


@pytest.mark.parametrize("args", [("q", 6), ("r", 4, "x"), ("r", 1, None), ("z",), ("p", 1)])
def test_subpattern_invalid(args):
    with pytest.raises(ValueError):
        gen_subpattern(*args)


# ---------------------------------------------------------------- pattern


def test_xxx_pattern():
    inst = build_pattern(xxx())
    assert inst.pattern.dims == (62, 6)
    assert len(inst.pattern.palette) == 278
    assert inst.m == 281


@pytest.mark.parametrize("nv,nc", [(1, 1), (2, 2), (3, 1), (1, 4), (4, 3)])
def test_width_and_census_formulas(rng, nv, nc):
    f = random_formula(rng, nv, nc)
    inst = build_pattern(f)
    assert inst.pattern.width == expected_width(nv, nc)
    assert len(inst.pattern.palette) == census_formula(nv, nc)


def test_border_cells_are_unique(rng):
    for _ in range(5):
        f, _ = random_satisfiable(rng)
        p = build_pattern(f).pattern
        unique = color_census(p).unique_colors
        w, h = p.dims
        border = {(x, y) for x in range(1, w + 1) for y in (1, h)} | {(x, y) for y in range(1, h + 1) for x in (1, w)}
        assert all(p.cell(x, y) in unique for x, y in border)


def test_atlas_lists_roles():
    inst = build_pattern(xxx())
    assert inst.color_atlas["v_white(x)"] == "x.white"
    assert inst.color_atlas["unique@(1,1)"] == "u@1_1"
    assert "v_white(x) -> x.white" in inst.atlas_text()


# ---------------------------------------------------------------- witness


def test_xxx_witness():
    f = xxx()
    inst = build_pattern(f)
    ts = witness_tileset(f, {"x": 1}, inst)
    assert len(ts) == 281
    assert is_directed(ts)
    assert verify_stream(ts, inst.pattern)
    assert ts.with_color("x.white")[0].n == "1"
    counts = {}
    for t in ts.tiles:
        counts[t.color] = counts.get(t.color, 0) + 1
    assert counts.pop(OR) == 4
    assert set(counts.values()) == {1}


def test_unsatisfying_assignment_rejected():
    with pytest.raises(UnsatisfyingAssignment):
        witness_tileset(xxx(), {"x": 0})


def test_unique_cells_take_coordinate_input(rng):
    f, model = random_satisfiable(rng)
    inst = build_pattern(f)
    a = witness_assignment(f, model, inst)
    unique = color_census(inst.pattern).unique_colors
    for y in range(1, 7):
        for x in range(1, inst.pattern.width + 1):
            t = a.at(x, y)
            if t.color.startswith("u@"):
                assert t.s.startswith("h@") or t.w.startswith("v@")
                assert t.color in unique


def test_literal_tiles_carry_opposite_bits(rng):
    for _ in range(10):
        f, model = random_satisfiable(rng)
        ts = witness_tileset(f, model)
        for v in f.variables:
            c = var_colors(v)
            pos, neg = ts.with_color(c["v_white"])[0].n, ts.with_color(c["negv_white"])[0].n
            assert pos != neg and {pos, neg} == {"0", "1"}


def test_or_gate_semantics(rng):
    for _ in range(10):
        f, model = random_satisfiable(rng)
        a = witness_assignment(f, model)
        assert or_gate_violations(a) == []
    h, v = or_gate_identification(a.tileset)
    assert h == {"0": 0, "1": 1} and v == {"0": 0, "1": 1}


def test_or_gate_violation_detected():
    a = witness_assignment(xxx(), {"x": 1})
    ors = [i for i, t in enumerate(a.tileset.tiles) if t.color == OR and t.inputs == ("0", "0")]
    tiles = list(a.tileset.tiles)
    tiles[ors[0]] = TileType(OR, "A", "1", "0", "0")
    broken = Assignment(TileSet(tuple(tiles), a.tileset.seed), a.grid)
    assert or_gate_violations(broken)


# ---------------------------------------------------------------- extraction


def test_extract_round_trip_with_renaming(rng):
    for _ in range(10):
        f, model = random_satisfiable(rng)
        inst = build_pattern(f)
        ts = witness_tileset(f, model, inst)
        n = int(rng.integers(10**6))
        renamed = ts.renamed(lambda g: f"H{n}:{g}", lambda g: f"V{n}:{g}")
        assert extract_assignment(renamed, inst) == model


def test_extract_missing_color():
    inst = build_pattern(xxx())
    ts = witness_tileset(xxx(), {"x": 1}, inst)
    pruned = TileSet(tuple(t for t in ts.tiles if t.color != "^1_white"), ts.seed)
    with pytest.raises(AmbiguousColor) as err:
        extract_assignment(pruned, inst)
    assert err.value.color == "^1_white" and err.value.count == 0


# ---------------------------------------------------------------- reference assignments


def _reference_tiles(rows):
    tiles = set()
    for _, _, color, *glues in rows:
        names = [g if g is not None else f"blank:{color}:{side}" for g, side in zip(glues, "NESW")]
        tiles.add(TileType(color, *names))
    return TileSet(tuple(sorted(tiles, key=repr)), Seed((), ()))


def _witness_tiles(a, pl):
    tiles = {a.at(pl.x0 + lx, pl.y0 + ly) for lx in range(pl.width) for ly in range(pl.height)}
    return TileSet(tuple(sorted(tiles, key=repr)), Seed((), ()))


def _reference_key(label):
    return "s" if label.startswith("s") else label


@pytest.mark.parametrize("label", list(REFERENCE))
def test_gadget_matches_reference_assignment(label):
    inst = build_pattern(REFERENCE_F)
    a = witness_assignment(REFERENCE_F, REFERENCE_VALUES, inst)
    pl = next(pl for pl in inst.placements if _reference_key(pl.label) == label)
    rows = REFERENCE[label]
    for lx, ly, color, *_ in rows:
        assert a.at(pl.x0 + lx - 1, pl.y0 + ly - 1).color == color
    assert len(rows) == pl.width * pl.height
    assert glue_isomorphic(_witness_tiles(a, pl), _reference_tiles(rows))
