"""Shared builders for the test modules."""
import itertools

from tilepats.core import DensePattern, Seed, TileSet, TileType, assemble, pattern_of
from tilepats.sat import Cnf3, Literal
from tilepats.satreduce import OR_TILES
from tilepats.superreduce import BLACK, GRAY, WHITE_ROLES, build_q, role_usage, witness_theta

DOT, DIA, STAR = "dot", "dia", "star"


def stripes_pattern() -> DensePattern:
    return DensePattern.from_function(5, 3, lambda x, y: str((x + y - 2) % 3 + 1))


def stripes_tiles() -> TileSet:
    tiles = (
        TileType("1", DIA, DIA, DOT, DOT),
        TileType("2", STAR, STAR, DIA, DIA),
        TileType("3", DOT, DOT, STAR, STAR),
    )
    return TileSet(tiles, Seed((DOT, DIA, STAR, DOT, DIA), (DOT, DIA, STAR)))


def xxx() -> Cnf3:
    return Cnf3(("x",), ((Literal("x"),) * 3,))


def random_formula(rng, num_vars: int, num_clauses: int) -> Cnf3:
    names = tuple(f"x{i}" for i in range(1, num_vars + 1))
    clauses = []
    for _ in range(num_clauses):
        clauses.append(tuple(Literal(names[rng.integers(num_vars)], bool(rng.integers(2))) for _ in range(3)))
    return Cnf3(names, tuple(clauses))


def brute_force_models(f: Cnf3):
    """All satisfying assignments by truth table."""
    out = []
    for bits in range(2 ** len(f.variables)):
        values = {v: (bits >> i) & 1 for i, v in enumerate(f.variables)}
        if all(any(values[l.var] != l.negated for l in c) for c in f.clauses):
            out.append(values)
    return out


def random_satisfiable(rng, max_vars=4, max_clauses=4):
    while True:
        f = random_formula(rng, int(rng.integers(1, max_vars + 1)), int(rng.integers(1, max_clauses + 1)))
        models = brute_force_models(f)
        if models:
            return f, models[int(rng.integers(len(models)))]


def or_gate_toy(rng, width: int = 6):
    """A width x 3 source whose middle row is a chain of or-gate cells.

    All four or-gate tile types are in the tile set even if the random
    inputs leave some unused.
    """
    tiles: list[TileType] = []
    north = []
    west = "v@0_1"
    for x in range(1, width + 1):
        n = str(int(rng.integers(2))) if 1 < x < width else f"h@{x}_1"
        t = TileType(f"u@{x}_1", n, f"v@{x}_1", f"h@{x}_0", west)
        tiles.append(t)
        north.append(t.n)
        west = t.e
    first = TileType("u@1_2", "h@1_2", str(int(rng.integers(2))), north[0], "v@0_2")
    tiles.append(first)
    row2 = [first]
    for x in range(2, width):
        t = OR_TILES[(north[x - 1], row2[-1].e)]
        row2.append(t)
    last = TileType(f"u@{width}_2", f"h@{width}_2", f"v@{width}_2", north[-1], row2[-1].e)
    tiles.append(last)
    row2.append(last)
    west = "v@0_3"
    for x in range(1, width + 1):
        t = TileType(f"u@{x}_3", f"h@{x}_3", f"v@{x}_3", row2[x - 1].n, west)
        tiles.append(t)
        west = t.e
    tiles += list(OR_TILES.values())
    seed = Seed(tuple(f"h@{x}_0" for x in range(1, width + 1)), tuple(f"v@0_{y}" for y in range(1, 4)))
    ts = TileSet(tuple(tiles), seed)
    return ts, pattern_of(assemble(ts, width, 3))


def counter_tile_shapes(theta, k):
    """Black and gray tiles have the counter shapes, with distinct glues per namespace."""
    black = theta.with_color(BLACK)
    assert len(black) == 1
    b = black[0]
    assert b.n == b.s and b.e == b.w
    dot_h, dot_v = b.n, b.e
    gray = theta.with_color(GRAY)
    assert len(gray) == 2 * k + 3
    vertical = [t for t in gray if t.e == t.w == dot_v]
    horizontal = [t for t in gray if t.n == t.s == dot_h]
    rest = [t for t in gray if t not in vertical and t not in horizontal]
    f1 = [t for t in vertical if t.n == t.s]
    f2 = [t for t in horizontal if t.e == t.w]
    assert len(f1) == len(f2) == len(rest) == 1
    g = rest[0]
    assert g.n == g.s == f1[0].n and g.e == g.w == f2[0].e

    def chain(tiles, inp, outp):
        step = {inp(t): outp(t) for t in tiles}
        assert len(step) == k
        start = set(step) - set(step.values())
        assert len(start) == 1
        glue, seen = start.pop(), []
        while glue in step:
            seen.append(glue)
            glue = step[glue]
        seen.append(glue)
        assert len(seen) == k + 1
        return seen

    vchain = chain([t for t in vertical if t.n != t.s], lambda t: t.s, lambda t: t.n)
    hchain = chain([t for t in horizontal if t.e != t.w], lambda t: t.w, lambda t: t.e)
    assert len({dot_h, f1[0].n, *vchain}) == k + 3
    assert len({dot_v, f2[0].e, *hchain}) == k + 3


def role_checks(ts, p):
    """Scan every block of the witness assignment for forbidden tile sharing."""
    theta = witness_theta(ts, p)
    inst = build_q(p)
    usage = role_usage(theta, inst)
    # white tiles never serve two roles
    by_role = {r: set() for r in WHITE_ROLES}
    for roles in usage.values():
        for r in WHITE_ROLES:
            by_role[r] |= roles.get(r, set())
    for r1, r2 in itertools.combinations(WHITE_ROLES, 2):
        assert not by_role[r1] & by_role[r2], (r1, r2)
    # blocks of different colors, or with different east outputs, share no control tiles
    a = assemble(ts, p.width, p.height)
    key = {}
    for (x, y) in usage:
        t = a.at(x, y)
        key[(x, y)] = (t.color, None if x == p.width else t.e)
    color_roles = ("A", "B1", "B2", "C1", "C2")
    east_roles = ("A", "B1", "C1")
    for b1, b2 in itertools.combinations(usage, 2):
        if key[b1][0] != key[b2][0]:
            for r in color_roles:
                assert not usage[b1].get(r, set()) & usage[b2].get(r, set()), (b1, b2, r)
        if key[b1][1] != key[b2][1]:
            for r in east_roles:
                assert not usage[b1].get(r, set()) & usage[b2].get(r, set()), (b1, b2, r)
    return theta, inst
