"""``tilepats`` command line.

Exit codes: 0 success, 1 a valid run with a negative answer (unsatisfiable,
infeasible, verification failure), 2 bad usage or unreadable input.
"""
from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from tilepats import render, satreduce, solver, superreduce, textio
from tilepats.core import TileError, assemble, glue_isomorphic, pattern_of, verify_stream
from tilepats.sat import ParseError, TooLarge, parse_dimacs, solve_sat

DENSE_LIMIT = 10_000_000


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)


def _cnf(path: str):
    return parse_dimacs(_read(path))


def _pattern_or_q(path: str):
    text = _read(path)
    head = text.lstrip().split(None, 1)[0] if text.strip() else ""
    if head == "qdesc":
        return superreduce.parse_qdesc(text).q
    return textio.parse_pattern(text)


def _assignment_text(values) -> str:
    return "".join(f"{v}={b}\n" for v, b in values.items())


def _parse_assignment(text: str) -> dict[str, int]:
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        v, eq, b = line.partition("=")
        if not eq or b.strip() not in ("0", "1"):
            raise textio.FormatError("expected 'variable=0|1'", n)
        out[v.strip()] = int(b)
    return out


# ---------------------------------------------------------------- commands


def cmd_sat_solve(args) -> int:
    f = _cnf(args.cnf)
    values = solve_sat(f, args.guard)
    if values is None:
        print("UNSAT")
        return 1
    print("SAT")
    sys.stdout.write(_assignment_text(values))
    return 0


def cmd_sat2pats(args) -> int:
    inst = satreduce.build_pattern(_cnf(args.cnf))
    _write(args.output, textio.dump_pattern(inst.pattern))
    if args.atlas:
        _write(args.atlas, inst.atlas_text())
    print(f"width={inst.pattern.width}\theight={inst.pattern.height}\tcolors={inst.m - 3}\tm={inst.m}")
    return 0


def cmd_witness_pats(args) -> int:
    f = _cnf(args.cnf)
    if args.assignment:
        values = _parse_assignment(_read(args.assignment))
    else:
        values = solve_sat(f)
        if values is None:
            print("UNSAT: no witness exists", file=sys.stderr)
            return 1
    ts = satreduce.witness_tileset(f, values)
    _write(args.output, textio.dump_tileset(ts))
    print(f"tiles={len(ts)}")
    return 0


def cmd_extract(args) -> int:
    ts = textio.parse_tileset(_read(args.tileset))
    inst = satreduce.build_pattern(_cnf(args.cnf))
    sys.stdout.write(_assignment_text(satreduce.extract_assignment(ts, inst)))
    return 0


def cmd_assemble(args) -> int:
    ts = textio.parse_tileset(_read(args.tileset))
    a = assemble(ts, args.width, args.height)
    _write(args.output, textio.dump_pattern(pattern_of(a)))
    return 0


def cmd_verify(args) -> int:
    ts = textio.parse_tileset(_read(args.tileset))
    p = _pattern_or_q(args.target)
    verify_stream(ts, p)
    print(f"OK {p.width}x{p.height}")
    return 0


def cmd_pats2mbpats(args) -> int:
    p = textio.parse_pattern(_read(args.pattern))
    f = _cnf(args.strict_membership) if args.strict_membership else None
    inst = superreduce.build_q(p, f)
    _write(args.output, superreduce.dump_qdesc(inst))
    if args.dense:
        if inst.q.size > DENSE_LIMIT and not args.force_dense:
            raise UsageError(f"Q has {inst.q.size} cells; pass --force-dense to write it anyway")
        _write(args.dense, textio.dump_pattern(inst.q))
    print(f"m_b={inst.m_b}\tm_w={inst.m_w}\tm_g={inst.m_g}\tell={inst.ell}\twidth={inst.q.width}\theight={inst.q.height}")
    return 0


def cmd_witness_mbpats(args) -> int:
    ts = textio.parse_tileset(_read(args.tileset))
    p = textio.parse_pattern(_read(args.pattern))
    theta = superreduce.witness_theta(ts, p)
    _write(args.output, textio.dump_tileset(theta))
    counts = superreduce.theta_census(theta)
    print("\t".join(f"{c}={n}" for c, n in counts.items()))
    return 0


def cmd_decode(args) -> int:
    theta = textio.parse_tileset(_read(args.theta))
    inst = superreduce.parse_qdesc(_read(args.qdesc))
    ts = superreduce.decode_supertiles(theta, inst)
    _write(args.output, textio.dump_tileset(ts))
    print(f"tiles={len(ts)}")
    return 0


def _limits(args) -> dict:
    return {"node_limit": args.node_limit, "time_limit": args.time_limit}


def cmd_solve_min(args) -> int:
    p = textio.parse_pattern(_read(args.pattern))
    try:
        m, ts = solver.minimize(p, args.cap, **_limits(args))
    except solver.BudgetExceeded as e:
        print(f"BUDGET_EXCEEDED\t{e}")
        return 1
    print(f"min_m={m}")
    if args.output:
        _write(args.output, textio.dump_tileset(ts))
    return 0


def _bound(text: str) -> tuple[str, int]:
    color, eq, n = text.rpartition("=")
    if not eq or not color or not n.isdigit():
        raise argparse.ArgumentTypeError(f"expected <color>=<n>, got {text!r}")
    return textio.unescape(color), int(n)


def cmd_solve_bounded(args) -> int:
    p = textio.parse_pattern(_read(args.pattern))
    per = dict(args.bound) if args.bound else None
    if per is None and args.total is None:
        raise UsageError("give at least one --bound or --total")
    r = solver.solve_exact(p, solver.SearchBudget(args.total, per, **_limits(args)))
    print(f"{r.status.name}\tnodes={r.nodes_explored}")
    if r.found and args.output:
        _write(args.output, textio.dump_tileset(r.tileset))
    return 0 if r.found else 1


def cmd_render(args) -> int:
    p = _pattern_or_q(args.input)
    fmt = args.format or Path(args.output).suffix.lstrip(".").lower() or "ppm"
    spec = render.RenderSpec(fmt, {}, args.cell, args.max_pixels)
    render.write_render(p, args.output, spec)
    return 0


# ---------------------------------------------------------------- roundtrip


class _Report:
    def __init__(self):
        self.rows: list[tuple[str, str, str, str]] = []
        self.failed = False

    def step(self, name: str, fn):
        t = time.perf_counter()
        try:
            detail = fn()
            status = "ok"
        except TileError as e:
            detail, status = f"{type(e).__name__}: {e}", "fail"
            self.failed = True
        row = (name, status, str(detail), f"{time.perf_counter() - t:.3f}")
        self.rows.append(row)
        print("\t".join(row), flush=True)
        return status == "ok"


def cmd_roundtrip(args) -> int:
    f = _cnf(args.cnf)
    rep = _Report()
    print("step\tstatus\tdetail\tseconds")
    ctx: dict = {}

    def sat():
        ctx["f"] = solve_sat(f)
        if ctx["f"] is None:
            raise TileError("formula is unsatisfiable")
        return " ".join(f"{v}={b}" for v, b in ctx["f"].items())

    def build():
        ctx["inst"] = satreduce.build_pattern(f)
        p = ctx["inst"].pattern
        return f"{p.width}x{p.height} m={ctx['inst'].m}"

    def witness():
        ctx["T"] = satreduce.witness_tileset(f, ctx["f"], ctx["inst"])
        return f"tiles={len(ctx['T'])}"

    def verify():
        verify_stream(ctx["T"], ctx["inst"].pattern)
        return "pattern reproduced"

    def extract():
        got = satreduce.extract_assignment(ctx["T"], ctx["inst"])
        if got != ctx["f"]:
            raise TileError(f"extracted {got}, expected {ctx['f']}")
        return "assignment recovered"

    ok = all(rep.step(n, fn) for n, fn in
             [("solve_sat", sat), ("build_pattern", build), ("witness_tileset", witness),
              ("verify_stream", verify), ("extract_assignment", extract)])

    if ok and args.full:
        def blowup():
            ctx["P"], ctx["TP"] = ctx["inst"].pattern, ctx["T"]
            ctx["Q"] = superreduce.build_q(ctx["P"], f)
            q = ctx["Q"]
            return f"Q={q.q.width}x{q.q.height} bounds=({q.m_b},{q.m_w},{q.m_g}) ell={q.ell}"
    else:
        def blowup():
            rng = np.random.default_rng(args.seed)
            ctx["TP"], ctx["P"] = superreduce.toy_source(4, 4, rng, distinct=True)
            ctx["Q"] = superreduce.build_q(ctx["P"])
            q = ctx["Q"]
            return f"toy 4x4 Q={q.q.width}x{q.q.height} bounds=({q.m_b},{q.m_w},{q.m_g}) ell={q.ell}"

    def theta():
        ctx["theta"] = superreduce.witness_theta(ctx["TP"], ctx["P"])
        counts = superreduce.theta_census(ctx["theta"])
        q = ctx["Q"]
        if counts["black"] > q.m_b or counts["white"] > q.m_w or counts["gray"] > q.m_g:
            raise TileError(f"counts {counts} exceed bounds")
        return " ".join(f"{c}={n}" for c, n in counts.items())

    def verify_q():
        verify_stream(ctx["theta"], ctx["Q"].q)
        return f"{ctx['Q'].q.size} cells streamed"

    def decode():
        dec = superreduce.decode_supertiles(ctx["theta"], ctx["Q"])
        if not glue_isomorphic(dec, ctx["TP"]):
            raise TileError("decoded tile set is not glue-isomorphic to the source")
        verify_stream(dec, ctx["P"])
        return f"tiles={len(dec)}"

    steps = [("build_q", blowup), ("witness_theta", theta), ("verify_q", verify_q)]
    if not args.full:
        steps.append(("decode_supertiles", decode))
    if ok:
        ok = all(rep.step(n, fn) for n, fn in steps)

    if args.report_dir:
        _write_report(Path(args.report_dir), rep, ctx)
    return 1 if rep.failed else 0


def _write_report(out: Path, rep: _Report, ctx: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "roundtrip.tsv", "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["step", "status", "detail", "seconds"])
        w.writerows(rep.rows)
    spec = render.RenderSpec("png", cell_size=8)
    if "inst" in ctx:
        render.render_png(ctx["inst"].pattern, out / "pattern_pf.png", spec, "reduction pattern")
    if "P" in ctx and ctx["P"].size <= 4096:
        render.render_png(ctx["P"], out / "source_pattern.png", spec, "source pattern")
    if "Q" in ctx and ctx["Q"].q.size <= 4_000_000:
        render.render_png(ctx["Q"].q, out / "blowup_q.png", render.RenderSpec("png", cell_size=1), "three-color blowup")


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tilepats", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        return p

    def limits(p):
        p.add_argument("--node-limit", type=int)
        p.add_argument("--time-limit", type=float)

    p = add("sat-solve", cmd_sat_solve, "solve a DIMACS formula")
    p.add_argument("cnf")
    p.add_argument("--guard", type=int, default=26)

    p = add("sat2pats", cmd_sat2pats, "build the reduction pattern of a formula")
    p.add_argument("cnf")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--atlas")

    p = add("witness-pats", cmd_witness_pats, "witness tile set for a satisfying assignment")
    p.add_argument("cnf")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--assignment")
    g.add_argument("--solve", action="store_true")
    p.add_argument("-o", "--output", required=True)

    p = add("extract-assignment", cmd_extract, "read the assignment off a tile set")
    p.add_argument("tileset")
    p.add_argument("cnf")

    p = add("assemble", cmd_assemble, "assemble a tile set into a pattern")
    p.add_argument("tileset")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = add("verify", cmd_verify, "check that a tile set assembles a pattern or qdesc")
    p.add_argument("tileset")
    p.add_argument("target")
    p.add_argument("--stream", action="store_true", help="accepted for compatibility; verification always streams")

    p = add("pats2mbpats", cmd_pats2mbpats, "blow a pattern up into the three-color pattern")
    p.add_argument("pattern")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--dense")
    p.add_argument("--force-dense", action="store_true")
    p.add_argument("--strict-membership", metavar="CNF")

    p = add("witness-mbpats", cmd_witness_mbpats, "three-color witness tile set")
    p.add_argument("tileset")
    p.add_argument("pattern")
    p.add_argument("-o", "--output", required=True)

    p = add("decode-supertiles", cmd_decode, "tile set for the source pattern from a three-color tile set")
    p.add_argument("theta")
    p.add_argument("qdesc")
    p.add_argument("-o", "--output", required=True)

    p = add("solve-min", cmd_solve_min, "minimum tile set by exact search")
    p.add_argument("pattern")
    p.add_argument("--cap", type=int, default=8)
    p.add_argument("-o", "--output")
    limits(p)

    p = add("solve-bounded", cmd_solve_bounded, "exact search under per-color bounds")
    p.add_argument("pattern")
    p.add_argument("--bound", type=_bound, action="append")
    p.add_argument("--total", type=int)
    p.add_argument("-o", "--output")
    limits(p)

    p = add("roundtrip", cmd_roundtrip, "full pipeline check on a formula")
    p.add_argument("cnf")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--toy", action="store_true", help="blow up a 4x4 toy pattern (default)")
    mode.add_argument("--full", action="store_true", help="blow up the formula's own pattern and stream it")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-dir")

    p = add("render", cmd_render, "draw a pattern or qdesc")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=["ppm", "svg", "png"])
    p.add_argument("--cell", type=int, default=1)
    p.add_argument("--max-pixels", type=int, default=render.DEFAULT_MAX_PIXELS)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, ParseError, textio.FormatError, TooLarge, render.RenderTooLarge) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TileError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
