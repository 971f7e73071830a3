from pathlib import Path

import pytest

from support import brute_force_models, stripes_pattern, stripes_tiles, random_formula
from tilepats import textio
from tilepats.cli import main
from tilepats.core import verify_stream
from tilepats.sat import dump_dimacs
from tilepats.superreduce import parse_qdesc, toy_source

XXX = "p cnf 1 1\n1 1 1 0\n"
CONTRA = "p cnf 1 2\n1 0\n-1 0\n"


@pytest.fixture
def work(tmp_path):
    def put(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    put.dir = tmp_path
    return put


def run(*argv):
    return main([str(a) for a in argv])


def test_sat_solve(work, capsys):
    assert run("sat-solve", work("f.cnf", XXX)) == 0
    assert "x1=1" in capsys.readouterr().out
    assert run("sat-solve", work("g.cnf", CONTRA)) == 1


def test_parse_error_exit_code(work):
    assert run("sat-solve", work("bad.cnf", "p cnf 2 1\n1 -2 1 2 0\n")) == 2


def test_missing_file_exit_code(work):
    assert run("sat-solve", work.dir / "nope.cnf") == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["verify"])
    assert err.value.code == 2


def test_reduction_pipeline(work, capsys):
    cnf = work("f.cnf", XXX)
    d = work.dir
    assert run("sat2pats", cnf, "-o", d / "p.pattern", "--atlas", d / "atlas.txt") == 0
    assert "width=62" in capsys.readouterr().out
    assert run("witness-pats", cnf, "--solve", "-o", d / "t.tileset") == 0
    assert run("verify", d / "t.tileset", d / "p.pattern", "--stream") == 0
    assert run("extract-assignment", d / "t.tileset", cnf) == 0
    assert capsys.readouterr().out.strip().endswith("x1=1")
    assert run("assemble", d / "t.tileset", "--width", 62, "--height", 6, "-o", d / "again.pattern") == 0
    assert (d / "again.pattern").read_text() == (d / "p.pattern").read_text()
    assert "x1.white" in (d / "atlas.txt").read_text()


def test_witness_from_assignment_file(work):
    cnf = work("f.cnf", XXX)
    assert run("witness-pats", cnf, "--assignment", work("a.txt", "x1=1\n"), "-o", work.dir / "t.tileset") == 0
    assert run("witness-pats", cnf, "--assignment", work("b.txt", "x1=0\n"), "-o", work.dir / "u.tileset") == 1
    assert run("witness-pats", work("g.cnf", CONTRA), "--solve", "-o", work.dir / "v.tileset") == 1


def test_verify_perturbed_pattern(work, capsys):
    ts = work("t.tileset", textio.dump_tileset(stripes_tiles()))
    lines = textio.dump_pattern(stripes_pattern()).splitlines()
    assert run("verify", ts, work("ok.pattern", "\n".join(lines) + "\n")) == 0
    lines[2] = "3" + lines[2][1:]
    assert run("verify", ts, work("bad.pattern", "\n".join(lines) + "\n")) == 1
    assert "(1, 2)" in capsys.readouterr().err


def test_blowup_pipeline(work, capsys, rng):
    ts, p = toy_source(3, 3, rng)
    d = work.dir
    tsf, pf = work("t.tileset", textio.dump_tileset(ts)), work("p.pattern", textio.dump_pattern(p))
    assert run("pats2mbpats", pf, "-o", d / "q.qdesc", "--dense", d / "q.pattern") == 0
    assert "m_b=1" in capsys.readouterr().out
    assert run("witness-mbpats", tsf, pf, "-o", d / "theta.tileset") == 0
    assert run("verify", d / "theta.tileset", d / "q.qdesc") == 0
    assert run("verify", d / "theta.tileset", d / "q.pattern") == 0
    assert run("decode-supertiles", d / "theta.tileset", d / "q.qdesc", "-o", d / "t2.tileset") == 0
    decoded = textio.parse_tileset((d / "t2.tileset").read_text())
    assert verify_stream(decoded, p)
    q = parse_qdesc((d / "q.qdesc").read_text())
    assert q.q == textio.parse_pattern((d / "q.pattern").read_text())


def test_pats2mbpats_pf_strict(work, capsys):
    cnf = work("f.cnf", XXX)
    d = work.dir
    run("sat2pats", cnf, "-o", d / "p.pattern")
    capsys.readouterr()
    assert run("pats2mbpats", d / "p.pattern", "-o", d / "q.qdesc", "--strict-membership", cnf) == 0
    out = capsys.readouterr().out
    assert "m_b=1" in out and "m_w=1200" in out and "m_g=559" in out
    assert run("pats2mbpats", d / "p.pattern", "-o", d / "q.qdesc", "--dense", d / "q.pattern") == 2
    assert not (d / "q.pattern").exists()


def test_pats2mbpats_precondition(work):
    p = work("u.pattern", "pattern 2 2\nc c\nc c\n")
    assert run("pats2mbpats", p, "-o", work.dir / "q.qdesc") == 1


def test_solvers(work, capsys):
    p = work("stripes.pattern", textio.dump_pattern(stripes_pattern()))
    assert run("solve-min", p, "-o", work.dir / "min.tileset") == 0
    assert "min_m=3" in capsys.readouterr().out
    assert verify_stream(textio.parse_tileset((work.dir / "min.tileset").read_text()), stripes_pattern())
    assert run("solve-min", p, "--cap", 2) == 1
    assert run("solve-bounded", p, "--bound", "1=1", "--bound", "2=1", "--bound", "3=1") == 0
    assert run("solve-bounded", p, "--bound", "1=0") == 1
    assert run("solve-bounded", p, "--total", 2) == 1
    assert run("solve-bounded", p) == 2


def test_roundtrip(work, capsys):
    report = work.dir / "report"
    assert run("roundtrip", work("f.cnf", XXX), "--report-dir", report) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    names = {p.name for p in report.iterdir()}
    assert {"roundtrip.tsv", "pattern_pf.png", "source_pattern.png", "blowup_q.png"} <= names
    rows = (report / "roundtrip.tsv").read_text().splitlines()
    assert rows[0].split("\t")[:2] == ["step", "status"]


def test_roundtrip_unsat(work):
    assert run("roundtrip", work("g.cnf", CONTRA)) == 1


def test_roundtrip_random_formulas(work, rng):
    for i in range(6):
        f = random_formula(rng, 2, 2)
        path = work(f"r{i}.cnf", dump_dimacs(f))
        assert run("roundtrip", path, "--seed", i) == (0 if brute_force_models(f) else 1)
        assert run("sat2pats", path, "-o", work.dir / f"r{i}.pattern") == 0
        assert textio.parse_pattern((work.dir / f"r{i}.pattern").read_text()).height == 6


def test_render_deterministic(work):
    p = work("stripes.pattern", textio.dump_pattern(stripes_pattern()))
    a, b = work.dir / "a.ppm", work.dir / "b.ppm"
    assert run("render", p, "-o", a, "--cell", 3) == 0
    assert run("render", p, "-o", b, "--cell", 3) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().startswith(b"P6\n15 9\n255\n")
    assert run("render", p, "-o", work.dir / "c.svg") == 0
    assert Path(work.dir / "c.svg").read_text().startswith("<svg")
    assert run("render", p, "-o", work.dir / "d.ppm", "--max-pixels", 10) == 2
    assert not (work.dir / "d.ppm").exists()
