import csv
import hashlib
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from dartreason.cli import main


def read_csv(path):
    lines = path.read_text().splitlines()
    header = [ln for ln in lines if ln.startswith("#")]
    rows = list(csv.DictReader(ln for ln in lines if not ln.startswith("#")))
    return header, rows


def gcurve_args(out, *extra):
    return ["g-curve", "--dart", "uniform(0,2)", "--payoff", "squarewave",
            "--d-min", "1", "--d-max", "1.5", "--steps", "2", "--out", str(out), *extra]


def test_g_curve_writes_csv_and_manifest(tmp_path, capsys):
    out = tmp_path / "g.csv"
    assert main(gcurve_args(out)) == 0
    header, rows = read_csv(out)
    assert any(h.startswith("# command: dartreason g-curve") for h in header)
    assert any(h.startswith("# version: ") for h in header)
    assert any(h == "# seed: 0" for h in header)
    assert [float(r["d"]) for r in rows] == [1.0, 1.5]
    assert float(rows[1]["g"]) == pytest.approx(2 / 3, abs=1e-5)
    assert set(rows[0]) == {"d", "g", "aim_0", "err_est", "n_evals", "status"}
    assert "increase" in capsys.readouterr().out
    man = json.loads((tmp_path / "g.csv.manifest.json").read_text())
    assert man["digests"][str(out)] == hashlib.sha256(out.read_bytes()).hexdigest()
    assert "wall_time_s" in man


def test_csv_is_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["g-curve", "--dart", "cantor", "--payoff", "kdelta(0.1,0.5)", "--d-min", "0.5",
            "--d-max", "2", "--steps", "3", "--tol", "0.01", "--seed", "3"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    body = lambda p: [ln for ln in p.read_text().splitlines() if not ln.startswith("# command")]
    assert body(a) == body(b)
    assert main(args + ["--out", str(a)]) == 0
    assert a.read_bytes() == (tmp_path / "a.csv").read_bytes()
    first = a.read_bytes()
    assert main(args + ["--out", str(a)]) == 0
    assert a.read_bytes() == first


def test_expect_monotone_exit_codes(tmp_path):
    out = tmp_path / "g.csv"
    assert main(gcurve_args(out, "--expect-monotone")) == 3
    ok = ["g-curve", "--dart", "normal(0,1)", "--payoff", "gaussbump(0,0.5)", "--d-min", "0.5",
          "--d-max", "2", "--steps", "4", "--out", str(out), "--expect-monotone"]
    assert main(ok) == 0


def test_budget_exit_code(tmp_path):
    out = tmp_path / "g.csv"
    args = ["g-curve", "--dart", "cantor", "--payoff", "squarewave", "--d-min", "5",
            "--d-max", "6", "--steps", "2", "--tol", "1e-7", "--max-evals", "1000",
            "--out", str(out), "--expect-monotone"]
    assert main(args) == 4
    _, rows = read_csv(out)
    assert {r["status"] for r in rows} == {"budget"}


@pytest.mark.parametrize("argv", [
    [],
    ["g-curve"],
    ["g-curve", "--dart", "normal(0", "--payoff", "cos", "--d-min", "1", "--d-max", "2", "--out", "x"],
    ["g-curve", "--dart", "disc", "--payoff", "squarewave", "--d-min", "1", "--d-max", "2", "--out", "x"],
    ["g-curve", "--dart", "normal(0,1)", "--payoff", "cos", "--d-min", "2", "--d-max", "1", "--out", "x"],
    ["g-curve", "--dart", "normal(0,1)", "--payoff", "cos", "--d-min", "1", "--d-max", "2",
     "--engine", "magic", "--out", "x"],
    ["g-curve", "--dart", "normal(0,1)", "--payoff", "cos", "--d-min", "1", "--d-max", "2",
     "--tol", "0", "--out", "x"],
    ["--threads", "0", "reproduce", "kdelta"],
    ["reproduce", "nope"],
    ["dartboard-sweep", "--r-min", "5", "--r-max", "500", "--out", "x"],
    ["g-curve", "--dart", "normal(0,1)", "--payoff", "zeroconstruct(normal(0,1))", "--d-min", "1",
     "--d-max", "2", "--out", "x"],
])
def test_usage_errors(argv, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "g.csv"
    cfg.write_text("# defaults\ndart = uniform(0,2)\npayoff = squarewave\nd-min = 1\n"
                   "d_max = 1.5\nsteps = 2\nseed = 5\n")
    assert main(["--config", str(cfg), "g-curve", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert "# seed: 5" in header and len(rows) == 2
    assert main(["--config", str(cfg), "g-curve", "--out", str(out), "--seed", "9", "--steps", "3"]) == 0
    header, rows = read_csv(out)
    assert "# seed: 9" in header and len(rows) == 3


@pytest.mark.parametrize("text", ["bogus = 1\n", "steps = many\n", "engine = magic\n", "no equals\n"])
def test_bad_config(tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    args = ["--config", str(cfg), "g-curve", "--dart", "normal(0,1)", "--payoff", "cos",
            "--d-min", "1", "--d-max", "2", "--out", str(tmp_path / "x.csv")]
    assert main(args) == 2
    assert main(["--config", str(tmp_path / "missing.cfg"), "reproduce", "kdelta"]) == 2


def test_svg_consistent_with_csv(tmp_path):
    out, svg = tmp_path / "g.csv", tmp_path / "g.svg"
    args = ["g-curve", "--dart", "uniform(0,2)", "--payoff", "squarewave", "--d-min", "0.5",
            "--d-max", "2", "--steps", "7", "--out", str(out), "--svg", str(svg)]
    assert main(args) == 0
    _, rows = read_csv(out)
    root = ET.fromstring(svg.read_text())
    ns = "{http://www.w3.org/2000/svg}"
    poly = root.find(f"{ns}polyline")
    pts = [tuple(map(float, p.split(","))) for p in poly.get("points").split()]
    assert len(pts) == len(rows)
    # Screen y is an affine, decreasing image of g.
    g = [float(r["g"]) for r in rows]
    ys = [p[1] for p in pts]
    lo, hi = min(g), max(g)
    for gi, yi in zip(g, ys):
        frac = (gi - lo) / (hi - lo)
        assert yi == pytest.approx(ys[g.index(lo)] + frac * (ys[g.index(hi)] - ys[g.index(lo)]), abs=0.02)
    circles = root.findall(f"{ns}circle")
    increases = sum(1 for a, b in zip(g, g[1:]) if b > a + 1e-5)
    assert len(circles) == increases >= 1
    man = json.loads((tmp_path / "g.csv.manifest.json").read_text())
    assert str(svg) in man["digests"]


def test_reproduce_exit_codes(capsys):
    assert main(["reproduce", "uniform-squarewave"]) == 0
    assert capsys.readouterr().out.count("PASS") == 4
    assert main(["reproduce", "kdelta"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_dartboard_sweep_small(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["--threads", "2", "dartboard-sweep", "--r-min", "3", "--r-max", "30", "--steps", "2",
                 "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert float(rows[0]["best_score"]) == pytest.approx(60.0)
    assert rows[1]["sector_label"] == "20"


def test_console_script_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "dartreason.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
