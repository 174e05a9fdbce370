import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from dualpair.cli import find_path, main, parse_grid, scan_rows, transform
from dualpair.errors import DocumentError, NoPath
from dualpair.io import MODELS, PointDocument
from dualpair.slices import dual_spectrum
from dualpair.spaces import Coupling, canonicalize_sutherland, sutherland_distance
from dualpair.verify import sample_p2

C21 = Coupling(2, 1.0)


@pytest.fixture
def worked(tmp_path):
    doc = PointDocument(C21, "P", canonicalize_sutherland([np.pi / 4, -np.pi / 4], [0.0, 0.0]))
    path = tmp_path / "worked.json"
    path.write_text(doc.dumps())
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_transform_worked_point(capsys, worked, tmp_path):
    code, out, _ = run(capsys, "transform", worked, "--to", "PhatC")
    assert code == 0
    doc = PointDocument.loads(out)
    assert np.allclose(dual_spectrum(doc.point, C21), [0.7071067811865476, -0.7071067811865476])
    dual = tmp_path / "dual.json"
    dual.write_text(out)
    code, out, _ = run(capsys, "transform", dual, "--to", "P")
    assert code == 0 and sutherland_distance(PointDocument.loads(out).point, PointDocument.loads(worked.read_text()).point) < 1e-10


def test_transform_via_coverings(rng):
    c = Coupling(3, 0.8)
    doc = PointDocument(c, "P2-I", sample_p2(rng, c, "I"))
    direct = transform(doc, "PhatC").point
    stepped = transform(transform(transform(doc, "P1-I"), "P"), "PhatC").point
    assert direct.distance(stepped) < 1e-10
    assert [e[1] for e in find_path("P2-I", "PhatC")] == ["P1-I", "P", "PhatC"]


def test_every_model_reaches_itself():
    for m in MODELS:
        assert find_path(m, m) == []


def test_no_lift_up_a_covering(capsys, worked):
    with pytest.raises(NoPath):
        find_path("P", "P1-I")
    code, _, err = run(capsys, "transform", worked, "--to", "P1-I")
    assert code == 2 and "no map" in err


def test_usage_errors(capsys, worked, tmp_path):
    assert run(capsys, "transform", worked)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "verify", "--suite", "nope")[0] == 2
    assert run(capsys, "transform", tmp_path / "missing.json", "--to", "P")[0] == 2
    assert run(capsys, "transform", worked, "--to", "P", "--coupling", "3,1")[0] == 2
    assert run(capsys, "transform", worked, "--to", "P", "--coupling", "3")[0] == 2
    assert run(capsys, "verify", "--jobs", "0")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run(capsys, "inspect", bad)[0] == 2


def test_numerical_failure_code(capsys, tmp_path):
    # a level point that is off the constraint surface
    lvl = {"schemaVersion": 1, "coupling": {"n": 2, "x": 1}, "model": "Level",
           "coordinates": {"g": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]], "J": [[[0, -2], [0, 0]], [[0, 0], [0, 0]]], "v": [[1, 0], [1, 0]]}}
    p = tmp_path / "lvl.json"
    p.write_text(json.dumps(lvl))
    code, _, err = run(capsys, "transform", p, "--to", "P")
    assert code == 3 and "numerical failure" in err


def test_evolve_k1_rotation(capsys, worked):
    code, out, _ = run(capsys, "evolve", worked, "--family", "H", "--k", "1", "--t", "1", "--samples", "5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5
    q1 = np.array([float(r["q_1"]) for r in rows])
    t = np.array([float(r["t"]) for r in rows])
    assert np.all(np.diff(q1) > 0) and np.allclose(q1 - q1[0], t)
    for name in ("H1", "H2"):
        col = np.array([float(r[name]) for r in rows])
        assert np.max(np.abs(col - col[0])) < 1e-9


def test_evolve_t0_single_row(capsys, worked):
    code, out, _ = run(capsys, "evolve", worked, "--family", "Hhat", "--k", "1", "--t", "0")
    assert code == 0 and len(out.strip().splitlines()) == 2


def test_evolve_to_file(capsys, worked, tmp_path):
    target = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "evolve", worked, "--family", "Hhat", "--k", "-2", "--t", "0.5", "--out", target)
    assert code == 0 and out == "" and target.read_text().startswith("t,re_z_1")


def test_scan_hrs(capsys):
    code, out, _ = run(capsys, "scan", "--coupling", "2,1", "--quantity", "HRS", "--grid", "0.5:3:6")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["gap", "phat_1", "phat_2", "HRS"]
    # gap 0.5 lies outside the chamber
    gaps = [float(r[0]) for r in rows[1:]]
    assert min(gaps) >= 1.0 and len(rows) == 6
    at2 = [float(r[3]) for r in rows[1:] if float(r[0]) == 2.0]
    assert np.isclose(at2[0], np.sqrt(3), atol=1e-12)


def test_scan_empty_grid(capsys):
    code, out, _ = run(capsys, "scan", "--coupling", "2,1", "--quantity", "H2", "--grid", "")
    assert code == 0 and out.strip() == "gap,phat_1,phat_2,H2"


def test_scan_rows_and_grid():
    assert parse_grid("1:2:3").tolist() == [1.0, 1.5, 2.0] and parse_grid("1, 2").tolist() == [1.0, 2.0]
    with pytest.raises(DocumentError):
        parse_grid("1:2")
    header, rows = scan_rows(Coupling(3, 1.0), "absz1", np.array([1.0, 2.0]))
    assert header[-1] == "absz1" and np.isclose(rows[0][-1], 0) and np.isclose(rows[1][-1], 1)
    with pytest.raises(DocumentError):
        scan_rows(C21, "absz2", np.array([2.0]))
    with pytest.raises(DocumentError):
        scan_rows(C21, "Hhat3", np.array([2.0]))


def test_inspect(capsys, worked):
    code, out, _ = run(capsys, "inspect", worked)
    info = json.loads(out)
    assert code == 0 and info["on_shell"] and info["moment_residual"] < 1e-12
    assert np.isclose(info["invariants"]["H1"], 0)


def test_verify_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "verify", "--suite", "gaps", "--seed", "7", "--out", a)[0] == 0
    assert run(capsys, "verify", "--suite", "gaps", "--seed", "7", "--out", b)[0] == 0
    assert a.read_text() == b.read_text()
    assert all(r["pass"] and r["seed"] == 7 for r in json.loads(a.read_text()))


def test_module_entry_point(worked):
    res = subprocess.run([sys.executable, "-m", "dualpair", "inspect", str(worked)], capture_output=True, text=True)
    assert res.returncode == 0 and '"on_shell": true' in res.stdout
