import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from hoffman import NumericalFailure, box_system, builtin, hof_global
from hoffman import cli
from hoffman.cli import dump_system, parse_system, run

SQ2 = math.sqrt(2)


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def _json(*argv):
    code, out, err = _run(*argv)
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def box_file(tmp_path):
    p = tmp_path / "box.json"
    p.write_text(json.dumps(dump_system(box_system())))
    return p


@pytest.fixture
def exa43_files(tmp_path):
    fsys, b = builtin("example-4-3").discretize(0.1)
    p = tmp_path / "exa43-grid.json"
    p.write_text(json.dumps(dump_system(fsys)))
    q = tmp_path / "exa43-b.json"
    q.write_text(json.dumps(list(b)))
    return p, q


def test_global_box(box_file):
    rep = _json("global", box_file)
    assert rep["value"] == pytest.approx(SQ2, rel=1e-15)
    assert rep["subset"]["indices"] == [0, 2]
    assert rep["certificate"] == pytest.approx([SQ2 / 2, 0, SQ2 / 2, 0])
    assert rep["tool"] == "hoffman" and "version" in rep
    assert set(rep["tolerances"]) == {"tol_active", "tol_strict", "tol_rank"}


def test_global_exhaustive_route(box_file):
    rep = _json("global", box_file, "--exhaustive")
    assert rep["routes"]["exhaustive"] == pytest.approx(rep["routes"]["independent"], rel=1e-12)


def test_calmness_spiral(exa43_files):
    sys_file, rhs_file = exa43_files
    rep = _json("calmness", sys_file, "--rhs", rhs_file, "--point", "1,-2")
    assert rep["value"] == pytest.approx(math.sqrt(5), rel=1e-12)


def test_builtin_with_grid(tmp_path):
    p = tmp_path / "b.json"
    p.write_text(json.dumps({"builtin": "example-4-3"}))
    rep = _json("calmness", p, "--grid-step", "0.1", "--point", "1,-2")
    assert rep["value"] == pytest.approx(math.sqrt(5), rel=1e-12)
    rep = _json("global", p, "--grid-step", "0.1")
    assert rep["value"] >= 10


def test_at_and_vertices(box_file):
    rep = _json("at", box_file, "--rhs", "1,1,1,1")
    assert rep["value"] == pytest.approx(SQ2)
    rep = _json("vertices", box_file, "--rhs", "1,1,1,1")
    assert rep["count"] == 4


def test_verify(box_file):
    rep = _json("verify", box_file, "--rhs", "1,1,1,1", "--samples", 3000, "--seed", 1)
    assert rep["seed"] == 1
    assert rep["mc_ratio_sup"]["value"] <= rep["hof_at"] + 1e-9
    assert rep["chain_check"]["passed"]
    assert rep["chain_check"]["max_boundary_clm"] == pytest.approx(SQ2)


def test_lab_and_grid_study():
    rep = _json("lab", "--fixture", "truncated-halfline", "--y-bar", "-0.5", "--schedule", "0.1,0.01")
    assert rep["hof"] == pytest.approx(1.0, abs=0.05)
    rep = _json("grid-study", "--builtin", "example-4-3", "--steps", "0.5,0.1", "--point", "1,-2")
    assert [r["step"] for r in rep["table"]] == [0.5, 0.1]
    assert all(r["clm"] == pytest.approx(math.sqrt(5)) for r in rep["table"])


def test_infinity_is_written_as_string(tmp_path):
    p = tmp_path / "z.json"
    p.write_text(json.dumps({"n": 1, "rows": [{"label": "z", "a": [0.0]}]}))
    rep = _json("global", p)
    assert rep["value"] == 0.0
    assert cli._num(float("inf")) == "inf"


# ---------------------------------------------------------------- exit codes

def test_missing_file_exit_2():
    code, out, err = _run("global", "missing.json")
    assert code == 2 and out == "" and "missing.json" in err


def test_bad_input_exit_2(tmp_path, box_file):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert _run("global", p)[0] == 2
    assert _run("calmness", box_file, "--rhs", "1,1,1,1", "--point", "5,5")[0] == 2  # infeasible point
    assert _run("at", box_file, "--rhs", "1,1")[0] == 2  # wrong length
    assert _run("lab", "--fixture", "nope")[0] == 2
    assert _run("nosuchcommand")[0] == 2


def test_infeasible_exit_3(tmp_path):
    p = tmp_path / "inf.json"
    p.write_text(json.dumps({"n": 1, "rows": [{"a": [1.0]}, {"a": [-1.0]}], "b": [-1.0, -1.0]}))
    code, out, err = _run("at", p)
    assert code == 3 and "infeasible" in err


def test_size_limit_exit_4(box_file):
    assert _run("global", box_file, "--cap", 1)[0] == 4


def test_numerical_failure_exit_5(box_file, monkeypatch):
    def boom(*a, **k):
        raise NumericalFailure("simulated breakdown")

    monkeypatch.setattr(cli, "hof_global", boom)
    code, _, err = _run("global", box_file)
    assert code == 5 and "simulated" in err


# ------------------------------------------------------- determinism and I/O

def test_byte_identical_reports(box_file):
    args = ("verify", box_file, "--rhs", "1,1,1,1", "--samples", 2000, "--seed", 3)
    assert _run(*args)[1] == _run(*args)[1]
    args = ("lab", "--fixture", "staircase", "--schedule", "0.1,0.01", "--seed", 4)
    assert _run(*args)[1] == _run(*args)[1]


def test_dump_normalized_round_trip(tmp_path):
    p = tmp_path / "b.json"
    p.write_text(json.dumps({"builtin": "example-4-3"}))
    code, out, _ = _run("global", p, "--grid-step", "0.1", "--dump-normalized")
    assert code == 0
    doc = json.loads(out)
    sys2, b2 = parse_system(doc)
    fsys, b = builtin("example-4-3").discretize(0.1)
    assert np.array_equal(sys2.A, fsys.A) and np.array_equal(b2, b)
    assert sys2.labels == fsys.labels and sys2.norm is fsys.norm
    # the dump itself is a fixed point
    q = tmp_path / "n.json"
    q.write_text(out)
    assert _run("global", q, "--dump-normalized")[1] == out
    assert float(hof_global(sys2).value) == _json("global", q)["value"]


def test_tabulated_segments(tmp_path):
    t = np.linspace(0, math.pi, 400)
    samples = np.c_[t, t * np.cos(t), t * np.sin(t), t].tolist()
    doc = {"n": 2, "segments": [{"lo": 0.0, "hi": samples[-1][0], "samples": samples}],
           "extra_rows": [{"label": "t=4", "a": [1, 0], "b": 1}, {"label": "t=5", "a": [-1, -1], "b": 1}]}
    p = tmp_path / "tab.json"
    p.write_text(json.dumps(doc))
    rep = _json("calmness", p, "--grid-step", "0.1", "--point", "1,-2")
    assert rep["value"] == pytest.approx(math.sqrt(5), rel=1e-9)
    bad = dict(doc, n=3)
    p.write_text(json.dumps(bad))
    assert _run("global", p, "--grid-step", "0.1")[0] == 2


def test_module_entry_point(box_file):
    res = subprocess.run([sys.executable, "-m", "hoffman", "global", str(box_file)],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["value"] == pytest.approx(SQ2)
