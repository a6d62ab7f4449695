import json
import subprocess
import sys
from pathlib import Path

import pytest

from intersective.cli import SPEC_VERSION, run
from intersective.intersectivity import Status, Verdict, check_certificate, roots_mod
from intersective.ideal_arith import parse_ideal
from intersective.number_field import parse_field
from intersective.poly_ring import parse_poly

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_version(capsys):
    assert run(["--version"]) == 0
    assert capsys.readouterr().out.strip() == SPEC_VERSION


def test_check_intersective(capsys):
    code, out, _ = call(capsys, "check", "x^2+1", "--field", "Q(sqrt -1)", "--bound", "200")
    assert code == 0
    data = json.loads(out)
    assert data["status"] == "INTERSECTIVE_UP_TO" and data["certificate"]["exact_root"] == "0+1*w"


@pytest.mark.parametrize("poly", ["x^2+2", "x^2-2", "x^2+3"])
def test_check_witness_survives_round_trip(capsys, poly):
    code, out, err = call(capsys, "check", poly, "--bound", "100")
    assert code == 2 and "NOT_INTERSECTIVE" in err
    data = json.loads(out)
    F = parse_field(data["field"])
    v = Verdict.from_json(data, F)
    p = parse_poly(data["poly"], F)
    assert check_certificate(v, p)
    # independent look: no root at the witness level
    I = parse_ideal(data["witness"], F)
    assert roots_mod(p, I) == []


def test_check_x2_plus_2_witness_is_five(capsys):
    _, out, _ = call(capsys, "check", "x^2+2", "--bound", "100")
    assert json.loads(out)["witness"] == "[[5,0]]"


def test_decompose_output(capsys):
    code, out, _ = call(capsys, "decompose", "x^2+1", "--field", "Q(sqrt -1)")
    assert code == 0
    assert json.loads(out)["components"] == ["a^2-b^2+1", "2*a*b"]


def test_certify(capsys):
    code, out, _ = call(capsys, "certify", "quad-const", "--c", "-4")
    assert code == 0 and json.loads(out)["status"] == "CERTIFIED_INTERSECTIVE"
    code, out, _ = call(capsys, "certify", "three-quadratics", "--alpha", "2+1*w",
                        "--beta", "2+3*w")
    assert code == 0 and json.loads(out)["status"] == "CERTIFIED_INTERSECTIVE"
    code, out, _ = call(capsys, "certify", "three-quadratics", "--alpha", "1+2*w",
                        "--beta", "1+4*w")
    assert code == 1 and json.loads(out)["status"] == "CONDITIONS_NOT_MET"


def test_joint(capsys):
    code, out, _ = call(capsys, "joint", "x", "x+1", "--bound", "50")
    assert code == 2 and json.loads(out)["witness"] == "[[2,0]]"
    code, _, _ = call(capsys, "joint", "x^2", "x^3", "--bound", "50")
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["check", "x^2+", "--bound", "10"],
    ["check", "x^2+1", "--field", "Q(sqrt 4)", "--bound", "10"],
    ["certify", "three-quadratics", "--alpha", "2", "--beta", "3"],
    ["scan-returns", "--config", "/nonexistent.json"],
    ["frobnicate"],
])
def test_errors_exit_one(capsys, argv):
    assert run(argv) == 1


def test_missing_seed_is_an_error(capsys, tmp_path):
    cfg = json.loads((CONFIGS / "kronecker_two_polys_mc.json").read_text())
    del cfg["seed"]
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    code, _, err = call(capsys, "scan-returns", "--config", str(path))
    assert code == 1 and "seed" in err
    cfg = {"mode": "scan", "set": {"random": {"density": 0.5}}, "polys": ["x"], "field": "Q",
           "window_set": {"radius": 5, "dim": 1}, "window_u": {"radius": 2, "dim": 1},
           "threshold": 0.1}
    path.write_text(json.dumps(cfg))
    assert run(["density", "--config", str(path)]) == 1


def test_scan_returns_config(capsys, tmp_path):
    out = tmp_path / "scan.jsonl"
    code = run(["scan-returns", "--config", str(CONFIGS / "kronecker_golden_square.json"),
                "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 20001 + 1
    summary = json.loads(lines[-1])["summary"]
    assert summary["good_count"] > 0 and summary["syndeticity_gap"] <= 200
    assert json.loads(lines[10000])["u"] == [0] and json.loads(lines[10000])["value"] == 0.5


def test_simulate_and_ghk_configs(capsys, tmp_path):
    code, out, _ = call(capsys, "simulate", "--config", str(CONFIGS / "heisenberg_square.json"))
    assert code == 0
    rows = [json.loads(l) for l in out.splitlines()]
    assert len(rows) == 6 and rows[0]["method"] == "MONTE_CARLO"
    assert abs(rows[0]["value"] - 0.125) <= 4 * rows[0]["stderr"]
    code, out, _ = call(capsys, "ghk", "--config", str(CONFIGS / "ghk_cosine.json"), "--k", "2")
    res = json.loads(out)
    assert code == 0 and abs(res["estimate"] - 0.125 ** 0.25) <= 0.05
    assert res["replicates"] == 4 and 0 < res["stderr"] < 0.05


def test_density_configs(capsys):
    code, out, _ = call(capsys, "density", "--config", str(CONFIGS / "partition_mod_1_plus_i.json"))
    assert code == 0
    summary = json.loads(out.splitlines()[-1])["summary"]
    assert summary["cell"] == 0 and summary["good_count"] == 41
    code, out, _ = call(capsys, "density", "--config", str(CONFIGS / "gaussian_random.json"))
    assert code == 0
    summary = json.loads(out.splitlines()[-1])["summary"]
    assert summary["components"] == ["a^2-b^2+1", "2*a*b"]


def test_installed_entry_point():
    proc = subprocess.run([sys.executable, "-m", "intersective.cli", "check", "x^2-3",
                           "--bound", "30"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stdout)["status"] == "NOT_INTERSECTIVE"
