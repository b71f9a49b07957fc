from __future__ import annotations

import json
import subprocess
import sys

import pytest

from dsgeom.cli import build_parser, main
from dsgeom.config import RunConfig
from dsgeom.geodesic import read_csv
from dsgeom.verify import COMMANDS

SMALL = [
    "--radii", "1", "--samples", "10", "--planes", "20", "--killing-points", "10",
    "--table-points", "8", "--roundtrip-points", "50", "--pullback-points", "20",
    "--geodesics", "2", "--tau-end", "0.5", "--r-count", "10", "--bochner-radii", "3",
]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_every_field_has_a_flag():
    parser = build_parser()
    ns = parser.parse_args(["charts", "--tau-end", "2", "--tau_end", "3"])
    assert ns.tau_end == "3"
    for name in RunConfig().as_dict():
        ns = parser.parse_args(["charts", f"--{name}", "1"])
        assert getattr(ns, name) == "1"


@pytest.mark.parametrize("command", ["verify-christoffel", "curvature", "beltrami", "charts", "lct"])
def test_commands_pass_small(capsys, command):
    code, out, _ = run(capsys, command, *SMALL)
    doc = json.loads(out)
    assert code == 0, [c for c in doc["checks"] if c["status"] == "fail"]
    assert doc["command"] == command
    assert doc["summary"]["fail"] == 0
    assert all(c["anchor"] for c in doc["checks"])
    ids = [c["id"] for c in doc["checks"]]
    assert len(ids) == len(set(ids))


def test_verify_christoffel_radius_two(capsys):
    code, out, _ = run(capsys, "verify-christoffel", "--radii", "2", "--samples", "20")
    assert code == 0
    doc = json.loads(out)
    assert doc["checks"][0]["id"] == "christoffel.derived.R=2"
    assert doc["summary"]["reported"] == 1


def test_coarse_step_is_config_error(capsys):
    code, out, err = run(capsys, "verify-christoffel", "--step", "1e-1")
    assert code == 2 and out == ""
    assert "step must lie in" in err


def test_killing_rows_present(capsys):
    code, out, _ = run(capsys, "verify-killing", *SMALL)
    doc = json.loads(out)
    assert code == 0
    assert sorted(doc["sections"]["table1"]) == sorted(f"row{i}" for i in range(1, 11))
    gens = [c for c in doc["checks"] if c["id"].startswith("killing.generator.")]
    assert len(gens) == 10 and all(c["status"] == "pass" for c in gens)


def test_killing_statuses_seed_independent(capsys):
    outcomes = []
    for seed in ("0", "5"):
        _, out, _ = run(capsys, "verify-killing", *SMALL, "--seed", seed)
        outcomes.append([(c["id"], c["status"]) for c in json.loads(out)["checks"]])
    assert outcomes[0] == outcomes[1]


def test_geodesic_writes_csv(capsys, tmp_path):
    csv = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "geodesic", "--tau-end", "0.5", "--dt", "1e-2", "--csv", str(csv))
    assert code == 0
    header, data = read_csv(csv)
    assert header[-1] == "Q10" and data.shape[1] == 20
    assert json.loads(out)["sections"]["trajectory"]["rows"] == len(data)


def test_geodesic_zero_velocity(capsys, tmp_path):
    csv = tmp_path / "still.csv"
    code, out, _ = run(capsys, "geodesic", "--v0", "0 0 0 0", "--tau-end", "1", "--dt", "1e-2", "--csv", str(csv))
    assert code == 0
    _, data = read_csv(csv)
    assert (data[:, 1:5] == data[0, 1:5]).all()
    assert (data[:, 9] == 0).all()


def test_geodesic_printed_chart_has_no_charges(capsys, tmp_path):
    csv = tmp_path / "p.csv"
    code, out, _ = run(
        capsys, "geodesic", "--chart", "static-47-printed", "--tau-end", "0.2", "--dt", "1e-2", "--csv", str(csv)
    )
    doc = json.loads(out)
    assert code == 0
    assert "charges" in doc["sections"]
    assert read_csv(csv)[0][-1] == "norm"


def test_geodesic_wrong_dimension(capsys):
    code, _, err = run(capsys, "geodesic", "--chart", "schrodinger-40")
    assert code == 2 and "coordinates" in err


def test_out_file_and_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[geometry]\nradius = 2\n[sampling]\nroundtrip_points = 30\npullback_points = 10\n")
    out = tmp_path / "report.json"
    code, stdout, _ = run(capsys, "beltrami", "--config", str(cfg), "--out", str(out))
    assert code == 0 and stdout == ""
    doc = json.loads(out.read_text())
    assert doc["config"]["radius"] == 2.0 and doc["config"]["roundtrip_points"] == 30


def test_console_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "dsgeom.cli", "charts", "--samples", "5"], capture_output=True, text=True, check=False
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["command"] == "charts"


def test_command_table():
    assert set(COMMANDS) == {
        "verify-christoffel", "verify-killing", "curvature", "lct", "beltrami", "charts", "geodesic",
    }
