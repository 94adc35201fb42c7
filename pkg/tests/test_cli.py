import json
import math
import subprocess
import sys

import pytest

from bubblestab import cli, report


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_geometry_json(capsys):
    code, out, _ = run(capsys, "geometry", "--r1", "0.5", "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert abs(rec["theta0"] - math.pi / 6) <= 1e-12
    assert rec["polygon_area_rel_error"] < 1e-5


def test_geometry_from_masses_and_equal(capsys):
    m1, m2 = 7 * math.pi / 24 - math.sqrt(3) / 4, 2 * math.pi / 3 + math.sqrt(3) / 2
    code, out, _ = run(capsys, "geometry", "--m1", repr(m1), "--m2", repr(m2))
    assert code == 0 and json.loads(out)["r1"] == pytest.approx(0.5, abs=1e-10)
    code, out, _ = run(capsys, "geometry", "--equal-radius", "1")
    rec = json.loads(out)
    assert code == 0 and rec["r0"] is None
    assert rec["perimeter"] == pytest.approx(8 * math.pi / 3 + math.sqrt(3), abs=1e-12)


def test_poincare_example(capsys):
    code, out, _ = run(capsys, "poincare", "--theta", "0.7853981633974483", "--s", "1",
                       "--modes", "64")
    assert code == 0
    assert abs(json.loads(out)["value"] - 2.329870) <= 1e-4


def test_coercivity_example(tmp_path, capsys):
    target = tmp_path / "scan.csv"
    code, out, _ = run(capsys, "coercivity", "--grid", "1000", "--out", str(target))
    assert code == 0
    star = float(out.split("beta_star=")[1].split()[0])
    assert star > 0
    lines = target.read_text().splitlines()
    assert lines[0] == "r,b1,b2,b3,det,det_over_r,eigen_min" and len(lines) > 1000
    assert target.with_suffix(".svg").read_text().startswith("<svg")


def test_coercivity_svg_to_stdout(capsys):
    code, out, _ = run(capsys, "coercivity", "--grid", "200", "--format", "svg")
    assert code == 0 and 'viewBox="0 0 800 600"' in out


def test_perturb_audit_interp(capsys):
    code, out, _ = run(capsys, "perturb", "--r1", "0.3", "--grid", "512", "--samples", "512")
    rec = json.loads(out)
    assert code == 0 and rec["delta"] >= -1e-9 and rec["volume_error"] < 1e-10
    code, out, _ = run(capsys, "audit", "--equal-radius", "1", "--n", "20")
    assert code == 0 and json.loads(out)["failures"] == []
    code, out, _ = run(capsys, "interp", "--n", "100")
    assert code == 0 and json.loads(out)["violations"] == 0


def test_json_output_round_trips(capsys):
    _, out, _ = run(capsys, "perturb", "--grid", "512", "--samples", "512")
    assert report.to_json(json.loads(out)) == out


def test_outputs_are_deterministic(capsys):
    a = run(capsys, "perturb", "--grid", "512", "--samples", "512", "--seed", "3")[1]
    b = run(capsys, "perturb", "--grid", "512", "--samples", "512", "--seed", "3")[1]
    assert a == b


@pytest.mark.parametrize("argv", [
    ["geometry", "--r1", "1.5"],
    ["geometry", "--r1", "0.5", "--equal-radius", "1"],
    ["geometry", "--m1", "1"],
    ["geometry", "--format", "csv"],
    ["poincare", "--theta", "4"],
    ["sweep", "--n", "5"],
    ["perturb", "--t-range", "1e-2,1"],
    ["nosuch"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 2


def test_domain_error_exit_2(capsys):
    code, out, err = run(capsys, "geometry", "--m1", "2", "--m2", "1e300")
    assert code == 2 and out == "" and "supported range" in err


def test_failed_check_exit_1(capsys, monkeypatch):
    def broken(cfg):
        raise cli.CheckFailed("forced", {"x": 1.0})

    monkeypatch.setitem(cli.COMMANDS, "geometry", broken)
    code, out, _ = run(capsys, "geometry")
    rec = json.loads(out)
    assert code == 1 and rec["status"] == "failure" and rec["result"] == {"x": 1.0}


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "bubblestab", "geometry", "--r1", "0.25"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["r1"] == 0.25
    assert "geometry ok" in res.stderr
