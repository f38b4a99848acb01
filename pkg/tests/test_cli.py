import csv
import io
import json
import math

import pytest

from gwbaseline import cli
from gwbaseline.core import SR87
from gwbaseline.tables import NUMERIC_COLUMNS
from gwbaseline.trajectory import arm_paths, envelope


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_numeric_columns_exact(capsys):
    code, out, _ = run(capsys, "numeric", "--freq-min", "0.3", "--freq-max", "3", "--freq-points", "4",
                       "--phase-uncertainty", "1e-5", "--workers", "1")
    assert code == 0
    assert out.splitlines()[0] == ",".join(NUMERIC_COLUMNS)
    assert NUMERIC_COLUMNS == ("f_hz", "delta_h", "Q", "N", "NP", "ell", "H_m", "L_m", "z0_m", "v0_mps",
                               "T_s", "TAI_s", "binding", "analytic_delta_h", "gap_rel")
    assert len(rows_of(out)) == 4


def test_numeric_is_byte_identical(tmp_path, capsys):
    args = ["numeric", "--freq-min", "0.05", "--freq-max", "5", "--freq-points", "9",
            "--phase-uncertainty", "1e-5", "--np-max", "20000"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--output", str(a), "--workers", "1"]) == 0
    assert cli.main(args + ["--output", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    # below-cutoff points stay in the table
    first = rows_of(a.read_text())[0]
    assert first["binding"] == "infeasible" and first["delta_h"] == "nan"


def test_json_mirrors_csv(capsys):
    base = ["numeric", "--freq-min", "0.5", "--freq-max", "2", "--freq-points", "3", "--workers", "1"]
    _, out_csv, _ = run(capsys, *base)
    _, out_json, _ = run(capsys, *base, "--format", "json")
    js = json.loads(out_json)
    for r_csv, r_json in zip(rows_of(out_csv), js):
        assert list(r_json) == list(NUMERIC_COLUMNS)
        assert float(r_csv["delta_h"]) == r_json["delta_h"]
        assert int(r_csv["Q"]) == r_json["Q"]


def test_analytic_table(capsys):
    code, out, _ = run(capsys, "analytic", "--freq-min", "0.5", "--freq-max", "0.5", "--freq-points", "1",
                       "--loss-per-pulse", "1.1e-3")
    assert code == 0
    row = rows_of(out)[0]
    assert list(row) == ["f_hz", "NP", "Q", "N", "ell", "regime"]
    assert float(row["NP"]) == pytest.approx(1800, rel=0.02)


def test_analytic_shapes_for_two_losses_two_baselines(capsys):
    for lam in ("1.1e-3", "1e-4"):
        for B in ("100", "2000"):
            _, out, _ = run(capsys, "analytic", "--freq-min", "0.3", "--freq-max", "10", "--freq-points", "40",
                            "--loss-per-pulse", lam, "--baseline-m", B)
            rows = rows_of(out)
            NP = [float(r["NP"]) for r in rows]
            Q = [float(r["Q"]) for r in rows]
            # pulse count flat at the low end, diamonds non-decreasing with frequency
            assert NP[1] == pytest.approx(NP[0], rel=1e-6)
            assert all(b >= a - 1e-12 for a, b in zip(Q, Q[1:]))


def test_regimes_table(capsys):
    _, out100, _ = run(capsys, "regimes", "--freq-min", "0.3", "--freq-max", "10", "--freq-points", "5")
    _, out2k, _ = run(capsys, "regimes", "--freq-min", "0.3", "--freq-max", "10", "--freq-points", "5",
                      "--baseline-m", "2000")
    r100, r2k = rows_of(out100), rows_of(out2k)
    assert {r["f_min_hz"] for r in r100} == {r100[0]["f_min_hz"]}
    assert float(r100[0]["f_min_hz"]) == pytest.approx(0.1107, rel=1e-3)
    for a, b in zip(r100, r2k):
        assert float(b["lambda_bottom_highf"]) < float(a["lambda_bottom_highf"])
    f = [float(r["f_hz"]) for r in r100]
    lam = [float(r["lambda_bottom_highf"]) for r in r100]
    slope = math.log(lam[-1] / lam[0]) / math.log(f[-1] / f[0])
    assert slope == pytest.approx(-1.25, rel=1e-12)


def test_empty_grid_is_a_validation_error(capsys):
    code, out, err = run(capsys, "analytic", "--freq-points", "0")
    assert code != 0 and out == ""
    rec = json.loads(err)
    assert rec["error"] == "validation" and rec["field"] == "grid.points"


def test_config_file_with_overrides(tmp_path, capsys):
    path = tmp_path / "run.toml"
    path.write_text('baseline_m = 2000.0\n[grid]\nfreq_min_hz = 1.0\nfreq_max_hz = 2.0\npoints = 3\n')
    _, out, _ = run(capsys, "regimes", "--config", str(path), "--freq-points", "2")
    rows = rows_of(out)
    assert len(rows) == 2
    assert float(rows[0]["f_min_hz"]) == pytest.approx(math.sqrt(9.80665 / 16000))
    bad = tmp_path / "bad.toml"
    bad.write_text("baseline_m = 100.0\nunknown_key = 1\n")
    code, _, err = run(capsys, "regimes", "--config", str(bad))
    assert code == 2 and json.loads(err)["line"] == 2
    code, _, err = run(capsys, "regimes", "--config", str(tmp_path / "missing.toml"))
    assert code == 2 and json.loads(err)["error"] == "io"


@pytest.fixture
def sweep_file(tmp_path):
    path = tmp_path / "sweep.csv"
    assert cli.main(["numeric", "--freq-min", "0.3", "--freq-max", "3", "--freq-points", "30",
                     "--phase-uncertainty", "1e-5", "--output", str(path), "--workers", "1"]) == 0
    return path


def test_response_minimum_at_resonance(sweep_file, capsys):
    rows = rows_of(sweep_file.read_text())
    for target in (0.3, 2.5):
        rec = min(rows, key=lambda r: abs(float(r["f_hz"]) - target))
        _, out, _ = run(capsys, "response", "--record", str(sweep_file), "--record-f", str(target),
                        "--phase-uncertainty", "1e-5")
        resp = rows_of(out)
        f = [float(r["f_hz"]) for r in resp]
        dh = [float(r["delta_h"]) for r in resp]
        f_res = float(rec["f_hz"])
        k = min(range(len(dh)), key=dh.__getitem__)
        step = max(abs(f[k] - f[k - 1]), abs(f[k + 1] - f[k]))
        assert abs(f[k] - f_res) <= step
        at_res = dh[f.index(f_res)]
        assert at_res == pytest.approx(float(rec["delta_h"]), rel=1e-6)


def test_response_width_shrinks_with_diamonds(sweep_file, capsys):
    rows = rows_of(sweep_file.read_text())

    def half_width(rec):
        _, out, _ = run(capsys, "response", "--record", str(sweep_file), "--record-f", rec["f_hz"],
                        "--phase-uncertainty", "1e-5")
        resp = rows_of(out)
        f = [float(r["f_hz"]) for r in resp]
        dh = [float(r["delta_h"]) for r in resp]
        best = min(dh)
        inside = [x for x, y in zip(f, dh) if y <= 2 * best]
        return (max(inside) - min(inside)) / float(rec["f_hz"])

    q_small = min(rows, key=lambda r: int(r["Q"]))
    q_large = max(rows, key=lambda r: int(r["Q"]))
    assert int(q_large["Q"]) > int(q_small["Q"])
    assert half_width(q_large) < half_width(q_small)


def test_response_mismatch(sweep_file, capsys):
    code, _, err = run(capsys, "response", "--record", str(sweep_file), "--record-f", "1.0",
                       "--baseline-m", "2000", "--phase-uncertainty", "1e-5")
    assert code == 2 and json.loads(err)["error"] == "record_mismatch"
    code, _, err = run(capsys, "response", "--record", str(sweep_file), "--record-f", "1.0",
                       "--freq-min", "5", "--freq-max", "6", "--phase-uncertainty", "1e-5")
    assert code == 2 and "does not contain" in json.loads(err)["message"]
    code, _, err = run(capsys, "response", "--record", str(sweep_file), "--phase-uncertainty", "1e-5")
    assert code == 2


def test_check_round_trip_and_dump(sweep_file, tmp_path, capsys):
    rec = rows_of(sweep_file.read_text())[10]
    dump = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "check", "--Q", rec["Q"], "--N", rec["N"], "--z0", rec["z0_m"],
                       "--v0", rec["v0_mps"], "--freq", rec["f_hz"], "--window-m",
                       repr(float(rec["H_m"]) + 1e-7), "--dump", str(dump), "--step", "1e-3")
    assert code == 0
    report = rows_of(out)[0]
    assert report["feasible"] == "true"
    traj = rows_of(dump.read_text())
    t = [float(r["t_s"]) for r in traj]
    assert all(b > a for a, b in zip(t, t[1:]))
    lo, hi = envelope(arm_paths(int(rec["Q"]), int(rec["N"]), 1 / (2 * float(rec["f_hz"])),
                                float(rec["z0_m"]), float(rec["v0_mps"]), SR87))
    assert min(float(r["z_lower_m"]) for r in traj) >= lo - 1e-9
    assert max(float(r["z_upper_m"]) for r in traj) <= hi + 1e-9
    assert min(float(r["z_lower_m"]) for r in traj) == pytest.approx(lo, abs=1e-5)
    assert max(float(r["z_upper_m"]) for r in traj) == pytest.approx(hi, abs=1e-5)


def test_check_separation_exceeding_baseline(capsys):
    N = int(120 / (SR87.recoil_velocity * 1.0)) + 2
    code, out, _ = run(capsys, "check", "--Q", "1", "--N", str(N), "--z0", "0", "--v0", "0", "--freq", "0.5")
    assert code == 0
    report = rows_of(out)[0]
    assert report["feasible"] == "false" and report["binding"] == "both"


def test_check_invalid_scheme(capsys):
    code, _, err = run(capsys, "check", "--Q", "0", "--N", "10", "--z0", "0", "--v0", "0", "--freq", "0.5")
    assert code == 2 and json.loads(err)["field"] == "Q"
