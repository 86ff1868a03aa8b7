import json

import numpy as np
import pytest

from cablescaffold.cli import main
from cablescaffold.report import compute_rms
from cablescaffold.rig import load_scenario
from cablescaffold.telemetry import INDEX, Telemetry


@pytest.fixture
def scenario_dir(tmp_path):
    assert main(["scenarios", "emit-paper", "--dir", str(tmp_path / "sc")]) == 0
    return tmp_path / "sc"


def test_emit_paper_writes_valid_scenarios(scenario_dir):
    names = sorted(p.name for p in scenario_dir.iterdir())
    assert names == ["sim_3_2.json", "test_1.json", "test_2.json"]
    for p in scenario_dir.iterdir():
        load_scenario(p)
    t1 = json.loads((scenario_dir / "test_1.json").read_text())
    assert t1["experimental_gains"] == {"kp": 0.9, "ki": 0.01}
    assert t1["accel_mps2"] == 0.008


def test_simulate_then_analyze_round_trip(scenario_dir, tmp_path, capsys, trip_telemetry):
    out = tmp_path / "log.csv"
    assert main(["simulate", str(scenario_dir / "sim_3_2.json"), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 13270 + 1
    capsys.readouterr()
    assert main(["analyze", str(out), "--json"]) == 0
    from_csv = json.loads(capsys.readouterr().out)
    in_process = compute_rms(trip_telemetry).to_dict()
    # errors are differences of O(1) values stored to 9 digits
    for key, value in in_process.items():
        assert np.asarray(from_csv[key]) == pytest.approx(np.asarray(value), rel=1e-8, abs=2e-9), key


def test_analyze_table_of_synthetic_log(tmp_path, capsys):
    data = np.zeros((50, len(INDEX)))
    data[:, INDEX["t"]] = np.arange(1, 51) * 1e-3
    data[:, INDEX["L1"]] = 0.3002
    data[:, INDEX["L1_ref"]] = 0.3
    log = tmp_path / "const.csv"
    Telemetry(data).to_csv(log)
    assert main(["analyze", str(log)]) == 0
    row = next(line for line in capsys.readouterr().out.splitlines() if line.startswith("cord 1"))
    rms, peak = (float(v) for v in row.split()[3:5])
    assert rms == pytest.approx(2e-4, rel=1e-4) and peak == pytest.approx(2e-4, rel=1e-4)


def test_plot_rows_match_records(tmp_path, trip_telemetry):
    log = tmp_path / "log.csv"
    trip_telemetry.to_csv(log)
    for channel in ("power", "err_L1"):
        out = tmp_path / f"{channel}.dat"
        assert main(["plot", str(log), "--channel", channel, "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == f"t,{channel}"
        assert len(lines) - 1 == len(trip_telemetry)
        assert all(len(line.split(",")) == 2 for line in lines[1:])


def test_validate_reports_locked_topology(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "Grübler DOF: 0" in out
    assert "FAIL" not in out


def test_sweep_with_threads(scenario_dir, tmp_path, capsys):
    outdir = tmp_path / "logs"
    paths = [str(scenario_dir / n) for n in ("sim_3_2.json", "test_2.json")]
    assert main(["simulate", *paths, "--out-dir", str(outdir), "--jobs", "2"]) == 0
    assert sorted(p.name for p in outdir.iterdir()) == ["sim_3_2.csv", "test_2.csv"]


def test_experimental_gains_flag(scenario_dir, tmp_path):
    out = tmp_path / "exp.csv"
    assert main(["simulate", str(scenario_dir / "test_2.json"), "--gains", "experimental", "--out", str(out)]) == 0
    assert main(["simulate", str(scenario_dir / "sim_3_2.json"), "--gains", "experimental", "--out", str(out)]) == 2


def test_usage_and_file_errors_exit_2(tmp_path, capsys):
    assert main([]) == 2
    assert main(["analyze", str(tmp_path / "missing.csv")]) == 2
    assert "missing.csv" in capsys.readouterr().err
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert main(["simulate", str(broken), "--out", str(tmp_path / "x.csv")]) == 2
    assert "broken.json" in capsys.readouterr().err
    log = tmp_path / "log.csv"
    log.write_text("a,b\n1,2\n")
    assert main(["plot", str(log), "--channel", "power", "--out", str(tmp_path / "p.dat")]) == 2
    assert main(["plot", str(log), "--channel", "nope", "--out", str(tmp_path / "p.dat")]) == 2


def test_invalid_scenario_exits_1_naming_key(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"platform_height_m": 0.8}))
    assert main(["simulate", str(bad), "--out", str(tmp_path / "x.csv")]) == 1
    err = capsys.readouterr().err
    assert "bad.json" in err and "platform_height" in err


def test_diverging_run_exits_1_with_diagnostics(tmp_path, capsys):
    sc = tmp_path / "coarse.json"
    sc.write_text(json.dumps({"time_step_s": 0.01, "log_interval_s": 0.01}))
    out = tmp_path / "coarse.csv"
    assert main(["simulate", str(sc), "--out", str(out)]) == 1
    assert "left the stand" in capsys.readouterr().err
    assert len(Telemetry.from_csv(tmp_path / "coarse.failure.csv")) > 0
