import numpy as np
import pytest

from cablescaffold.telemetry import COLUMNS, Telemetry, TelemetryFormatError

HEADER = (
    "t,px,py,th,px_ref,py_ref,th_ref,L1,L2,L3,L4,L1_ref,L2_ref,L3_ref,L4_ref,"
    "T1,T2,T3,T4,tau1,tau2,tau3,tau4,w1,w2,w3,w4,power"
)


def test_header_is_exact():
    assert ",".join(COLUMNS) == HEADER


def test_power_is_sum_of_absolute_motor_powers():
    states = np.zeros((2, 14))
    states[:, 10:14] = [[1.0, -2.0, 0.0, 3.0], [0.0, 0.0, 0.0, 0.0]]
    torques = np.array([[0.1, 0.2, 0.3, -0.1], [1.0, 1.0, 1.0, 1.0]])
    z3, z4 = np.zeros((2, 3)), np.zeros((2, 4))
    tel = Telemetry.from_arrays([0.1, 0.2], states, z3, z4, z4, z4, torques)
    assert tel["power"] == pytest.approx([0.1 + 0.4 + 0.0 + 0.3, 0.0])


def test_csv_round_trip_keeps_nine_digits(tmp_path, trip_telemetry):
    path = tmp_path / "log.csv"
    trip_telemetry.to_csv(path)
    assert path.read_text().splitlines()[0] == HEADER
    back = Telemetry.from_csv(path)
    assert back.data.shape == trip_telemetry.data.shape
    np.testing.assert_allclose(back.data, trip_telemetry.data, rtol=5e-9, atol=1e-300)


def test_csv_is_deterministic(tmp_path, trip_telemetry):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    trip_telemetry.to_csv(a)
    Telemetry.from_csv(a).to_csv(b)
    assert a.read_bytes() == b.read_bytes()


def test_record_view(trip_telemetry):
    rec = trip_telemetry.record(0)
    assert rec.time == trip_telemetry["t"][0]
    assert rec.lengths == tuple(trip_telemetry.columns("L1", "L2", "L3", "L4")[0])
    assert len(trip_telemetry.tail(5)) == 5
    assert sum(1 for _ in trip_telemetry.tail(3)) == 3


@pytest.mark.parametrize(
    "text",
    ["", "t,px\n1,2\n", HEADER + "\n" + ",".join(["1"] * 27) + "\n", HEADER + "\n" + ",".join(["x"] * 28) + "\n"],
)
def test_malformed_logs_rejected(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(TelemetryFormatError):
        Telemetry.from_csv(path)


def test_wrong_width_rejected():
    with pytest.raises(TelemetryFormatError):
        Telemetry(np.zeros((3, 5)))
