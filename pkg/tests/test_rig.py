import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cablescaffold.rig import (
    RigConfig,
    Scenario,
    ScenarioError,
    ScenarioFileError,
    corners_world,
    grubler_mobility,
    in_workspace,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate_mobility,
)
from cablescaffold.scenarios import paper_scenarios


def write(tmp_path, data, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def test_poses_only_file_gets_prototype_defaults(tmp_path):
    s = load_scenario(write(tmp_path, {"start_pose_cm": [10, 10, 0], "end_pose_cm": [30, 60, 0]}))
    r = s.rig
    assert (r.stand_height, r.stand_width) == (0.70, 0.60)
    assert (r.platform_height, r.platform_width) == (0.028, 0.158)
    assert r.platform_mass == 0.1
    assert r.pulley_radius == 0.025
    assert r.pulley_inertia == 3.125e-5
    assert r.platform_inertia == 2.617e-4
    assert s.start_pose == pytest.approx((0.10, 0.10, 0.0))
    assert s.end_pose == pytest.approx((0.30, 0.60, 0.0))


def test_tall_platform_is_rejected_by_key(tmp_path):
    with pytest.raises(ScenarioError) as exc:
        load_scenario(write(tmp_path, {"platform_height_m": 0.8}))
    assert exc.value.key == "platform_height"
    assert "platform_height" in str(exc.value)
    assert "s.json" in str(exc.value)


def test_gains_carried_verbatim(tmp_path):
    s = load_scenario(write(tmp_path, {"kp": 2000, "ki": 500}))
    assert (s.kp, s.ki) == (2000.0, 500.0)


def test_limits_default_to_motor_rating():
    r = RigConfig()
    assert r.torque_limit == 2.0
    assert r.speed_limit == pytest.approx(193 * 2 * math.pi / 60)


@pytest.mark.parametrize(
    "bad, key",
    [
        ({"kp": -1}, "kp"),
        ({"platform_mass_kg": 0}, "platform_mass"),
        ({"time_step_s": 0}, "time_step"),
        ({"nonsense": 1}, "nonsense"),
        ({"kp": "fast"}, "kp"),
        ({"start_pose_m": [0.0, 0.0, 0.0]}, "start_pose"),
        ({"start_pose_m": [0.1]}, "start_pose_m"),
        ({"kp": 1, "ki": 1, "time_step_s": 1e-3, "log_interval_s": 1.5e-3}, "log_interval"),
    ],
)
def test_invalid_fields_name_their_key(tmp_path, bad, key):
    with pytest.raises(ScenarioError) as exc:
        load_scenario(write(tmp_path, bad))
    assert exc.value.key == key


def test_unreadable_and_malformed_files(tmp_path):
    with pytest.raises(ScenarioFileError):
        load_scenario(tmp_path / "missing.json")
    p = tmp_path / "broken.json"
    p.write_text("{")
    with pytest.raises(ScenarioFileError):
        load_scenario(p)


def test_unit_suffixed_keys():
    s = scenario_from_dict({"cruise_speed_cmps": 5, "accel_cmps2": 0.8, "stand_height_cm": 70, "speed_limit_rpm": 60})
    assert s.cruise_speed == pytest.approx(0.05)
    assert s.accel == pytest.approx(0.008)
    assert s.rig.stand_height == pytest.approx(0.70)
    assert s.rig.speed_limit == pytest.approx(2 * math.pi)
    with pytest.raises(ScenarioError):
        scenario_from_dict({"cruise_speed_mps": 0.05, "cruise_speed_cmps": 5})


@pytest.mark.parametrize("n, j1, j2, dof", [(5, 6, 0, 0), (5, 5, 0, 2), (4, 4, 0, 1)])
def test_grubler(n, j1, j2, dof):
    assert grubler_mobility(n, j1, j2) == dof


def test_shipped_topology_is_locked():
    assert validate_mobility(RigConfig()) == 0


@pytest.mark.parametrize("name", sorted(paper_scenarios()))
def test_bundled_scenarios_round_trip(tmp_path, name):
    s = paper_scenarios()[name]
    path = tmp_path / f"{name}.json"
    save_scenario(s, path)
    assert load_scenario(path) == s


@given(
    kp=st.floats(0, 1e4),
    ki=st.floats(0, 1e3),
    vp=st.floats(1e-3, 0.5),
    ap=st.floats(1e-3, 1.0),
    mass=st.floats(1e-3, 10),
    x=st.floats(0.1, 0.5),
    y=st.floats(0.05, 0.65),
    th=st.floats(-0.2, 0.2),
)
def test_serialization_round_trip(kp, ki, vp, ap, mass, x, y, th):
    rig = RigConfig(platform_mass=mass)
    if not in_workspace((x, y, th), rig):
        return
    s = Scenario(rig=rig, start_pose=(x, y, th), end_pose=(0.3, 0.35, 0.0), kp=kp, ki=ki, cruise_speed=vp, accel=ap)
    back = scenario_from_dict(json.loads(json.dumps(scenario_to_dict(s))))
    assert back == s


def test_workspace_predicate_margin(rig):
    assert in_workspace((0.3, 0.35, 0.0), rig)
    x_edge = rig.platform_width / 2 + 0.005  # left corners 5 mm from the wall
    assert not in_workspace((x_edge - 1e-6, 0.35, 0.0), rig)
    assert in_workspace((x_edge + 1e-6, 0.35, 0.0), rig)
    c = corners_world((0.3, 0.35, 0.0), rig)
    assert c.shape == (4, 2)
