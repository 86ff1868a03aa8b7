"""The three bundled scenarios: the simulated trip and the two prototype tests."""

from __future__ import annotations

import math
from pathlib import Path

from .rig import RigConfig, Scenario, save_scenario

EXPERIMENTAL_KP = 0.9
EXPERIMENTAL_KI = 0.01


def simulation_trip(rig: RigConfig | None = None) -> Scenario:
    return Scenario(
        rig=rig or RigConfig(),
        start_pose=(0.10, 0.10, 0.0),
        end_pose=(0.30, 0.60, 0.0),
        cruise_speed=0.05,
        accel=0.1,
        kp=2000.0,
        ki=500.0,
        name="sim_3_2",
        description="Level diagonal trip (10,10) cm -> (30,60) cm, simulated gains",
    )


def level_motion_test(rig: RigConfig | None = None) -> Scenario:
    # the test section quotes 0.8 cm/s^2 although the parameter table lists 10 cm/s^2
    return Scenario(
        rig=rig or RigConfig(),
        start_pose=(0.50, 0.10, 0.0),
        end_pose=(0.10, 0.60, 0.0),
        cruise_speed=0.05,
        accel=0.008,
        kp=2000.0,
        ki=500.0,
        name="test_1",
        description="Prototype test 1: level motion (50,10) cm -> (10,60) cm",
        experimental_kp=EXPERIMENTAL_KP,
        experimental_ki=EXPERIMENTAL_KI,
    )


def angular_motion_test(rig: RigConfig | None = None) -> Scenario:
    return Scenario(
        rig=rig or RigConfig(),
        start_pose=(0.10, 0.30, 0.0),
        end_pose=(0.50, 0.30, math.radians(45.0)),
        cruise_speed=0.05,
        accel=0.1,
        kp=2000.0,
        ki=500.0,
        name="test_2",
        description="Prototype test 2: (10,30) cm -> (50,30) cm with 0 -> 45 deg rotation",
        experimental_kp=EXPERIMENTAL_KP,
        experimental_ki=EXPERIMENTAL_KI,
    )


def paper_scenarios() -> dict[str, Scenario]:
    return {s.name: s for s in (simulation_trip(), level_motion_test(), angular_motion_test())}


def emit_paper_scenarios(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, scenario in paper_scenarios().items():
        path = directory / f"{name}.json"
        save_scenario(scenario, path)
        paths.append(path)
    return paths
