"""Fast built-in invariant checks run by ``cablescaffold validate``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dynamics, kinematics
from .rig import RigConfig, in_workspace, scenario_from_dict, scenario_to_dict, validate_mobility
from .scenarios import paper_scenarios
from .trajectory import plan_profile


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_workspace_poses(rig: RigConfig, count: int, rng: np.random.Generator, max_theta: float = 0.3) -> np.ndarray:
    """Rejection-sample poses whose corners all sit inside the workspace margin."""
    poses = []
    while len(poses) < count:
        pose = (
            rng.uniform(0.0, rig.stand_width),
            rng.uniform(0.0, rig.stand_height),
            rng.uniform(-max_theta, max_theta),
        )
        if in_workspace(pose, rig):
            poses.append(pose)
    return np.array(poses)


def check_mobility(rig: RigConfig, rng) -> CheckResult:
    dof = validate_mobility(rig)
    return CheckResult("mobility", dof == 0, f"Grübler DOF: {dof}")


def check_round_trip(rig: RigConfig, rng, count: int = 50) -> CheckResult:
    worst = 0.0
    for pose in random_workspace_poses(rig, count, rng):
        lengths = kinematics.inverse_kinematics(pose, rig)
        guess = pose + rng.uniform(-0.01, 0.01, 3)
        back = np.array(kinematics.forward_kinematics(lengths[:3], (1, 2, 3), rig, guess).pose)
        worst = max(worst, float(np.max(np.abs(back - pose))))
    return CheckResult("ik/fk round trip", worst < 1e-9, f"max deviation {worst:.2e}")


def check_cord_rates(rig: RigConfig, rng, count: int = 20) -> CheckResult:
    worst = 0.0
    h = 1e-6
    for pose in random_workspace_poses(rig, count, rng):
        rates = rng.uniform(-0.1, 0.1, 3)
        fd = (kinematics.inverse_kinematics(pose + h * rates, rig) - kinematics.inverse_kinematics(pose - h * rates, rig)) / (2 * h)
        exact = kinematics.cord_rates_batch(pose[None, :], rates[None, :], rig)[0]
        worst = max(worst, float(np.max(np.abs(fd - exact))))
    return CheckResult("cord rates vs finite differences", worst < 1e-6, f"max deviation {worst:.2e}")


def check_statics(rig: RigConfig, rng, count: int = 50) -> CheckResult:
    worst, negative = 0.0, 0
    for pose in random_workspace_poses(rig, count, rng, max_theta=0.1):
        try:
            sol = dynamics.solve_static_tensions(pose, rig)
        except (dynamics.InfeasiblePoseError, dynamics.ConditioningError):
            continue
        negative += int(np.any(sol.tensions < 0.0))
        worst = max(worst, dynamics.wrench_of_tensions(pose, rig, sol.tensions).residual)
    ok = worst < 1e-9 and negative == 0
    return CheckResult("static tensions", ok, f"max residual {worst:.2e}, negative sets {negative}")


def check_symmetric_tension(rig: RigConfig, rng) -> CheckResult:
    # corners level with each other, hanging midway: the two upper cords share the load
    pose = (0.5 * rig.stand_width, 0.5 * rig.stand_height, 0.0)
    sol = dynamics.solve_static_tensions(pose, rig)
    dx = 0.5 * rig.stand_width - 0.5 * rig.platform_width
    dy = 0.5 * rig.stand_height - 0.5 * rig.platform_height
    expected = rig.platform_mass * rig.gravity / (2.0 * math.sin(math.atan2(dy, dx)))
    err = abs(sol.tensions[0] - expected) + abs(sol.tensions[1] - expected)
    return CheckResult("symmetric tension", bool(err < 1e-9), f"T = {sol.tensions[0]:.6f} N, expected {expected:.6f} N")


def speed_integral(profile) -> float:
    """Exact integral of the piecewise-linear speed, evaluated at its breakpoints."""
    knots = np.array([0.0, profile.t_accel, profile.t_accel + profile.t_cruise, profile.total_time])
    v = profile.speed(knots)
    return float(np.sum(0.5 * (v[1:] + v[:-1]) * np.diff(knots)))


def check_profiles(rig: RigConfig, rng, count: int = 50) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        prof = plan_profile(rng.uniform(1e-4, 1.0), rng.uniform(0.01, 0.2), rng.uniform(0.005, 0.5))
        worst = max(worst, abs(speed_integral(prof) - prof.path_length) / prof.path_length)
    return CheckResult("trapezoid distance", worst < 1e-9, f"max relative gap {worst:.2e}")


def check_bundled_scenarios(rig: RigConfig, rng) -> CheckResult:
    bad = []
    for name, scenario in paper_scenarios().items():
        if scenario_from_dict(scenario_to_dict(scenario)) != scenario:
            bad.append(name)
    return CheckResult("bundled scenarios", not bad, "all valid" if not bad else f"invalid: {', '.join(bad)}")


CHECKS: tuple[Callable[..., CheckResult], ...] = (
    check_mobility,
    check_round_trip,
    check_cord_rates,
    check_statics,
    check_symmetric_tension,
    check_profiles,
    check_bundled_scenarios,
)


def run_quick_suite(rig: RigConfig | None = None, seed: int = 0) -> list[CheckResult]:
    rig = rig or RigConfig()
    rng = np.random.default_rng(seed)
    results = []
    for check in CHECKS:
        try:
            results.append(check(rig, rng))
        except Exception as err:  # a crashing check is a failed check
            results.append(CheckResult(check.__name__.removeprefix("check_"), False, f"{type(err).__name__}: {err}"))
    return results
