"""Platform force/moment balance, static tension distribution, actuator torques."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kinematics import _anchor, _check_index, _pose3, corner_position
from .rig import RigConfig

TENSION_FEASIBILITY_TOL = 1e-9
MAX_TENSION_COND = 1e10

CANDIDATE_TRIPLES = ((1, 2, 3), (1, 2, 4))


class InfeasiblePoseError(ValueError):
    pass


class ConditioningError(ValueError):
    pass


@dataclass(frozen=True)
class WrenchBalance:
    force: tuple[float, float]
    moment: float
    directions: np.ndarray  # (4, 2) unit vectors, corner -> anchor
    moment_arms: np.ndarray  # (4,) moment per newton of tension

    @property
    def residual(self) -> float:
        return math.sqrt(self.force[0] ** 2 + self.force[1] ** 2 + self.moment**2)


@dataclass(frozen=True)
class TensionSolution:
    tensions: np.ndarray
    taut_set: tuple[int, int, int]
    slack_index: int


def cord_directions(pose, rig: RigConfig):
    """Unit vectors from each corner toward its anchor, and the moment per unit tension."""
    px, py, _ = _pose3(pose)
    dirs = np.empty((4, 2))
    arms = np.empty(4)
    for k in range(4):
        cx, cy = corner_position(pose, rig, k + 1)
        axn, ayn = _anchor(rig, k)
        dx, dy = axn - cx, ayn - cy
        n = math.hypot(dx, dy)
        ux, uy = dx / n, dy / n
        dirs[k] = (ux, uy)
        arms[k] = (cx - px) * uy - (cy - py) * ux
    return dirs, arms


def wrench_matrix(pose, rig: RigConfig) -> np.ndarray:
    """3x4 map from cord tensions to (Fx, Fy, Mz) on the platform."""
    dirs, arms = cord_directions(pose, rig)
    return np.vstack((dirs[:, 0], dirs[:, 1], arms))


def wrench_of_tensions(pose, rig: RigConfig, tensions) -> WrenchBalance:
    """Net force (gravity included) and moment about the platform center."""
    tensions = np.asarray(tensions, dtype=float)
    dirs, arms = cord_directions(pose, rig)
    fx = float(tensions @ dirs[:, 0])
    fy = float(tensions @ dirs[:, 1]) - rig.platform_mass * rig.gravity
    return WrenchBalance(force=(fx, fy), moment=float(tensions @ arms), directions=dirs, moment_arms=arms)


def _required_wrench(rig: RigConfig, accels) -> np.ndarray:
    ax, ay, alpha = (float(a) for a in accels)
    m = rig.platform_mass
    return np.array([m * ax, m * ay + m * rig.gravity, rig.platform_inertia * alpha])


def solve_triple(pose, rig: RigConfig, triple, accels=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Tensions in the three cords of ``triple`` (others zero) producing the required wrench."""
    cols = [_check_index(i) for i in triple]
    W = wrench_matrix(pose, rig)[:, cols]
    cond = np.linalg.cond(W)
    if not np.isfinite(cond) or cond > MAX_TENSION_COND:
        raise ConditioningError(f"tension system for cords {tuple(triple)} is singular (cond {cond:.3g})")
    out = np.zeros(4)
    out[cols] = np.linalg.solve(W, _required_wrench(rig, accels))
    return out


def solve_static_tensions(pose, rig: RigConfig, accels=(0.0, 0.0, 0.0)) -> TensionSolution:
    """Cord tensions with one redundant cord slack.

    Tries the candidate triples {1,2,3} and {1,2,4}; a triple is feasible
    when none of its tensions is below -1e-9 N. When both are feasible the
    lower cord on the platform's side of the stand is kept (cord 3 for
    Px < B/2, cord 4 otherwise).
    """
    px = _pose3(pose)[0]
    feasible = {}
    errors = []
    for triple in CANDIDATE_TRIPLES:
        try:
            t = solve_triple(pose, rig, triple, accels)
        except ConditioningError as err:
            errors.append(err)
            continue
        if np.all(t >= -TENSION_FEASIBILITY_TOL):
            feasible[triple] = np.maximum(t, 0.0)
    if not feasible:
        if len(errors) == len(CANDIDATE_TRIPLES):
            raise errors[0]
        raise InfeasiblePoseError(f"no cord triple can hold pose {tuple(_pose3(pose))} with non-negative tensions")
    if len(feasible) == 2:
        triple = (1, 2, 3) if px < 0.5 * rig.stand_width else (1, 2, 4)
    else:
        (triple,) = feasible
    slack = ({1, 2, 3, 4} - set(triple)).pop()
    return TensionSolution(tensions=feasible[triple], taut_set=triple, slack_index=slack)


def half_plane_slack_cord(pose, rig: RigConfig) -> int:
    """Literal reading of the verbal redundancy rule: the upper cord on the
    platform's side of the stand goes slack (cord 2 in the right half,
    cord 1 in the left half)."""
    return 2 if _pose3(pose)[0] >= 0.5 * rig.stand_width else 1


def _sgn(x: float) -> float:
    return float(x > 0.0) - float(x < 0.0)


def actuator_torque(shaft_speed: float, shaft_accel: float, tension: float, rig: RigConfig, mode: str = "consistent") -> float:
    """Torque a winch motor must deliver.

    ``paper-exact`` keeps the printed inertial term -(I/r)*qdd, which is not
    dimensionally a torque; ``consistent`` uses +I*qdd. Both agree when the
    shaft is not accelerating.
    """
    base = _sgn(shaft_speed) * rig.dry_friction_torque + rig.viscous_damping * shaft_speed + tension * rig.pulley_radius
    if mode == "consistent":
        return base + rig.pulley_inertia * shaft_accel
    if mode == "paper-exact":
        return base - (rig.pulley_inertia / rig.pulley_radius) * shaft_accel
    raise ValueError(f"unknown torque mode {mode!r}")


def mechanical_power(torques, speeds) -> float:
    """Total absolute mechanical power of the motors [W]."""
    return float(np.sum(np.abs(np.asarray(torques, dtype=float) * np.asarray(speeds, dtype=float))))
