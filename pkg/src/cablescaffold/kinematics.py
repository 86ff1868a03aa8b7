"""Platform corner, cord and pulley kinematics plus forward kinematics.

Cords and corners are numbered 1..4: upper-left, upper-right, lower-left,
lower-right. Every cord length is the distance from its stand anchor to
its platform corner; derivatives follow by the chain rule, so cord 1
reproduces the closed forms written for it term by term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rig import CordState, PlatformState, RigConfig, in_workspace

MIN_CORD_LENGTH = 1e-6
FK_MAX_ITER = 50
FK_TOL = 1e-12
FK_MAX_COND = 1e8

# Sign pattern mapping anchor-minus-corner components onto the cord angle:
# angle_i = atan2(SY[i] * dy, SX[i] * dx), unit direction = (SX cos, SY sin).
SX = (-1.0, 1.0, -1.0, 1.0)
SY = (1.0, 1.0, -1.0, -1.0)


class KinematicsError(ValueError):
    pass


class SingularityError(KinematicsError):
    pass


class WorkspaceError(KinematicsError):
    pass


class ConvergenceError(KinematicsError):
    pass


@dataclass(frozen=True)
class CornerKinematics:
    index: int
    position: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    acceleration: tuple[float, float] = (0.0, 0.0)


def _check_index(i: int) -> int:
    if i not in (1, 2, 3, 4):
        raise IndexError(f"corner/cord index must be 1..4, got {i}")
    return i - 1


def _pose3(pose):
    if isinstance(pose, PlatformState):
        return pose.px, pose.py, pose.theta
    return float(pose[0]), float(pose[1]), float(pose[2])


def _offset(rig: RigConfig, k: int):
    ha, hb = 0.5 * rig.platform_height, 0.5 * rig.platform_width
    return (-hb if k in (0, 2) else hb), (ha if k in (0, 1) else -ha)


def _anchor(rig: RigConfig, k: int):
    return (0.0 if k in (0, 2) else rig.stand_width), (rig.stand_height if k in (0, 1) else 0.0)


def corner_position(pose, rig: RigConfig, i: int) -> tuple[float, float]:
    k = _check_index(i)
    px, py, th = _pose3(pose)
    u, v = _offset(rig, k)
    c, s = math.cos(th), math.sin(th)
    return px + u * c - v * s, py + u * s + v * c


def corner_derivatives(pose, rates, accels, rig: RigConfig, i: int) -> CornerKinematics:
    """Position, velocity and acceleration of one platform corner.

    ``rates`` and ``accels`` are (dPx, dPy, dtheta) and their derivatives.
    """
    k = _check_index(i)
    px, py, th = _pose3(pose)
    vx, vy, w = (float(x) for x in rates)
    ax, ay, alpha = (float(x) for x in accels)
    u, v = _offset(rig, k)
    c, s = math.cos(th), math.sin(th)
    # world-frame offset and its rotation by +90 degrees
    ox, oy = u * c - v * s, u * s + v * c
    return CornerKinematics(
        index=i,
        position=(px + ox, py + oy),
        velocity=(vx - oy * w, vy + ox * w),
        acceleration=(ax - oy * alpha - ox * w * w, ay + ox * alpha - oy * w * w),
    )


def cord_geometry(pose, rig: RigConfig, i: int) -> CordState:
    k = _check_index(i)
    cx, cy = corner_position(pose, rig, i)
    axn, ayn = _anchor(rig, k)
    dx, dy = axn - cx, ayn - cy
    length = math.hypot(dx, dy)
    if length < MIN_CORD_LENGTH:
        raise SingularityError(f"cord {i} has degenerate length {length:.3g} m (corner on anchor)")
    return CordState(length=length, angle=math.atan2(SY[k] * dy, SX[k] * dx))


def cord_rates(pose, rates, accels, rig: RigConfig, i: int) -> tuple[CordState, float]:
    """Cord length rate and acceleration; returns (CordState, d2L/dt2)."""
    k = _check_index(i)
    ck = corner_derivatives(pose, rates, accels, rig, i)
    axn, ayn = _anchor(rig, k)
    ex, ey = ck.position[0] - axn, ck.position[1] - ayn  # corner minus anchor
    length = math.hypot(ex, ey)
    if length < MIN_CORD_LENGTH:
        raise SingularityError(f"cord {i} length {length:.3g} m is below {MIN_CORD_LENGTH} m")
    vx, vy = ck.velocity
    accx, accy = ck.acceleration
    rate = (ex * vx + ey * vy) / length
    acc = (vx * vx + vy * vy + ex * accx + ey * accy - rate * rate) / length
    angle = math.atan2(-SY[k] * ey, -SX[k] * ex)
    return CordState(length=length, rate=rate, angle=angle), acc


def pulley_map(cord_rate: float, cord_accel: float, rig: RigConfig) -> tuple[float, float]:
    """Shaft speed and acceleration for a cord rate; positive speed winds cable in."""
    r = rig.pulley_radius
    return -cord_rate / r, -cord_accel / r


def inverse_kinematics(pose, rig: RigConfig, check: bool = True) -> np.ndarray:
    """Four cord lengths for a pose.

    Raises WorkspaceError when ``check`` is set and the pose leaves the
    workspace.
    """
    if check and not in_workspace(_pose3(pose), rig):
        raise WorkspaceError(f"pose {tuple(_pose3(pose))} is outside the workspace")
    return np.array([cord_geometry(pose, rig, i).length for i in (1, 2, 3, 4)])


def inverse_kinematics_batch(poses, rig: RigConfig) -> np.ndarray:
    """Vectorized lengths for an (N, 3) array of poses; no workspace check."""
    poses = np.asarray(poses, dtype=float)
    c, s = np.cos(poses[:, 2]), np.sin(poses[:, 2])
    off = rig.corner_offsets
    anchors = rig.anchors
    cx = poses[:, 0:1] + c[:, None] * off[:, 0] - s[:, None] * off[:, 1]
    cy = poses[:, 1:2] + s[:, None] * off[:, 0] + c[:, None] * off[:, 1]
    return np.hypot(anchors[:, 0] - cx, anchors[:, 1] - cy)


def cord_rates_batch(poses, rates, rig: RigConfig) -> np.ndarray:
    """Vectorized cord rates for (N, 3) poses and pose rates."""
    poses = np.asarray(poses, dtype=float)
    rates = np.asarray(rates, dtype=float)
    c, s = np.cos(poses[:, 2]), np.sin(poses[:, 2])
    off = rig.corner_offsets
    anchors = rig.anchors
    ox = c[:, None] * off[:, 0] - s[:, None] * off[:, 1]
    oy = s[:, None] * off[:, 0] + c[:, None] * off[:, 1]
    ex = poses[:, 0:1] + ox - anchors[:, 0]
    ey = poses[:, 1:2] + oy - anchors[:, 1]
    vx = rates[:, 0:1] - oy * rates[:, 2:3]
    vy = rates[:, 1:2] + ox * rates[:, 2:3]
    return (ex * vx + ey * vy) / np.hypot(ex, ey)


def cord_jacobian(pose, rig: RigConfig) -> np.ndarray:
    """4x3 matrix of dL_i / d(Px, Py, theta)."""
    px, py, th = _pose3(pose)
    c, s = math.cos(th), math.sin(th)
    jac = np.empty((4, 3))
    for k in range(4):
        u, v = _offset(rig, k)
        ox, oy = u * c - v * s, u * s + v * c
        axn, ayn = _anchor(rig, k)
        ex, ey = px + ox - axn, py + oy - ayn
        length = math.hypot(ex, ey)
        if length < MIN_CORD_LENGTH:
            raise SingularityError(f"cord {k + 1} has degenerate length {length:.3g} m")
        nx, ny = ex / length, ey / length
        jac[k] = (nx, ny, -nx * oy + ny * ox)
    return jac


def _polish(x, rows, lengths, rig, residual, norm, steps: int = 3):
    # a few plain Newton steps past the tolerance; ill-conditioned triples
    # turn a 1e-12 m length residual into a much larger pose error
    for _ in range(steps):
        trial = x + np.linalg.solve(cord_jacobian(x, rig)[rows], -residual(x))
        trial_norm = float(np.linalg.norm(residual(trial)))
        if not trial_norm < norm:
            break
        x, norm = trial, trial_norm
    return x


def forward_kinematics(lengths, cords, rig: RigConfig, guess) -> PlatformState:
    """Pose reproducing three prescribed cord lengths.

    Damped Newton iteration on the three length residuals, halving the step
    while the residual grows. ``cords`` are 1-based cord numbers.
    """
    lengths = np.asarray(lengths, dtype=float)
    rows = [_check_index(int(i)) for i in cords]
    if len(rows) != 3 or len(set(rows)) != 3 or lengths.shape != (3,):
        raise ValueError("forward kinematics needs three distinct cords and three lengths")
    x = np.array(_pose3(guess), dtype=float)

    def residual(p):
        return inverse_kinematics(p, rig, check=False)[rows] - lengths

    res = residual(x)
    norm = float(np.linalg.norm(res))
    for _ in range(FK_MAX_ITER):
        if norm < FK_TOL:
            return PlatformState.at(_polish(x, rows, lengths, rig, residual, norm))
        jac = cord_jacobian(x, rig)[rows]
        cond = np.linalg.cond(jac)
        if not np.isfinite(cond) or cond > FK_MAX_COND:
            raise SingularityError(f"cord Jacobian condition number {cond:.3g} exceeds {FK_MAX_COND:g}")
        step = np.linalg.solve(jac, -res)
        scale = 1.0
        while True:
            trial = x + scale * step
            try:
                trial_res = residual(trial)
            except SingularityError:
                trial_res = None
            if trial_res is not None and np.linalg.norm(trial_res) < norm:
                break
            scale *= 0.5
            if scale < 1e-10:
                raise ConvergenceError(f"line search stalled with residual {norm:.3g} m")
        x, res = trial, trial_res
        norm = float(np.linalg.norm(res))
    if norm < FK_TOL:
        return PlatformState.at(_polish(x, rows, lengths, rig, residual, norm))
    raise ConvergenceError(f"no convergence after {FK_MAX_ITER} iterations (residual {norm:.3g} m)")
