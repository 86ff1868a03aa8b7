"""Trapezoidal speed profiles and per-cord reference generation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kinematics import WorkspaceError, cord_rates_batch, inverse_kinematics_batch
from .rig import RigConfig, Scenario, in_workspace_batch


@dataclass(frozen=True)
class TrapezoidalProfile:
    path_length: float
    cruise_speed: float
    accel: float
    t_accel: float
    t_cruise: float
    total_time: float
    triangular: bool

    @property
    def peak_speed(self) -> float:
        return self.accel * self.t_accel

    def distance(self, t):
        """Arc length covered at time ``t`` (clamped to the profile)."""
        t = np.clip(np.asarray(t, dtype=float), 0.0, self.total_time)
        a, ta, vp = self.accel, self.t_accel, self.peak_speed
        t2 = ta + self.t_cruise
        ramp_up = 0.5 * a * t * t
        cruise = 0.5 * a * ta * ta + vp * (t - ta)
        tr = self.total_time - t
        ramp_down = self.path_length - 0.5 * a * tr * tr
        return np.where(t < ta, ramp_up, np.where(t < t2, cruise, ramp_down))

    def speed(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, self.total_time)
        a, ta = self.accel, self.t_accel
        t2 = ta + self.t_cruise
        return np.where(t < ta, a * t, np.where(t < t2, self.peak_speed, a * (self.total_time - t)))


def plan_profile(distance: float, cruise_speed: float, accel: float) -> TrapezoidalProfile:
    if distance < 0.0:
        raise ValueError("distance must be non-negative")
    if cruise_speed <= 0.0 or accel <= 0.0:
        raise ValueError("cruise speed and acceleration must be positive")
    if distance == 0.0:
        return TrapezoidalProfile(0.0, cruise_speed, accel, 0.0, 0.0, 0.0, False)
    if distance < cruise_speed**2 / accel:
        ta = math.sqrt(distance / accel)
        return TrapezoidalProfile(distance, cruise_speed, accel, ta, 0.0, 2.0 * ta, True)
    ta = cruise_speed / accel
    tc = distance / cruise_speed - ta
    return TrapezoidalProfile(distance, cruise_speed, accel, ta, tc, 2.0 * ta + tc, False)


def path_distance(start_pose, end_pose, rig: RigConfig) -> float:
    """Profile distance: translation length, or the corner arc for pure rotations."""
    d = math.hypot(end_pose[0] - start_pose[0], end_pose[1] - start_pose[1])
    if d > 0.0:
        return d
    return abs(end_pose[2] - start_pose[2]) * rig.half_diagonal


def pose_at(profile: TrapezoidalProfile, start_pose, end_pose, t):
    """Reference pose and pose rates at time(s) ``t``.

    Translation and rotation share one normalized profile, so both start
    and stop together. Returns (pose, rates) with shape (3,) for scalar
    ``t`` and (N, 3) for arrays.
    """
    t_arr = np.asarray(t, dtype=float)
    eps = 1e-12 * max(1.0, profile.total_time)
    if np.any(t_arr < -eps) or np.any(t_arr > profile.total_time + eps):
        raise ValueError(f"t outside [0, {profile.total_time}]")
    start = np.asarray(start_pose, dtype=float)
    delta = np.asarray(end_pose, dtype=float) - start
    if profile.path_length > 0.0:
        frac = profile.distance(t_arr) / profile.path_length
        dfrac = profile.speed(t_arr) / profile.path_length
    else:
        frac = np.zeros_like(t_arr)
        dfrac = np.zeros_like(t_arr)
    pose = start + np.multiply.outer(frac, delta)
    rates = np.multiply.outer(dfrac, delta)
    if profile.path_length > 0.0:
        # exact endpoints
        pose = np.where(np.asarray(frac)[..., None] >= 1.0, np.asarray(end_pose, dtype=float), pose)
    return pose, rates


def profile_for(scenario: Scenario) -> TrapezoidalProfile:
    dist = path_distance(scenario.start_pose, scenario.end_pose, scenario.rig)
    return plan_profile(dist, scenario.cruise_speed, scenario.accel)


def time_grid(total_time: float, dt: float) -> np.ndarray:
    """Multiples of dt up to ``total_time`` plus the exact final time."""
    n = int(math.floor(total_time / dt + 1e-9))
    grid = np.arange(n + 1) * dt
    if total_time - grid[-1] > 1e-9 * dt:
        grid = np.append(grid, total_time)
    else:
        grid[-1] = total_time if n > 0 else grid[-1]
    return grid


@dataclass(frozen=True)
class ReferenceSeries:
    time: np.ndarray
    poses: np.ndarray  # (N, 3)
    pose_rates: np.ndarray  # (N, 3)
    lengths: np.ndarray  # (N, 4)
    rates: np.ndarray  # (N, 4)


def references_at(scenario: Scenario, profile: TrapezoidalProfile, times) -> ReferenceSeries:
    """References on an arbitrary time grid; times past the trip hold the end pose."""
    times = np.asarray(times, dtype=float)
    rig = scenario.rig
    poses, rates = pose_at(profile, scenario.start_pose, scenario.end_pose, np.minimum(times, profile.total_time))
    poses = np.atleast_2d(poses)
    rates = np.atleast_2d(rates)
    outside = np.flatnonzero(~in_workspace_batch(poses, rig))
    if outside.size:
        raise WorkspaceError(f"reference pose leaves the workspace at t={times[outside[0]]:.6g} s")
    return ReferenceSeries(
        time=times,
        poses=poses,
        pose_rates=rates,
        lengths=inverse_kinematics_batch(poses, rig),
        rates=cord_rates_batch(poses, rates, rig),
    )


def reference_series(scenario: Scenario) -> ReferenceSeries:
    profile = profile_for(scenario)
    return references_at(scenario, profile, time_grid(profile.total_time, scenario.time_step))
