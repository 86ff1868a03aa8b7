"""Closed-loop simulation: elastic cables, winch motors, PI bank, RK4."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .. import dynamics
from ..control import PIState, controller_bank, default_windup_limit
from ..kinematics import SingularityError, inverse_kinematics
from ..rig import MotorState, PlatformState, RigConfig, Scenario
from ..telemetry import Telemetry
from ..trajectory import profile_for, references_at
from . import _pykernel
from ._backend import get_kernel

INSTABILITY_BOUND = 0.05
DIAGNOSTIC_RECORDS = 100


class SimulationError(RuntimeError):
    """Run aborted; ``records`` holds the last telemetry before the failure."""

    def __init__(self, message: str, records: Optional[Telemetry] = None):
        super().__init__(message)
        self.records = records


@dataclass(frozen=True)
class SimState:
    platform: PlatformState
    motors: tuple[MotorState, ...]
    controllers: tuple[PIState, ...]
    time: float = 0.0


def cable_tension(geometric_length, released_length, geometric_rate, release_rate, rig: RigConfig) -> float:
    """Unilateral spring-damper tension of one cable [N]."""
    stretch = geometric_length - released_length
    if stretch <= 0.0:
        return 0.0
    t = rig.cable_stiffness * stretch + rig.cable_damping * (geometric_rate - release_rate)
    return max(t, 0.0)


def pack_params(rig: RigConfig, released_offsets) -> np.ndarray:
    """Flat parameter vector shared by both kernels."""
    p = np.empty(_pykernel.NPARAM)
    p[: _pykernel.P_L0] = (
        rig.stand_height,
        rig.stand_width,
        0.5 * rig.platform_height,
        0.5 * rig.platform_width,
        rig.platform_mass,
        rig.platform_inertia,
        rig.pulley_radius,
        rig.pulley_inertia,
        rig.viscous_damping,
        rig.dry_friction_torque,
        rig.gravity,
        rig.cable_stiffness,
        rig.cable_damping,
    )
    p[_pykernel.P_L0 :] = released_offsets
    return p


def _pack_state(state: SimState):
    pf = state.platform
    x = np.array([pf.px, pf.py, pf.theta, pf.vx, pf.vy, pf.omega] + [0.0] * 8)
    x[6:10] = [m.shaft_angle for m in state.motors]
    x[10:14] = [m.shaft_speed for m in state.motors]
    return x


def derivatives(state: SimState, references: Sequence[float], rig: RigConfig, dt: float = 1e-4) -> np.ndarray:
    """Time derivative of the simulation state.

    Controller torques come from the PI bank acting on the encoder-side
    length error (released minus reference length); :func:`run` holds them
    over each step. Returns the 14-vector
    (vx, vy, w, ax, ay, alpha, qd1..qd4, qdd1..qdd4).
    """
    r = rig.pulley_radius
    offsets = [m.released_length + r * m.shaft_angle for m in state.motors]
    p = pack_params(rig, offsets).tolist()
    x = _pack_state(state).tolist()
    lens, tens = [0.0] * 4, [0.0] * 4
    if _pykernel.cable_state(x, p, lens, tens) is None:
        raise SingularityError("degenerate cord length")
    errors = [state.motors[i].released_length - references[i] for i in range(4)]
    torques, _ = controller_bank(errors, state.controllers, dt, rig)
    out = [0.0] * _pykernel.NSTATE
    _pykernel.derivative(x, torques, p, out, lens, tens)
    return np.array(out)


def elastic_wrench(pose, released, rig: RigConfig) -> tuple[np.ndarray, np.ndarray]:
    """Net static wrench (gravity included) and tensions for given released lengths."""
    x = np.zeros(_pykernel.NSTATE)
    x[0:3] = pose
    p = pack_params(rig, released)
    lens, tens = [0.0] * 4, [0.0] * 4
    wrench = _pykernel.cable_state(x, p, lens, tens)
    if wrench is None:
        raise SingularityError("degenerate cord length")
    fx, fy, mz = wrench
    return np.array([fx, fy - rig.platform_mass * rig.gravity, mz]), np.array(tens)


def rest_pose(released, rig: RigConfig, guess, tol: float = 1e-11, max_iter: int = 50) -> np.ndarray:
    """Pose where the elastic cables hold the platform still (Newton, FD Jacobian)."""
    pose = np.array(guess, dtype=float)
    scale = np.array([1.0, 1.0, rig.half_diagonal])
    f, _ = elastic_wrench(pose, released, rig)
    for _ in range(max_iter):
        if np.linalg.norm(f) < tol:
            return pose
        jac = np.empty((3, 3))
        for j in range(3):
            h = 1e-7 / scale[j] * rig.half_diagonal
            dp = np.zeros(3)
            dp[j] = h
            jac[:, j] = (elastic_wrench(pose + dp, released, rig)[0] - elastic_wrench(pose - dp, released, rig)[0]) / (2 * h)
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        lam = 1.0
        while lam > 1e-6:
            trial = pose + lam * step
            f_trial, _ = elastic_wrench(trial, released, rig)
            if np.linalg.norm(f_trial) < np.linalg.norm(f):
                break
            lam *= 0.5
        pose, f = trial, f_trial
    if np.linalg.norm(f) < 1e3 * tol:
        return pose
    raise SimulationError(f"no elastic rest pose found near {tuple(guess)} (residual {np.linalg.norm(f):.3g})")


def equilibrium_state(scenario: Scenario, pose=None) -> tuple[SimState, np.ndarray]:
    """Rest state of the closed loop at the start of a trip.

    Released lengths equal the reference lengths at ``pose`` (so every
    encoder error is zero), the platform sits where the stretched cables
    balance gravity (sagging a cable stretch below ``pose``), and each
    integrator holds its motor's static torque. The static tension
    distribution at ``pose`` seeds the search. Returns (state, tensions).
    """
    rig = scenario.rig
    pose = scenario.start_pose if pose is None else pose
    dynamics.solve_static_tensions(pose, rig)  # raises if the pose cannot be held
    released = inverse_kinematics(pose, rig)
    sagged = rest_pose(released, rig, pose)
    _, tensions = elastic_wrench(sagged, released, rig)
    wlim = scenario.windup_limit or default_windup_limit(scenario.ki, rig)
    motors, controllers = [], []
    for i in range(4):
        torque = tensions[i] * rig.pulley_radius
        acc = torque / scenario.ki if scenario.ki > 0.0 else 0.0
        acc = min(max(acc, -wlim), wlim)
        motors.append(MotorState(shaft_angle=0.0, shaft_speed=0.0, commanded_torque=torque, released_length=float(released[i])))
        controllers.append(PIState(kp=scenario.kp, ki=scenario.ki, windup_limit=wlim, accumulator=acc))
    return SimState(PlatformState.at(sagged), tuple(motors), tuple(controllers), 0.0), tensions


def step_count(scenario: Scenario) -> int:
    """Integration steps in a run: whole log intervals covering trip plus settle."""
    duration = profile_for(scenario).total_time + scenario.settle_time
    records = int(math.floor(duration / scenario.log_interval + 1e-9))
    return records * scenario.log_stride


def run(scenario: Scenario, backend: Optional[str] = None) -> Telemetry:
    """Simulate the scenario; one telemetry record per log interval.

    The PI bank runs once per ``time_step`` and is held over the RK4
    stages. The run covers the trip plus ``settle_time``, references
    holding the end pose after the trip. Raises SimulationError on
    divergence or if the platform leaves the stand by more than 5 cm.
    """
    rig = scenario.rig
    dt = scenario.time_step
    stride = scenario.log_stride
    profile = profile_for(scenario)
    nsteps = step_count(scenario)
    nrec = nsteps // stride
    times = np.arange(nsteps + 1) * dt
    refs = references_at(scenario, profile, times)

    state, _ = equilibrium_state(scenario)
    x0 = _pack_state(state)
    offsets = [m.released_length + rig.pulley_radius * m.shaft_angle for m in state.motors]
    params = pack_params(rig, offsets)
    acc = np.array([c.accumulator for c in state.controllers])
    wlim = state.controllers[0].windup_limit
    gains = (float(scenario.kp), float(scenario.ki), float(wlim), float(rig.torque_limit))

    states = np.zeros((nrec, _pykernel.NSTATE))
    torques = np.zeros((nrec, 4))
    tensions = np.zeros((nrec, 4))
    lengths = np.zeros((nrec, 4))
    kernel = get_kernel(backend)
    status, done = kernel.run_loop(
        x0, np.ascontiguousarray(refs.lengths), params, acc, gains, dt, stride, states, torques, tensions, lengths
    )

    n = done // stride
    logged = np.arange(1, n + 1) * stride
    telemetry = Telemetry.from_arrays(
        time=np.arange(1, n + 1) * scenario.log_interval,
        states=states[:n],
        pose_refs=refs.poses[logged],
        lengths=lengths[:n],
        length_refs=refs.lengths[logged],
        tensions=tensions[:n],
        torques=torques[:n],
    )
    if status != _pykernel.OK:
        reason = {
            _pykernel.ERR_NONFINITE: "state became non-finite",
            _pykernel.ERR_ESCAPED: f"platform left the stand by more than {INSTABILITY_BOUND * 100:.0f} cm",
            _pykernel.ERR_SINGULAR: "a cord length became degenerate",
        }[status]
        # an escape is caught after the step completes; other faults during it
        t_fail = (done if status == _pykernel.ERR_ESCAPED else done + 1) * dt
        raise SimulationError(f"simulation aborted at t={t_fail:.4f} s: {reason}", telemetry.tail(DIAGNOSTIC_RECORDS))
    return telemetry
