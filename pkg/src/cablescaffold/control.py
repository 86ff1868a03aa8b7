"""Per-cord discrete PI controllers with saturation and conditional anti-windup."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .rig import RigConfig


@dataclass(frozen=True)
class PIState:
    kp: float
    ki: float
    windup_limit: float
    accumulator: float = 0.0
    last_error: float = 0.0

    @classmethod
    def for_rig(cls, kp: float, ki: float, rig: RigConfig, windup_limit: Optional[float] = None, accumulator: float = 0.0):
        if windup_limit is None:
            windup_limit = default_windup_limit(ki, rig)
        return cls(kp=kp, ki=ki, windup_limit=windup_limit, accumulator=accumulator)


def default_windup_limit(ki: float, rig: RigConfig) -> float:
    # the integral term alone can just reach saturation
    return rig.torque_limit / ki if ki > 0.0 else float("inf")


def pi_step(state: PIState, error: float, dt: float, rig: RigConfig) -> tuple[float, PIState]:
    """One controller update.

    Output is Kp*e + Ki*acc using the accumulator from previous steps,
    saturated to the rig torque limit. The accumulator integrates e*dt
    except when the output is saturated in the direction the error pushes.
    Positive output winds the cable in.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    raw = state.kp * error + state.ki * state.accumulator
    limit = rig.torque_limit
    out = min(max(raw, -limit), limit)
    acc = state.accumulator
    saturated = out != raw
    if not (saturated and (error > 0.0) == (raw > 0.0) and error != 0.0):
        acc = min(max(acc + error * dt, -state.windup_limit), state.windup_limit)
    return out, replace(state, accumulator=acc, last_error=error)


def controller_bank(errors: Sequence[float], states: Sequence[PIState], dt: float, rig: RigConfig):
    """Independent PI update for each cord; returns (torques, new states)."""
    if len(errors) != len(states):
        raise ValueError("one error per controller")
    torques, new_states = [], []
    for e, s in zip(errors, states):
        u, s2 = pi_step(s, float(e), dt, rig)
        torques.append(u)
        new_states.append(s2)
    return torques, new_states
