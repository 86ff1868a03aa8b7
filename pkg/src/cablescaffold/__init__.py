"""Simulation of a four-cord, three-DOF cable-suspended scaffold platform."""

from .rig import (
    CordState,
    MotorState,
    PlatformState,
    RigConfig,
    Scenario,
    ScenarioError,
    in_workspace,
    load_scenario,
    save_scenario,
    validate_mobility,
)

__all__ = [
    "CordState",
    "MotorState",
    "PlatformState",
    "RigConfig",
    "Scenario",
    "ScenarioError",
    "in_workspace",
    "load_scenario",
    "save_scenario",
    "validate_mobility",
]

__version__ = "0.1.0"
