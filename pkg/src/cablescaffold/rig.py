"""Configuration and state types for the four-cord planar scaffold.

Everything here is an immutable value object. Internal units are SI
(meters, radians, seconds); scenario files may use centimeters or degrees
only through explicitly suffixed keys (``*_cm``, ``*_deg``, ``*_rpm``).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

RPM_TO_RADPS = 2.0 * math.pi / 60.0

# Planar linkage used for the mobility count: ground, platform and three
# taut cords (as rigid links), joined by six pin joints.
SCAFFOLD_LINKS = 5
SCAFFOLD_PIN_JOINTS = 6
SCAFFOLD_CYLINDRICAL_JOINTS = 0

WORKSPACE_MARGIN = 0.005


class ScenarioError(ValueError):
    """Raised when a scenario file cannot be parsed or fails validation.

    ``key`` names the offending field when there is one.
    """

    def __init__(self, message: str, key: Optional[str] = None, path: Optional[str] = None):
        self.key = key
        self.path = path
        prefix = f"{path}: " if path else ""
        suffix = f" [key: {key}]" if key else ""
        super().__init__(f"{prefix}{message}{suffix}")


class ScenarioFileError(ScenarioError):
    """The file is missing, unreadable or not valid JSON."""


@dataclass(frozen=True)
class RigConfig:
    """Physical parameters of stand, platform, pulleys and cables.

    Defaults reproduce the desk-scale prototype. ``dry_friction_torque``
    and ``viscous_damping`` are placeholders (never measured numerically),
    and the cable constants regularize the otherwise rigid cords.
    """

    stand_height: float = 0.70  # A [m]
    stand_width: float = 0.60  # B [m]
    platform_height: float = 0.028  # a [m]
    platform_width: float = 0.158  # b [m]
    platform_mass: float = 0.1  # m [kg]
    platform_inertia: float = 2.617e-4  # Ip [kg m^2]
    pulley_radius: float = 0.025  # r [m]
    pulley_inertia: float = 3.125e-5  # I [kg m^2]
    viscous_damping: float = 0.001  # c [N m s/rad]
    dry_friction_torque: float = 0.01  # tau0 [N m]
    gravity: float = 9.81  # g [m/s^2]
    cable_stiffness: float = 1.0e4  # k [N/m]
    cable_damping: float = 10.0  # d [N s/m]
    torque_limit: float = 2.0  # [N m]
    speed_limit: float = 193.0 * RPM_TO_RADPS  # [rad/s]

    def __post_init__(self):
        for name in (
            "stand_height",
            "stand_width",
            "platform_height",
            "platform_width",
            "platform_mass",
            "platform_inertia",
            "pulley_radius",
            "pulley_inertia",
            "cable_stiffness",
            "torque_limit",
            "speed_limit",
        ):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ScenarioError(f"{name} must be strictly positive, got {value!r}", key=name)
        for name in ("viscous_damping", "dry_friction_torque", "gravity", "cable_damping"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ScenarioError(f"{name} must be non-negative, got {value!r}", key=name)
        if self.platform_height >= self.stand_height:
            raise ScenarioError(
                f"platform_height ({self.platform_height}) must be smaller than "
                f"stand_height ({self.stand_height})",
                key="platform_height",
            )
        if self.platform_width >= self.stand_width:
            raise ScenarioError(
                f"platform_width ({self.platform_width}) must be smaller than "
                f"stand_width ({self.stand_width})",
                key="platform_width",
            )

    @property
    def anchors(self) -> np.ndarray:
        """Stand anchor points, one row per cord: UL, UR, LL, LR."""
        A, B = self.stand_height, self.stand_width
        return np.array([[0.0, A], [B, A], [0.0, 0.0], [B, 0.0]])

    @property
    def corner_offsets(self) -> np.ndarray:
        """Platform-frame corner offsets from the center, numbered like the cords."""
        ha, hb = 0.5 * self.platform_height, 0.5 * self.platform_width
        return np.array([[-hb, ha], [hb, ha], [-hb, -ha], [hb, -ha]])

    @property
    def half_diagonal(self) -> float:
        return 0.5 * math.hypot(self.platform_width, self.platform_height)


@dataclass(frozen=True)
class PlatformState:
    """Platform pose (Px, Py, theta) and its first time derivatives."""

    px: float
    py: float
    theta: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0

    @property
    def pose(self) -> tuple[float, float, float]:
        return (self.px, self.py, self.theta)

    @property
    def rates(self) -> tuple[float, float, float]:
        return (self.vx, self.vy, self.omega)

    @classmethod
    def at(cls, pose, rates=(0.0, 0.0, 0.0)) -> "PlatformState":
        return cls(float(pose[0]), float(pose[1]), float(pose[2]), float(rates[0]), float(rates[1]), float(rates[2]))


@dataclass(frozen=True)
class CordState:
    length: float
    rate: float = 0.0
    angle: float = 0.0
    tension: float = 0.0
    slack: bool = False


@dataclass(frozen=True)
class MotorState:
    shaft_angle: float
    shaft_speed: float
    commanded_torque: float
    released_length: float


def corners_world(pose, rig: RigConfig) -> np.ndarray:
    px, py, th = pose[0], pose[1], pose[2]
    c, s = math.cos(th), math.sin(th)
    off = rig.corner_offsets
    return np.column_stack((px + c * off[:, 0] - s * off[:, 1], py + s * off[:, 0] + c * off[:, 1]))


def in_workspace(pose, rig: RigConfig, margin: float = WORKSPACE_MARGIN) -> bool:
    """True when every platform corner lies inside the stand by at least ``margin``."""
    pts = corners_world(pose, rig)
    return bool(
        np.all(pts[:, 0] > margin)
        and np.all(pts[:, 0] < rig.stand_width - margin)
        and np.all(pts[:, 1] > margin)
        and np.all(pts[:, 1] < rig.stand_height - margin)
    )


def in_workspace_batch(poses, rig: RigConfig, margin: float = WORKSPACE_MARGIN) -> np.ndarray:
    """Vectorized :func:`in_workspace` over an (N, 3) array of poses."""
    poses = np.atleast_2d(np.asarray(poses, dtype=float))
    c, s = np.cos(poses[:, 2:3]), np.sin(poses[:, 2:3])
    off = rig.corner_offsets
    x = poses[:, 0:1] + c * off[:, 0] - s * off[:, 1]
    y = poses[:, 1:2] + s * off[:, 0] + c * off[:, 1]
    inside = (x > margin) & (x < rig.stand_width - margin) & (y > margin) & (y < rig.stand_height - margin)
    return inside.all(axis=1)


def inside_inflated_stand(pose, rig: RigConfig) -> bool:
    """Conservative check: the center is at least a half-diagonal away from every wall."""
    hd = rig.half_diagonal
    return hd < pose[0] < rig.stand_width - hd and hd < pose[1] < rig.stand_height - hd


def grubler_mobility(n: int, j1: int, j2: int = 0) -> int:
    """Net degrees of freedom of a planar linkage."""
    return 3 * n - 2 * j1 - j2 - 3


def validate_mobility(
    rig: Optional[RigConfig] = None,
    n: int = SCAFFOLD_LINKS,
    j1: int = SCAFFOLD_PIN_JOINTS,
    j2: int = SCAFFOLD_CYLINDRICAL_JOINTS,
) -> int:
    """Mobility of the scaffold with three cords held at fixed length.

    The topology does not depend on the rig dimensions; ``rig`` is accepted
    so callers can pass their configuration uniformly. Returns 0 for the
    shipped topology: three prescribed lengths lock the platform.
    """
    return grubler_mobility(n, j1, j2)


@dataclass(frozen=True)
class Scenario:
    rig: RigConfig = field(default_factory=RigConfig)
    start_pose: tuple[float, float, float] = (0.10, 0.10, 0.0)
    end_pose: tuple[float, float, float] = (0.30, 0.60, 0.0)
    cruise_speed: float = 0.05
    accel: float = 0.1
    kp: float = 2000.0
    ki: float = 500.0
    time_step: float = 1e-4
    settle_time: float = 2.0
    log_interval: float = 1e-3
    output_path: Optional[str] = None
    name: str = "scenario"
    description: str = ""
    windup_limit: Optional[float] = None
    experimental_kp: Optional[float] = None
    experimental_ki: Optional[float] = None

    def __post_init__(self):
        for key in ("cruise_speed", "accel", "time_step", "settle_time", "log_interval"):
            value = getattr(self, key)
            if not (math.isfinite(value) and value > 0.0):
                raise ScenarioError(f"{key} must be strictly positive, got {value!r}", key=key)
        ratio = self.log_interval / self.time_step
        if ratio < 1.0 - 1e-9 or abs(ratio - round(ratio)) > 1e-6:
            raise ScenarioError("log_interval must be a whole multiple of time_step", key="log_interval")
        for key in ("kp", "ki"):
            value = getattr(self, key)
            if not (math.isfinite(value) and value >= 0.0):
                raise ScenarioError(f"{key} must be non-negative, got {value!r}", key=key)
        if self.windup_limit is not None and not self.windup_limit > 0.0:
            raise ScenarioError("windup_limit must be positive", key="windup_limit")
        for key in ("start_pose", "end_pose"):
            pose = getattr(self, key)
            if len(pose) != 3 or not all(math.isfinite(v) for v in pose):
                raise ScenarioError(f"{key} must be three finite numbers", key=key)
            if not in_workspace(pose, self.rig):
                raise ScenarioError(f"{key} {tuple(pose)} lies outside the workspace", key=key)

    @property
    def log_stride(self) -> int:
        return int(round(self.log_interval / self.time_step))

    def with_gains(self, kp: float, ki: float) -> "Scenario":
        return replace(self, kp=kp, ki=ki)


# --- scenario files ---------------------------------------------------------

_CM = 0.01
_DEG = math.pi / 180.0

# canonical key -> (field name, alternative keys with their scale to SI)
_RIG_KEYS = {
    "stand_height_m": ("stand_height", {"stand_height_cm": _CM}),
    "stand_width_m": ("stand_width", {"stand_width_cm": _CM}),
    "platform_height_m": ("platform_height", {"platform_height_cm": _CM}),
    "platform_width_m": ("platform_width", {"platform_width_cm": _CM}),
    "platform_mass_kg": ("platform_mass", {}),
    "platform_inertia_kgm2": ("platform_inertia", {}),
    "pulley_radius_m": ("pulley_radius", {"pulley_radius_cm": _CM}),
    "pulley_inertia_kgm2": ("pulley_inertia", {}),
    "viscous_damping_nms": ("viscous_damping", {}),
    "dry_friction_torque_nm": ("dry_friction_torque", {}),
    "gravity_mps2": ("gravity", {}),
    "cable_stiffness_npm": ("cable_stiffness", {}),
    "cable_damping_nspm": ("cable_damping", {}),
    "torque_limit_nm": ("torque_limit", {}),
    "speed_limit_radps": ("speed_limit", {"speed_limit_rpm": RPM_TO_RADPS}),
}

_SCALAR_KEYS = {
    "cruise_speed_mps": ("cruise_speed", {"cruise_speed_cmps": _CM}),
    "accel_mps2": ("accel", {"accel_cmps2": _CM}),
    "kp": ("kp", {}),
    "ki": ("ki", {}),
    "time_step_s": ("time_step", {"time_step_ms": 1e-3}),
    "settle_time_s": ("settle_time", {}),
    "log_interval_s": ("log_interval", {"log_interval_ms": 1e-3}),
    "windup_limit_m_s": ("windup_limit", {}),
}

_POSE_KEYS = {"start_pose": "start_pose", "end_pose": "end_pose"}
_TEXT_KEYS = {"name", "description", "output_path"}
_META_KEYS = {"experimental_gains"}


def _number(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"expected a number, got {value!r}", key=key)
    return float(value)


def _pick(data: dict, canonical: str, alternatives: dict, used: set):
    present = [k for k in (canonical, *alternatives) if k in data]
    if len(present) > 1:
        raise ScenarioError(f"conflicting keys {present}", key=present[0])
    if not present:
        return None
    key = present[0]
    used.add(key)
    scale = 1.0 if key == canonical else alternatives[key]
    return _number(data[key], key) * scale


def _pose(data: dict, stem: str, used: set):
    variants = {f"{stem}_m": (1.0, 1.0), f"{stem}_cm": (_CM, _DEG), f"{stem}_cm_rad": (_CM, 1.0)}
    present = [k for k in variants if k in data]
    if len(present) > 1:
        raise ScenarioError(f"conflicting keys {present}", key=present[0])
    if not present:
        return None
    key = present[0]
    used.add(key)
    raw = data[key]
    if not isinstance(raw, (list, tuple)) or len(raw) not in (2, 3):
        raise ScenarioError("pose must be [x, y] or [x, y, theta]", key=key)
    vals = [_number(v, key) for v in raw] + ([0.0] if len(raw) == 2 else [])
    lin, ang = variants[key]
    return (vals[0] * lin, vals[1] * lin, vals[2] * ang)


def scenario_from_dict(data: dict, path: Optional[str] = None) -> Scenario:
    """Build a validated Scenario from a flat key dictionary.

    Pose keys: ``start_pose_m`` is ``[x_m, y_m, theta_rad]``;
    ``start_pose_cm`` is ``[x_cm, y_cm, theta_deg]``; ``start_pose_cm_rad``
    is ``[x_cm, y_cm, theta_rad]``. Unknown keys are rejected.
    """
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must contain a JSON object", path=path)
    used: set = set()
    try:
        rig_kwargs = {}
        for canonical, (name, alts) in _RIG_KEYS.items():
            value = _pick(data, canonical, alts, used)
            if value is not None:
                rig_kwargs[name] = value
        kwargs: dict[str, Any] = {}
        for canonical, (name, alts) in _SCALAR_KEYS.items():
            value = _pick(data, canonical, alts, used)
            if value is not None:
                kwargs[name] = value
        for stem, name in _POSE_KEYS.items():
            pose = _pose(data, stem, used)
            if pose is not None:
                kwargs[name] = pose
        for key in _TEXT_KEYS:
            if key in data:
                used.add(key)
                if data[key] is not None and not isinstance(data[key], str):
                    raise ScenarioError("expected a string", key=key)
                kwargs[key] = data[key]
        if "experimental_gains" in data:
            used.add("experimental_gains")
            gains = data["experimental_gains"]
            if not isinstance(gains, dict) or set(gains) - {"kp", "ki"}:
                raise ScenarioError("expected an object with kp and ki", key="experimental_gains")
            kwargs["experimental_kp"] = _number(gains.get("kp"), "experimental_gains.kp")
            kwargs["experimental_ki"] = _number(gains.get("ki"), "experimental_gains.ki")
        unknown = sorted(set(data) - used)
        if unknown:
            raise ScenarioError(f"unknown key(s) {unknown}", key=unknown[0])
        return Scenario(rig=RigConfig(**rig_kwargs), **kwargs)
    except ScenarioError as err:
        if path and err.path is None:
            raise ScenarioError(str(err).split(" [key:")[0], key=err.key, path=path) from None
        raise


def scenario_to_dict(scenario: Scenario) -> dict:
    """Serialize to the canonical SI keys (floats kept at full precision)."""
    out: dict[str, Any] = {"name": scenario.name}
    if scenario.description:
        out["description"] = scenario.description
    out["start_pose_m"] = list(scenario.start_pose)
    out["end_pose_m"] = list(scenario.end_pose)
    for canonical, (name, _) in _SCALAR_KEYS.items():
        value = getattr(scenario, name)
        if value is not None:
            out[canonical] = value
    if scenario.output_path is not None:
        out["output_path"] = scenario.output_path
    if scenario.experimental_kp is not None:
        out["experimental_gains"] = {"kp": scenario.experimental_kp, "ki": scenario.experimental_ki}
    rig = asdict(scenario.rig)
    for canonical, (name, _) in _RIG_KEYS.items():
        out[canonical] = rig[name]
    return out


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ScenarioFileError(f"cannot read file: {err.strerror}", path=str(path)) from err
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioFileError(f"malformed JSON ({err.msg} at line {err.lineno})", path=str(path)) from err
    return scenario_from_dict(data, path=str(path))


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n", encoding="utf-8")


def rig_field_names() -> list[str]:
    return [f.name for f in fields(RigConfig)]
