"""Tracking-error and power summaries of a telemetry log."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .rig import RigConfig
from .telemetry import Telemetry

# Published simulation figures, printed next to measured values for comparison.
PUBLISHED_CORD_RMS = (2.56e-4, 2.67e-4, 2.81e-4, None)
PUBLISHED_ORIENTATION_RMS = 0.002
PUBLISHED_PEAK_POWER = 35.0

SLACK_TENSION = 0.05


class EmptyTelemetryError(ValueError):
    pass


@dataclass(frozen=True)
class RmsReport:
    """RMS and max tracking errors [m, rad] plus peak and mean total power [W]."""

    cord_rms: tuple[float, float, float, float]
    cord_max: tuple[float, float, float, float]
    px_rms: float
    py_rms: float
    theta_rms: float
    px_max: float
    py_max: float
    theta_max: float
    peak_power: float
    mean_power: float
    records: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cord_rms"] = list(self.cord_rms)
        d["cord_max"] = list(self.cord_max)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def format_table(self) -> str:
        lines = [f"{'channel':<14}{'RMS':>13}{'max':>13}{'published RMS':>16}"]
        for i in range(4):
            pub = PUBLISHED_CORD_RMS[i]
            pub_s = f"{pub:.3e}" if pub is not None else "-"
            lines.append(f"{f'cord {i + 1} [m]':<14}{self.cord_rms[i]:>13.4e}{self.cord_max[i]:>13.4e}{pub_s:>16}")
        lines.append(f"{'x [m]':<14}{self.px_rms:>13.4e}{self.px_max:>13.4e}{'-':>16}")
        lines.append(f"{'y [m]':<14}{self.py_rms:>13.4e}{self.py_max:>13.4e}{'-':>16}")
        lines.append(
            f"{'theta [rad]':<14}{self.theta_rms:>13.4e}{self.theta_max:>13.4e}{PUBLISHED_ORIENTATION_RMS:>16.3e}"
        )
        lines.append(f"peak power {self.peak_power:.4g} W (published {PUBLISHED_PEAK_POWER:g} W), mean {self.mean_power:.4g} W")
        lines.append(f"records {self.records}")
        return "\n".join(lines)


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(x))))


def _max(x: np.ndarray) -> float:
    return float(np.max(np.abs(x)))


def compute_rms(telemetry: Telemetry) -> RmsReport:
    """Per-channel RMS and max absolute error over every record."""
    if len(telemetry) == 0:
        raise EmptyTelemetryError("telemetry has no records")
    cord_err = [telemetry[f"L{i}"] - telemetry[f"L{i}_ref"] for i in range(1, 5)]
    ex = telemetry["px"] - telemetry["px_ref"]
    ey = telemetry["py"] - telemetry["py_ref"]
    eth = telemetry["th"] - telemetry["th_ref"]
    power = telemetry["power"]
    return RmsReport(
        cord_rms=tuple(_rms(e) for e in cord_err),
        cord_max=tuple(_max(e) for e in cord_err),
        px_rms=_rms(ex),
        py_rms=_rms(ey),
        theta_rms=_rms(eth),
        px_max=_max(ex),
        py_max=_max(ey),
        theta_max=_max(eth),
        peak_power=float(np.max(power)),
        mean_power=float(np.mean(power)),
        records=len(telemetry),
    )


def cruise_mean_power(telemetry: Telemetry, t_start: float, t_end: float) -> float:
    """Mean total power over records with t_start <= t <= t_end."""
    t = telemetry["t"]
    mask = (t >= t_start) & (t <= t_end)
    if not mask.any():
        raise EmptyTelemetryError(f"no records between {t_start} and {t_end} s")
    return float(np.mean(telemetry["power"][mask]))


def lower_cord_exclusivity(telemetry: Telemetry, threshold: float = SLACK_TENSION) -> float:
    """Fraction of records where at most one lower cord carries more than ``threshold``."""
    if len(telemetry) == 0:
        raise EmptyTelemetryError("telemetry has no records")
    both = (telemetry["T3"] > threshold) & (telemetry["T4"] > threshold)
    return float(1.0 - np.mean(both))


def half_plane_agreement(telemetry: Telemetry, rig: RigConfig, threshold: float = SLACK_TENSION) -> float:
    """Fraction of records where the upper cord picked by the half-plane rule is slack.

    The rule names cord 2 when the platform centre is in the right half of
    the stand and cord 1 otherwise.
    """
    if len(telemetry) == 0:
        raise EmptyTelemetryError("telemetry has no records")
    right = telemetry["px"] >= 0.5 * rig.stand_width
    predicted = np.where(right, telemetry["T2"], telemetry["T1"])
    return float(np.mean(predicted <= threshold))
