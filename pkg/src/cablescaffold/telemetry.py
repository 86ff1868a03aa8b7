"""Telemetry container and its CSV form."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

COLUMNS = (
    ["t", "px", "py", "th", "px_ref", "py_ref", "th_ref"]
    + [f"L{i}" for i in range(1, 5)]
    + [f"L{i}_ref" for i in range(1, 5)]
    + [f"T{i}" for i in range(1, 5)]
    + [f"tau{i}" for i in range(1, 5)]
    + [f"w{i}" for i in range(1, 5)]
    + ["power"]
)
INDEX = {name: j for j, name in enumerate(COLUMNS)}
CSV_FORMAT = "%.9g"


class TelemetryFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TelemetryRecord:
    time: float
    pose: tuple[float, float, float]
    pose_ref: tuple[float, float, float]
    lengths: tuple[float, ...]
    length_refs: tuple[float, ...]
    tensions: tuple[float, ...]
    torques: tuple[float, ...]
    speeds: tuple[float, ...]
    power: float


class Telemetry:
    """Column-oriented telemetry; one row per log interval."""

    def __init__(self, data: np.ndarray):
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape[1] != len(COLUMNS):
            raise TelemetryFormatError(f"expected {len(COLUMNS)} columns, got shape {data.shape}")
        self.data = data

    @classmethod
    def from_arrays(cls, time, states, pose_refs, lengths, length_refs, tensions, torques):
        speeds = states[:, 10:14]
        power = np.sum(np.abs(torques * speeds), axis=1)
        data = np.column_stack((time, states[:, 0:3], pose_refs, lengths, length_refs, tensions, torques, speeds, power))
        return cls(data.reshape(len(time), len(COLUMNS)))

    def __len__(self):
        return self.data.shape[0]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[:, INDEX[name]]

    def columns(self, *names) -> np.ndarray:
        return self.data[:, [INDEX[n] for n in names]]

    def tail(self, n: int) -> "Telemetry":
        return Telemetry(self.data[-n:])

    def record(self, k: int) -> TelemetryRecord:
        row = self.data[k]

        def pick(prefix, suffix=""):
            return tuple(float(row[INDEX[f"{prefix}{i}{suffix}"]]) for i in range(1, 5))

        return TelemetryRecord(
            time=float(row[0]),
            pose=tuple(float(v) for v in row[1:4]),
            pose_ref=tuple(float(v) for v in row[4:7]),
            lengths=pick("L"),
            length_refs=pick("L", "_ref"),
            tensions=pick("T"),
            torques=pick("tau"),
            speeds=pick("w"),
            power=float(row[INDEX["power"]]),
        )

    def __iter__(self):
        return (self.record(k) for k in range(len(self)))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(",".join(COLUMNS) + "\n")
            np.savetxt(fh, self.data, fmt=CSV_FORMAT, delimiter=",")

    @classmethod
    def from_csv(cls, path) -> "Telemetry":
        path = Path(path)
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise TelemetryFormatError(f"{path}: empty file") from None
            if header != COLUMNS:
                missing = [c for c in COLUMNS if c not in header]
                raise TelemetryFormatError(f"{path}: unexpected header (missing {missing or 'none'}, order differs)")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(COLUMNS):
                    raise TelemetryFormatError(f"{path}:{lineno}: expected {len(COLUMNS)} fields, got {len(row)}")
                try:
                    rows.append([float(v) for v in row])
                except ValueError as err:
                    raise TelemetryFormatError(f"{path}:{lineno}: {err}") from None
        return cls(np.array(rows, dtype=float).reshape(len(rows), len(COLUMNS)))
