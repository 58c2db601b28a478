"""Telemetry CSV: one row per control tick, fixed column schema.

The column set is frozen (appending would break downstream sysid configs
and the golden-header regression test). Floats are written at 9
significant digits; GPS columns are empty between fixes. RFC-4180 quoting
via the csv module.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields

import numpy as np


class IoFailure(OSError):
    """Log file could not be written or read."""


COLUMNS = (
    "time_s",
    "north_m", "east_m", "down_m",
    "u_mps", "v_mps", "w_mps",
    "roll_deg", "pitch_deg", "yaw_deg",
    "p_dps", "q_dps", "r_dps",
    "roll_est_deg", "pitch_est_deg", "heading_est_deg",
    "roll_cmd_deg", "pitch_cmd_deg", "heading_cmd_deg", "speed_cmd_mps",
    "aileron_us", "elevator_us", "rudder_us", "throttle_us",
    "gps_lat_deg", "gps_lon_deg", "gps_alt_m", "gps_speed_mps",
    "gps_course_deg", "gps_valid",
    "fault_flags",
)

_INT_COLUMNS = {"aileron_us", "elevator_us", "rudder_us", "throttle_us",
                "gps_valid", "fault_flags"}
_OPTIONAL_COLUMNS = {"gps_lat_deg", "gps_lon_deg", "gps_alt_m",
                     "gps_speed_mps", "gps_course_deg"}


@dataclass(frozen=True)
class TelemetryRecord:
    time_s: float
    north_m: float
    east_m: float
    down_m: float
    u_mps: float
    v_mps: float
    w_mps: float
    roll_deg: float
    pitch_deg: float
    yaw_deg: float
    p_dps: float
    q_dps: float
    r_dps: float
    roll_est_deg: float
    pitch_est_deg: float
    heading_est_deg: float
    roll_cmd_deg: float
    pitch_cmd_deg: float
    heading_cmd_deg: float
    speed_cmd_mps: float
    aileron_us: int
    elevator_us: int
    rudder_us: int
    throttle_us: int
    gps_lat_deg: float | None = None
    gps_lon_deg: float | None = None
    gps_alt_m: float | None = None
    gps_speed_mps: float | None = None
    gps_course_deg: float | None = None
    gps_valid: int = 0
    fault_flags: int = 0


assert tuple(f.name for f in fields(TelemetryRecord)) == COLUMNS


def _format(name: str, value) -> str:
    if value is None:
        return ""
    if name in _INT_COLUMNS:
        return str(int(value))
    # 10 significant digits: worst-case 5e-10 relative on reload, so the
    # 9-digit fidelity contract holds with margin
    return f"{value:.10g}"


class TelemetryWriter:
    """Streaming writer so hour-long runs never hold the log in memory."""

    def __init__(self, path: str):
        try:
            self._file = open(path, "w", encoding="utf-8", newline="")
        except OSError as e:
            raise IoFailure(str(e)) from e
        self._csv = csv.writer(self._file)
        self._csv.writerow(COLUMNS)
        self.rows = 0

    def write(self, record: TelemetryRecord) -> None:
        self._csv.writerow(_format(name, getattr(record, name))
                           for name in COLUMNS)
        self.rows += 1

    def close(self) -> None:
        self._file.close()

    def __enter__(self) -> "TelemetryWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def write_log(records, path: str) -> None:
    """Write an iterable of TelemetryRecord to CSV."""
    with TelemetryWriter(path) as w:
        for record in records:
            w.write(record)


class LogTable:
    """Column-addressable view of a loaded log (name -> numpy array).

    Missing optional values load as NaN so column math stays vectorized.
    """

    def __init__(self, columns: dict[str, np.ndarray]):
        self._columns = columns
        self.columns = list(columns.keys())

    def __getitem__(self, name: str) -> np.ndarray:
        return self._columns[name]

    def __contains__(self, name: str) -> bool:
        return name in self._columns

    def __len__(self) -> int:
        return 0 if not self._columns else len(next(iter(self._columns.values())))

    def keys(self):
        return self._columns.keys()


def load_log(path: str) -> LogTable:
    try:
        with open(path, encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None:
                raise IoFailure(f"{path}: empty file, expected a header row")
            raw: list[list[str]] = [row for row in reader if row]
    except OSError as e:
        raise IoFailure(str(e)) from e

    data: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        cells = [row[j] if j < len(row) else "" for row in raw]
        values = np.array([float(c) if c != "" else math.nan for c in cells])
        data[name] = values
    return LogTable(data)
